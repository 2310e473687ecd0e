#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dscale/cxlab.hpp"
#include "dscale/errors.hpp"
#include "dscale/moments.hpp"
#include "dscale/rng.hpp"

using namespace dscale;

namespace {

using Atom = DiscreteDistribution::Atom;

DiscreteDistribution coin() { return DiscreteDistribution::bernoulli(0.5); }

}  // namespace

TEST_CASE("independent_sum: binomial shapes") {
    auto two = independent_sum(std::vector<DiscreteDistribution>{coin(), coin()});
    REQUIRE(two.support_size() == 3);
    CHECK(two.atoms()[0].prob == doctest::Approx(0.25));
    CHECK(two.atoms()[1].prob == doctest::Approx(0.5));
    CHECK(two.atoms()[2].prob == doctest::Approx(0.25));

    auto three = independent_sum(std::vector<DiscreteDistribution>{coin(), coin(), coin()});
    REQUIRE(three.support_size() == 4);
    CHECK(three.atoms()[1].prob == doctest::Approx(3.0 / 8));

    auto pm = independent_sum(std::vector<DiscreteDistribution>{
        DiscreteDistribution::point_mass(2.5), DiscreteDistribution::point_mass(1.5)});
    REQUIRE(pm.support_size() == 1);
    CHECK(pm.atoms()[0].value == doctest::Approx(4.0));
}

TEST_CASE("independent_sum: support cap") {
    std::vector<DiscreteDistribution> many(25, coin());
    CHECK_THROWS_AS(independent_sum(many, 20), BudgetExceeded);
}

TEST_CASE("sum_of_joint: mutually exclusive indicators collapse to a point mass") {
    JointDistribution j;
    j.dim = 3;
    j.atoms = {{{1, 0, 0}, 1.0 / 3}, {{0, 1, 0}, 1.0 / 3}, {{0, 0, 1}, 1.0 / 3}};
    auto s = sum_of_joint(j);
    REQUIRE(s.support_size() == 1);
    CHECK(s.atoms()[0].value == doctest::Approx(1.0));
}

TEST_CASE("sum_of_joint: independent product matches independent_sum") {
    // product of Bernoulli(0.5) x Bernoulli(0.25)
    JointDistribution j;
    j.dim = 2;
    j.atoms = {{{0, 0}, 0.375}, {{0, 1}, 0.125}, {{1, 0}, 0.375}, {{1, 1}, 0.125}};
    auto via_joint = sum_of_joint(j);
    auto via_convolution = independent_sum(std::vector<DiscreteDistribution>{
        DiscreteDistribution::bernoulli(0.5), DiscreteDistribution::bernoulli(0.25)});
    REQUIRE(via_joint.support_size() == via_convolution.support_size());
    for (std::size_t i = 0; i < via_joint.support_size(); ++i) {
        CHECK(via_joint.atoms()[i].value == doctest::Approx(via_convolution.atoms()[i].value));
        CHECK(via_joint.atoms()[i].prob == doctest::Approx(via_convolution.atoms()[i].prob));
    }
}

TEST_CASE("poisson_scale_expectation worked examples") {
    TestConvexFunction square(TestConvexFunction::Power{2.0});
    CHECK(poisson_scale_expectation(DiscreteDistribution::point_mass(1.0), square, 1e-9) ==
          doctest::Approx(2.0).epsilon(1e-8));
    // factorization E[(sP)^q] = s^q A_q
    CHECK(poisson_scale_expectation(DiscreteDistribution::point_mass(3.0), square, 1e-9) ==
          doctest::Approx(9.0 * 2.0).epsilon(1e-8));
    CHECK(poisson_scale_expectation(DiscreteDistribution::point_mass(0.0), square, 1e-9) ==
          doctest::Approx(0.0));
}

TEST_CASE("cx_dominates basics") {
    auto x = coin();
    CHECK(cx_dominates(x, x, 1e-9).holds);

    // Jensen direction: point mass at the mean is below any distribution
    auto spread = DiscreteDistribution::from_atoms({{0.0, 0.5}, {2.0, 0.5}});
    auto pm = DiscreteDistribution::point_mass(1.0);
    CHECK(cx_dominates(pm, spread, 1e-9).holds);

    // Binomial(2, 1/2) vs point mass at 1: fails with witness t = 1
    auto binom = independent_sum(std::vector<DiscreteDistribution>{coin(), coin()});
    auto res = cx_dominates(binom, pm, 1e-9);
    CHECK(!res.holds);
    CHECK(res.witness == doctest::Approx(1.0));
    CHECK(res.worst_slack == doctest::Approx(-0.25).epsilon(1e-6));
}

TEST_CASE("decoupling_check: two mutually exclusive Bernoulli(1/2)") {
    JointDistribution j;
    j.dim = 2;
    j.atoms = {{{1, 0}, 0.5}, {{0, 1}, 0.5}};
    auto rep = decoupling_check(j, 2.0, 1e-9);
    CHECK(rep.lhs_norm * rep.lhs_norm == doctest::Approx(1.5));
    CHECK(rep.rhs_norm == doctest::Approx(1.0));
    CHECK(rep.holds);
    CHECK(rep.cx.holds);
}

TEST_CASE("decoupling_check: independent joint holds with slack") {
    JointDistribution j;
    j.dim = 2;
    j.atoms = {{{0, 0}, 0.25}, {{0, 2}, 0.25}, {{1, 0}, 0.25}, {{1, 2}, 0.25}};
    for (double q : {1.0, 1.5, 2.0, 3.0}) {
        auto rep = decoupling_check(j, q, 1e-9);
        CHECK(rep.holds);
        // independent joint: lhs norm equals rhs norm exactly
        CHECK(rep.lhs_norm == doctest::Approx(rep.rhs_norm).epsilon(1e-9));
    }
}

TEST_CASE("decoupling_check: point-mass joint is the equality edge") {
    JointDistribution j;
    j.dim = 3;
    j.atoms = {{{1.0, 2.0, 0.5}, 1.0}};
    auto rep = decoupling_check(j, 2.0, 1e-9);
    CHECK(rep.lhs_norm == doctest::Approx(rep.rhs_norm));
    CHECK(rep.holds);
}

TEST_CASE("tightness construction converges to A_q from below") {
    auto t1 = tightness_construction(1);
    CHECK(t1.sum_x.moment(2.0) == doctest::Approx(1.0));

    auto t100 = tightness_construction(100);
    CHECK(t100.sum_x.moment(2.0) == doctest::Approx(1.99).epsilon(1e-9));
    CHECK(t100.second_moment_closed_form == doctest::Approx(1.99));

    auto big = tightness_construction(10000);
    double binomial_sum = big.sum_x.moment(2.0);
    CHECK(binomial_sum == doctest::Approx(big.second_moment_closed_form).epsilon(1e-9));
    CHECK(binomial_sum >= 0.999 * fractional_bell(2.0, 1e-10));
}

TEST_CASE("bernoulli vs poisson: worked examples") {
    TestConvexFunction square(TestConvexFunction::Power{2.0});
    CHECK(bernoulli_vs_poisson_check(1.0, square, 1e-9));
    // linear function: equality of means
    PiecewiseLinear lin;
    lin.breakpoints = {0.0, 1.0, 100.0};
    lin.values = {0.0, 1.0, 100.0};
    CHECK(bernoulli_vs_poisson_check(0.6, TestConvexFunction(TabulatedConvex(lin)), 1e-9));
    CHECK(bernoulli_vs_poisson_check(0.3, TestConvexFunction(TestConvexFunction::StopLoss{1.0}),
                                     1e-9));
    for (double p : {0.1, 0.35, 0.8, 1.0})
        for (double q : {1.0, 1.5, 2.0, 3.0})
            CHECK(bernoulli_vs_poisson_check(p, TestConvexFunction(TestConvexFunction::Power{q}),
                                             1e-9));
}

TEST_CASE("lemma: sums of cx-dominated pairs stay cx-dominated") {
    RngStream rng(333);
    int checked = 0;
    while (checked < 30) {
        // X = point mass at the mean of Y (always <=cx Y), two such pairs
        std::vector<DiscreteDistribution> xs, ys;
        for (int i = 0; i < 2; ++i) {
            std::vector<Atom> atoms;
            double total = 0.0;
            int n = 2 + static_cast<int>(rng.next_below(3));
            for (int a = 0; a < n; ++a) {
                double prob = 1.0 + static_cast<double>(rng.next_below(8));
                atoms.push_back({static_cast<double>(rng.next_below(9)) / 2.0, prob});
                total += prob;
            }
            for (auto& a : atoms) a.prob /= total;
            auto y = DiscreteDistribution::from_atoms(atoms);
            ys.push_back(y);
            xs.push_back(DiscreteDistribution::point_mass(y.mean()));
            REQUIRE(cx_dominates(xs.back(), ys.back(), 1e-9).holds);
        }
        auto sum_x = independent_sum(xs);
        auto sum_y = independent_sum(ys);
        CHECK(cx_dominates(sum_x, sum_y, 1e-9).holds);
        ++checked;
    }
}

TEST_CASE("lemma: exclusive indicators sandwich between Bernoulli sum and Poisson scale") {
    RngStream rng(444);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng.next_below(4));  // up to 5
        std::vector<double> alpha(n), probs(n);
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            alpha[i] = static_cast<double>(1 + rng.next_below(8)) / 2.0;
            probs[i] = 1.0 + static_cast<double>(rng.next_below(9));
            total += probs[i];
        }
        for (double& p : probs) p /= total;

        // exclusive sum: one coordinate fires, scaled by alpha_i
        std::vector<Atom> excl;
        for (int i = 0; i < n; ++i) excl.push_back({alpha[i], probs[i]});
        auto exclusive = DiscreteDistribution::from_atoms(excl);

        std::vector<DiscreteDistribution> bern;
        for (int i = 0; i < n; ++i)
            bern.push_back(DiscreteDistribution::bernoulli(probs[i], alpha[i]));
        auto bernoulli_sum = independent_sum(bern);

        auto first = cx_dominates(exclusive, bernoulli_sum, 1e-9);
        CHECK(first.holds);
        ScaledPoisson scaled = poisson_times(exclusive, 1e-11);
        auto second = cx_dominates(bernoulli_sum, scaled.dist, 1e-9 + scaled.tail_mean_bound);
        CHECK(second.holds);
    }
}

TEST_CASE("fact: conditional split of a Poisson sum is proportional to the rates") {
    auto conditional_mean = [](double la, double lb, int k) {
        double num = 0.0, den = 0.0;
        for (int j = 0; j <= k; ++j) {
            double p = poisson_pmf(j, la) * poisson_pmf(k - j, lb);
            num += j * p;
            den += p;
        }
        return num / den;
    };
    CHECK(conditional_mean(1.0, 1.0, 2) == doctest::Approx(1.0).epsilon(1e-6));
    RngStream rng(555);
    for (int trial = 0; trial < 20; ++trial) {
        double la = 0.25 + rng.next_double() * 3.0;
        double lb = 0.25 + rng.next_double() * 3.0;
        int k = 1 + static_cast<int>(rng.next_below(6));
        CHECK(conditional_mean(la, lb, k) ==
              doctest::Approx(k * la / (la + lb)).epsilon(1e-6));
    }
}

TEST_CASE("corollary: integer-valued Y against Bernoulli X with matching means") {
    // Y_i integer-valued, X_i Bernoulli with E X_i = E Y_i: norm bound holds
    RngStream rng(666);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 1 + static_cast<int>(rng.next_below(3));
        JointDistribution joint;
        joint.dim = n;
        int atoms = 2 + static_cast<int>(rng.next_below(4));
        std::vector<double> probs(atoms);
        double total = 0.0;
        for (double& p : probs) {
            p = 1.0 + static_cast<double>(rng.next_below(8));
            total += p;
        }
        for (int a = 0; a < atoms; ++a) {
            JointDistribution::Atom atom;
            atom.prob = probs[a] / total;
            for (int i = 0; i < n; ++i)
                atom.values.push_back(static_cast<double>(rng.next_below(3)));  // integers 0..2
            joint.atoms.push_back(std::move(atom));
        }
        std::vector<DiscreteDistribution> bern;
        bool valid = true;
        for (int i = 0; i < n; ++i) {
            double mean = joint.marginal(i).mean();
            if (mean > 1.0) {
                valid = false;  // Bernoulli matching requires mean <= 1
                break;
            }
            bern.push_back(DiscreteDistribution::bernoulli(mean));
        }
        if (!valid) continue;
        auto sum_x = independent_sum(bern);
        ScaledPoisson py = poisson_times(sum_of_joint(joint), 1e-11);
        CHECK(cx_dominates(sum_x, py.dist, 1e-9 + py.tail_mean_bound).holds);
        for (double q : {1.0, 2.0, 3.0}) {
            double aq = fractional_bell(q, 1e-10);
            CHECK(sum_x.norm(q) <=
                  std::pow(aq, 1.0 / q) * sum_of_joint(joint).norm(q) + 1e-9);
        }
    }
}

TEST_CASE("na experiments hold on both families") {
    auto onehot = na_decoupling_experiment(NaFamily::OneHotCategorical, 3, 0, {}, 2.0, 1e-9);
    CHECK(onehot.support_atoms == 3);
    CHECK(onehot.decoupling.holds);

    auto swr = na_decoupling_experiment(NaFamily::SamplingWithoutReplacement, 4, 2, {}, 2.0, 1e-9);
    CHECK(swr.support_atoms == 6);
    CHECK(swr.decoupling.holds);

    // degenerate single slot: equality case
    auto single = na_decoupling_experiment(NaFamily::OneHotCategorical, 1, 0, {}, 2.0, 1e-9);
    CHECK(single.decoupling.holds);
    CHECK(single.decoupling.lhs_norm == doctest::Approx(single.decoupling.rhs_norm));

    // weighted variants
    std::vector<double> w{0.5, 2.0, 1.0, 1.5};
    auto weighted = na_decoupling_experiment(NaFamily::SamplingWithoutReplacement, 4, 3, w, 3.0, 1e-9);
    CHECK(weighted.decoupling.holds);
}

TEST_CASE("corpus: serial equals parallel, seeded replay") {
    CorpusConfig cfg;
    cfg.size = 120;
    cfg.seed = 987;
    auto a = run_decoupling_corpus(cfg, ExecPolicy::Serial);
    auto b = run_decoupling_corpus(cfg, ExecPolicy::Parallel);
    CHECK(a.worst_norm_slack == b.worst_norm_slack);
    CHECK(a.worst_cx_slack == b.worst_cx_slack);
    CHECK(a.norm_violations == 0);
    CHECK(a.cx_violations == 0);
}
