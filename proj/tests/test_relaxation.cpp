#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dscale/errors.hpp"
#include "dscale/generate.hpp"
#include "dscale/oracles.hpp"
#include "dscale/relaxation.hpp"
#include "dscale/rng.hpp"

using namespace dscale;

namespace {

TermData quadratic_pair() {
    TermData term;
    term.cost = CostFunction::power(1.0, 2.0);
    term.coeffs = {{0, Rational(1)}, {1, Rational(1)}};
    return term;
}

// Brute-force oracle for the knapsack separation: scan all subsets.
struct SubsetViolation {
    double violation = 0.0;
    std::vector<int> set;
};
SubsetViolation most_violated_subset(const TermData& term, double xi,
                                     const std::vector<double>& eta) {
    SubsetViolation best;
    std::size_t n = term.support_size();
    double delta = term.granularity.to_double();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        double profit = 0.0;
        std::int64_t w = 0;
        std::vector<int> set;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (std::size_t{1} << k)) {
                profit += eta[k];
                w += term.weight_of(k);
                set.push_back(static_cast<int>(k));
            }
        double v = xi + profit - term.cost(delta * static_cast<double>(w));
        if (v > best.violation) {
            best.violation = v;
            best.set = set;
        }
    }
    return best;
}

TermData random_term(RngStream& rng, int max_support) {
    TermData term;
    int n = 1 + static_cast<int>(rng.next_below(max_support));
    double q = 1.0 + rng.next_double() * 2.0;
    term.cost = CostFunction::power(0.5 + rng.next_double() * 2.0, q);
    for (int k = 0; k < n; ++k)
        term.coeffs.push_back({k, Rational(1 + static_cast<std::int64_t>(rng.next_below(4)))});
    return term;
}

std::vector<double> random_point(RngStream& rng, int n) {
    std::vector<double> y(n);
    for (double& v : y) v = rng.next_double();
    return y;
}

}  // namespace

TEST_CASE("knapsack: nonpositive eta and xi = 0 has no violation") {
    TermData term = quadratic_pair();
    CHECK(!knapsack_separate(term, 0.0, std::vector<double>{-1.0, -1.0}, 1e-9).has_value());
}

TEST_CASE("knapsack: strong eta finds the full set at the max-violation budget") {
    TermData term = quadratic_pair();
    auto s = knapsack_separate(term, 0.0, std::vector<double>{3.0, 3.0}, 1e-9);
    REQUIRE(s.has_value());
    CHECK(*s == std::vector<int>{0, 1});  // budget tie resolved toward B = 2
}

TEST_CASE("knapsack: equality is not a strict violation") {
    TermData term = quadratic_pair();
    CHECK(!knapsack_separate(term, 0.0, std::vector<double>{1.0, 1.0}, 1e-9).has_value());
}

TEST_CASE("knapsack agrees with subset enumeration on random terms") {
    RngStream rng(424242);
    for (int trial = 0; trial < 200; ++trial) {
        TermData term = random_term(rng, 6);
        std::vector<double> eta(term.support_size());
        for (double& e : eta) e = rng.next_double() * 6.0 - 2.0;
        double xi = -rng.next_double() * 2.0;
        auto got = knapsack_separate(term, xi, eta, 1e-9);
        SubsetViolation oracle = most_violated_subset(term, xi, eta);
        if (oracle.violation > 1e-9) {
            REQUIRE(got.has_value());
            double profit = 0.0;
            std::int64_t w = 0;
            for (int k : *got) {
                profit += eta[k];
                w += term.weight_of(k);
            }
            double v = xi + profit - term.cost(term.granularity.to_double() * w);
            CHECK(v == doctest::Approx(oracle.violation).epsilon(1e-9));
        } else {
            CHECK(!got.has_value());
        }
    }
}

TEST_CASE("knapsack: budget count beyond the cap is an instance-too-large error") {
    TermData term;
    term.cost = CostFunction::power(1.0, 2.0);
    term.granularity = Rational(1, 1000);
    term.coeffs = {{0, Rational(900)}, {1, Rational(700)}};  // 1.6e6 budgets
    std::vector<double> eta{1.0, 1.0};
    CHECK_THROWS_AS(knapsack_separate(term, 0.0, eta, 1e-9, 100000), BudgetExceeded);
}

TEST_CASE("solve_relaxation: infeasible polytope surfaces as such") {
    LoadBalancingInstance inst;
    inst.machines = 2;
    inst.jobs = 1;
    inst.processing = {{Rational(1)}, {Rational(2)}};
    inst.exponent = 2.0;
    ProblemInstance prob = build_problem(Instance(inst));
    prob.forced_zero = {0, 1};  // job 0 cannot go anywhere
    CHECK_THROWS_AS(solve_relaxation(prob, 0.01), InfeasiblePolytope);
}

TEST_CASE("evaluate_H worked examples") {
    TermData term = quadratic_pair();
    std::vector<double> ones{1.0, 1.0};
    auto full = evaluate_H(term, ones, 1e-9);
    CHECK(full.value == doctest::Approx(4.0));
    REQUIRE(full.columns.size() == 1);
    CHECK(full.columns[0].first == std::vector<int>{0, 1});
    CHECK(full.columns[0].second == doctest::Approx(1.0));

    std::vector<double> half{0.5, 0.5};
    auto mid = evaluate_H(term, half, 1e-9);
    CHECK(mid.value == doctest::Approx(1.0));

    std::vector<double> zero{0.0, 0.0};
    auto at_zero = evaluate_H(term, zero, 1e-9);
    CHECK(at_zero.value == doctest::Approx(0.0));
    REQUIRE(at_zero.columns.size() == 1);
    CHECK(at_zero.columns[0].first.empty());
}

TEST_CASE("evaluate_H certificate invariants") {
    RngStream rng(777);
    for (int trial = 0; trial < 60; ++trial) {
        TermData term = random_term(rng, 5);
        std::vector<double> y = random_point(rng, static_cast<int>(term.support_size()));
        auto result = evaluate_H(term, y, 1e-9);
        // dual feasibility on every subset, via enumeration
        std::vector<double> eta(term.support_size());
        for (std::size_t k = 0; k < term.support_size(); ++k)
            eta[k] = result.certificate.eta[k].second;
        SubsetViolation worst = most_violated_subset(term, result.certificate.xi, eta);
        double scale = std::max(1.0, term.cost(term.total_coeff().to_double()));
        CHECK(worst.violation <= 2e-9 * scale);
        // certificate value matches H at the evaluation point
        CHECK(result.certificate.value_at(y) == doctest::Approx(result.value).epsilon(1e-8));
        // basis-sized column support and unit weight total
        CHECK(result.columns.size() <= term.support_size() + 2);
        double total = 0.0;
        for (const auto& [vars, weight] : result.columns) {
            CHECK(weight >= 0.0);
            total += weight;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
        // marginals reproduced
        for (std::size_t k = 0; k < term.support_size(); ++k) {
            double marginal = 0.0;
            for (const auto& [vars, weight] : result.columns)
                if (std::find(vars.begin(), vars.end(), term.coeffs[k].first) != vars.end())
                    marginal += weight;
            CHECK(marginal == doctest::Approx(y[term.coeffs[k].first]).epsilon(1e-7));
        }
    }
}

TEST_CASE("evaluate_H matches the explicit all-columns LP") {
    RngStream rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        TermData term = random_term(rng, 6);
        std::vector<double> y = random_point(rng, static_cast<int>(term.support_size()));
        double via_cg = evaluate_H(term, y, 1e-10).value;
        double via_explicit = explicit_term_lp(term, y);
        CHECK(via_cg == doctest::Approx(via_explicit).epsilon(1e-7));
    }
}

TEST_CASE("subgradient is a global minorant, tight at the evaluation point") {
    TermData term = quadratic_pair();
    std::vector<double> half{0.5, 0.5};
    auto at_half = evaluate_H(term, half, 1e-9);
    auto minorant = subgradient(at_half.certificate);
    CHECK(minorant(half) == doctest::Approx(1.0).epsilon(1e-8));
    std::vector<double> ones{1.0, 1.0};
    CHECK(minorant(ones) <= 4.0 + 1e-8);

    RngStream rng(2718);
    for (int trial = 0; trial < 20; ++trial) {
        TermData t = random_term(rng, 4);
        int n = static_cast<int>(t.support_size());
        std::vector<double> y = random_point(rng, n);
        auto cert = evaluate_H(t, y, 1e-10).certificate;
        auto g = subgradient(cert);
        std::vector<double> other = random_point(rng, n);
        double h_other = evaluate_H(t, other, 1e-10).value;
        CHECK(g(other) <= h_other + 1e-7);
    }
}

TEST_CASE("H is convex (random terms, random segment points)") {
    RngStream rng(1618);
    for (int trial = 0; trial < 40; ++trial) {
        TermData term = random_term(rng, 5);
        int n = static_cast<int>(term.support_size());
        std::vector<double> a = random_point(rng, n), b = random_point(rng, n);
        double lambda = rng.next_double();
        std::vector<double> mid(n);
        for (int i = 0; i < n; ++i) mid[i] = lambda * a[i] + (1.0 - lambda) * b[i];
        double h_mid = evaluate_H(term, mid, 1e-10).value;
        double h_a = evaluate_H(term, a, 1e-10).value;
        double h_b = evaluate_H(term, b, 1e-10).value;
        CHECK(h_mid <= lambda * h_a + (1.0 - lambda) * h_b + 1e-7);
    }
}

TEST_CASE("solve_relaxation on the parallel-gap family") {
    ProblemInstance prob = build_problem(Instance(make_parallel_gap(4, 2.0)));
    SolveResult sol = solve_relaxation(prob, 0.01);
    CHECK(sol.lp_value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.lower_bound <= sol.lp_value + 1e-9);
    // naive convex relaxation would pay n^{1-q} = 1/4
    double naive = std::pow(4.0, 1.0 - 2.0);
    CHECK(sol.lp_value > 3.9 * naive);
}

TEST_CASE("solve_relaxation: single job, two machines") {
    LoadBalancingInstance inst;
    inst.machines = 2;
    inst.jobs = 1;
    inst.processing = {{Rational(1)}, {Rational(1)}};
    inst.exponent = 2.0;
    SolveResult sol = solve_relaxation(build_problem(Instance(inst)), 0.01);
    CHECK(sol.lp_value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("solve_relaxation: empty demand set") {
    RoutingInstance inst;
    inst.num_vertices = 3;
    inst.edges = {{0, 1, 1.0, 2.0}, {1, 2, 1.0, 2.0}};
    SolveResult sol = solve_relaxation(build_problem(Instance(inst)), 0.01);
    CHECK(sol.lp_value == doctest::Approx(0.0));
}

TEST_CASE("relaxation soundness: integral points cost exactly the true objective") {
    RngStream rng(90210);
    for (std::uint64_t s = 0; s < 8; ++s) {
        Instance inst(random_loadbalance(1000 + s, 3, 4, 2.0));
        ProblemInstance prob = build_problem(inst);
        for (const auto& vertex : prob.polytope->list_vertices(100000)) {
            double h_total = 0.0;
            for (const TermData& term : prob.terms)
                h_total += evaluate_H(term, vertex, 1e-10).value;
            CHECK(h_total == doctest::Approx(prob.true_cost(vertex)).epsilon(1e-8));
        }
    }
}

TEST_CASE("solve_relaxation within (1+eps) of the explicit exponential LP") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        Instance inst(random_loadbalance(2000 + s, 3, 5, 1.5));
        ProblemInstance prob = build_problem(inst);
        SolveResult sol = solve_relaxation(prob, 0.01);
        double exact = explicit_lp_opt(prob);
        CHECK(sol.lp_value >= exact - 1e-7);
        CHECK(sol.lp_value <= 1.01 * exact + 1e-7);
        CHECK(sol.lower_bound <= exact + 1e-7);
    }
}

TEST_CASE("discretize: direct formula example") {
    // k=1, n=1, d=(10), f=t^2, eps=0.4: P=2, eta=0.05, t=10, delta=0.2
    TermData term;
    term.cost = CostFunction::power(1.0, 2.0);
    term.coeffs = {{0, Rational(10)}};
    ProblemInstance prob;
    prob.num_vars = 1;
    prob.terms = {term};
    auto [rounded, plan] = discretize(prob, Rational(2, 5), 100.0);
    CHECK(plan.eta == Rational(1, 20));
    CHECK(plan.delta[0] == Rational(1, 5));
    CHECK(plan.forced_zero.empty());
    CHECK(rounded.terms[0].coeffs[0].second == Rational(10));  // already a multiple
}

TEST_CASE("discretize: f(d) above the bound forces the variable to zero") {
    TermData term;
    term.cost = CostFunction::power(1.0, 2.0);
    term.coeffs = {{0, Rational(10)}, {1, Rational(1)}};
    ProblemInstance prob;
    prob.num_vars = 2;
    prob.terms = {term};
    auto [rounded, plan] = discretize(prob, Rational(1, 10), 50.0);  // f(10)=100 > 50
    CHECK(plan.forced_zero == std::vector<int>{0});
    CHECK(rounded.forced_zero == std::vector<int>{0});
    CHECK(rounded.terms[0].coeffs.size() == 1);
    CHECK(rounded.terms[0].coeffs[0].first == 1);
}

TEST_CASE("discretize: coefficients rounded down to multiples, invariants hold") {
    RngStream rng(5150);
    for (int trial = 0; trial < 30; ++trial) {
        TermData term = random_term(rng, 5);
        ProblemInstance prob;
        prob.num_vars = static_cast<int>(term.support_size());
        prob.terms = {term};
        double bound = term.cost(term.total_coeff().to_double()) + 1.0;
        auto [rounded, plan] = discretize(prob, Rational(1, 4), bound);
        double ratio_bound = (1.0 * prob.terms.size() * prob.num_vars) /
                             (Rational(1, 4).to_double() * plan.eta.to_double());
        for (std::size_t k = 0; k < rounded.terms[0].coeffs.size(); ++k) {
            const auto& [var, d_new] = rounded.terms[0].coeffs[k];
            CHECK(d_new.is_multiple_of(rounded.terms[0].granularity));
            CHECK(static_cast<double>(d_new.floor_div(rounded.terms[0].granularity)) <=
                  ratio_bound + 1e-9);
            // rounded down, never up
            for (const auto& [var0, d_old] : term.coeffs)
                if (var0 == var) CHECK(!(d_old < d_new));
        }
        rounded.terms[0].validate();
    }
}

TEST_CASE("discretize rejects a nonpositive bound") {
    ProblemInstance prob;
    prob.num_vars = 1;
    TermData term;
    term.cost = CostFunction::power(1.0, 2.0);
    term.coeffs = {{0, Rational(1)}};
    prob.terms = {term};
    CHECK_THROWS_AS(discretize(prob, Rational(1, 10), 0.0), std::invalid_argument);
}

TEST_CASE("estimate_opt_bound spans the f range with powers of two") {
    // range [1, 4]: min f = f(1), sum f = f(1)+f(1)+f(2) for the gap family
    ProblemInstance gap = build_problem(Instance(make_parallel_gap(4, 2.0)));
    std::vector<double> candidates = estimate_opt_bound(gap);
    REQUIRE(!candidates.empty());
    CHECK(candidates.front() == doctest::Approx(1.0));  // min f = 1
    CHECK(candidates.back() == doctest::Approx(4.0));   // sum of f over terms = 4
    for (std::size_t i = 1; i < candidates.size(); ++i)
        CHECK(candidates[i] == doctest::Approx(2.0 * candidates[i - 1]));

    // a [3, 100] value range spans 4, 8, ..., 128
    ProblemInstance two_terms;
    two_terms.num_vars = 2;
    TermData cheap, rich;
    cheap.cost = CostFunction::power(3.0, 1.0);
    cheap.coeffs = {{0, Rational(1)}};
    rich.cost = CostFunction::power(97.0, 1.0);
    rich.coeffs = {{1, Rational(1)}};
    two_terms.terms = {cheap, rich};
    std::vector<double> spread = estimate_opt_bound(two_terms);
    CHECK(spread == std::vector<double>{4, 8, 16, 32, 64, 128});

    ProblemInstance empty;
    empty.num_vars = 1;
    CHECK(estimate_opt_bound(empty) == std::vector<double>{0.0});
}

TEST_CASE("weak duality along the column generation loop") {
    // certificate value never exceeds the primal column cost
    RngStream rng(8080);
    for (int trial = 0; trial < 30; ++trial) {
        TermData term = random_term(rng, 5);
        std::vector<double> y = random_point(rng, static_cast<int>(term.support_size()));
        auto result = evaluate_H(term, y, 1e-9);
        double primal = 0.0;
        double delta = term.granularity.to_double();
        for (const auto& [vars, weight] : result.columns) {
            double load = 0.0;
            for (int v : vars)
                for (const auto& [var, d] : term.coeffs)
                    if (var == v) load += d.to_double();
            primal += weight * term.cost(load);
        }
        (void)delta;
        CHECK(result.certificate.value_at(y) <= primal + 1e-7);
    }
}
