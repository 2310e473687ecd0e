#include "dscale/cxlab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "dscale/errors.hpp"
#include "dscale/moments.hpp"
#include "dscale/rng.hpp"

namespace dscale {

namespace {

constexpr double kMergeTol = 1e-12;

double power_of(double base, double q) { return base <= 0.0 ? 0.0 : std::pow(base, q); }

}  // namespace

//==========================================================================
// DiscreteDistribution
//==========================================================================

DiscreteDistribution DiscreteDistribution::from_atoms(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("distribution needs at least one atom");
    for (const Atom& a : atoms) {
        if (a.value < 0.0) throw std::invalid_argument("distribution values must be nonnegative");
        if (!(a.prob >= 0.0)) throw std::invalid_argument("distribution probabilities must be >= 0");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
    DiscreteDistribution d;
    for (const Atom& a : atoms) {
        if (a.prob <= 0.0) continue;
        if (!d.atoms_.empty() &&
            a.value - d.atoms_.back().value <= kMergeTol * std::max(1.0, a.value))
            d.atoms_.back().prob += a.prob;
        else
            d.atoms_.push_back(a);
    }
    if (d.atoms_.empty()) throw std::invalid_argument("distribution has no positive-probability atom");
    double total = 0.0;
    for (const Atom& a : d.atoms_) total += a.prob;
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("distribution probabilities must sum to 1");
    for (Atom& a : d.atoms_) a.prob /= total;  // shed the sub-1e-9 drift
    d.build_suffix_sums();
    return d;
}

DiscreteDistribution DiscreteDistribution::point_mass(double value) {
    return from_atoms({{value, 1.0}});
}

DiscreteDistribution DiscreteDistribution::bernoulli(double p, double value) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("bernoulli parameter outside [0,1]");
    if (p <= 0.0) return point_mass(0.0);
    if (p >= 1.0) return point_mass(value);
    return from_atoms({{0.0, 1.0 - p}, {value, p}});
}

void DiscreteDistribution::build_suffix_sums() {
    std::size_t n = atoms_.size();
    suffix_prob_.assign(n + 1, 0.0);
    suffix_value_mass_.assign(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        suffix_prob_[i] = suffix_prob_[i + 1] + atoms_[i].prob;
        suffix_value_mass_[i] = suffix_value_mass_[i + 1] + atoms_[i].prob * atoms_[i].value;
    }
}

double DiscreteDistribution::mean() const { return suffix_value_mass_[0]; }

double DiscreteDistribution::moment(double q) const {
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.prob * power_of(a.value, q);
    return m;
}

double DiscreteDistribution::norm(double q) const { return std::pow(moment(q), 1.0 / q); }

double DiscreteDistribution::stop_loss(double t) const {
    // first atom with value > t
    std::size_t lo =
        std::upper_bound(atoms_.begin(), atoms_.end(), t,
                         [](double v, const Atom& a) { return v < a.value; }) -
        atoms_.begin();
    return suffix_value_mass_[lo] - t * suffix_prob_[lo];
}

//==========================================================================
// JointDistribution
//==========================================================================

void JointDistribution::validate() const {
    if (dim <= 0) throw std::invalid_argument("joint distribution needs dim >= 1");
    double total = 0.0;
    for (const Atom& a : atoms) {
        if (static_cast<int>(a.values.size()) != dim)
            throw std::invalid_argument("joint atom dimension mismatch");
        for (double v : a.values)
            if (v < 0.0) throw std::invalid_argument("joint values must be nonnegative");
        if (!(a.prob > 0.0)) throw std::invalid_argument("joint probabilities must be positive");
        total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("joint probabilities must sum to 1");
}

DiscreteDistribution JointDistribution::marginal(int coordinate) const {
    std::vector<DiscreteDistribution::Atom> atoms_out;
    for (const Atom& a : atoms) atoms_out.push_back({a.values[coordinate], a.prob});
    return DiscreteDistribution::from_atoms(std::move(atoms_out));
}

//==========================================================================
// Test functions and basic operations
//==========================================================================

double TestConvexFunction::operator()(double x) const {
    if (const auto* p = std::get_if<Power>(&impl_)) return power_of(x, p->q);
    if (const auto* s = std::get_if<StopLoss>(&impl_)) return std::max(0.0, x - s->threshold);
    return std::get<TabulatedConvex>(impl_)(x);
}

double TestConvexFunction::growth_exponent() const {
    if (const auto* p = std::get_if<Power>(&impl_)) return p->q;
    return 1.0;
}

DiscreteDistribution independent_sum(std::span<const DiscreteDistribution> dists,
                                     std::size_t support_cap) {
    if (dists.empty()) return DiscreteDistribution::point_mass(0.0);
    std::vector<DiscreteDistribution::Atom> acc{{0.0, 1.0}};
    for (const DiscreteDistribution& d : dists) {
        if (acc.size() * d.support_size() > support_cap)
            throw BudgetExceeded("independent_sum: support product exceeds cap");
        std::vector<DiscreteDistribution::Atom> next;
        next.reserve(acc.size() * d.support_size());
        for (const auto& a : acc)
            for (const auto& b : d.atoms()) next.push_back({a.value + b.value, a.prob * b.prob});
        // merge through the constructor invariants
        acc = DiscreteDistribution::from_atoms(std::move(next)).atoms();
    }
    return DiscreteDistribution::from_atoms(std::move(acc));
}

DiscreteDistribution sum_of_joint(const JointDistribution& joint) {
    joint.validate();
    std::vector<DiscreteDistribution::Atom> atoms;
    for (const auto& a : joint.atoms) {
        double s = 0.0;
        for (double v : a.values) s += v;
        atoms.push_back({s, a.prob});
    }
    return DiscreteDistribution::from_atoms(std::move(atoms));
}

double poisson_scale_expectation(const DiscreteDistribution& s, const TestConvexFunction& phi,
                                 double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("poisson_scale_expectation: tol must be positive");
    double growth = phi.growth_exponent();
    double scale = 1.0;
    for (const auto& a : s.atoms()) scale = std::max(scale, power_of(std::max(a.value, 1.0), growth));
    PoissonTruncation trunc = truncate_for_growth(growth, tol / (2.0 * scale));
    double total = 0.0;
    for (const auto& a : s.atoms()) {
        double inner = phi(0.0) * poisson_pmf(0);
        for (int t = 1; t <= trunc.max_support; ++t) inner += phi(a.value * t) * poisson_pmf(t);
        total += a.prob * inner;
    }
    return total;
}

ScaledPoisson poisson_times(const DiscreteDistribution& s, double tail_bound) {
    // Truncate P at T and move the tail probability to value 0. Every
    // stop-loss value then drops by at most
    //   sum_s p_s s sum_{t>T} t pmf(t) <= mean(S) * tail(T),
    // which is the slack the convex-order tests must absorb.
    PoissonTruncation trunc = truncate_for_growth(1.0, tail_bound / std::max(1.0, s.mean()));
    std::vector<DiscreteDistribution::Atom> atoms;
    double kept = 0.0;
    for (int t = 0; t <= trunc.max_support; ++t) kept += poisson_pmf(t);
    atoms.push_back({0.0, 1.0 - kept});
    for (const auto& a : s.atoms())
        for (int t = 0; t <= trunc.max_support; ++t)
            atoms.push_back({a.value * t, a.prob * poisson_pmf(t)});
    return ScaledPoisson{DiscreteDistribution::from_atoms(std::move(atoms)),
                         s.mean() * trunc.tail_mass_bound};
}

CxResult cx_dominates(const DiscreteDistribution& x, const DiscreteDistribution& y, double tol) {
    CxResult result;
    result.mean_gap = std::abs(x.mean() - y.mean());
    result.worst_slack = tol - result.mean_gap;
    result.witness = -1.0;  // mean check marker
    if (result.mean_gap > tol) result.holds = false;

    std::set<double> thresholds;
    for (const auto& a : x.atoms()) thresholds.insert(a.value);
    for (const auto& a : y.atoms()) thresholds.insert(a.value);
    for (double t : thresholds) {
        double slack = y.stop_loss(t) + tol - x.stop_loss(t);
        if (slack < result.worst_slack) {
            result.worst_slack = slack;
            result.witness = t;
        }
        if (slack < 0.0) result.holds = false;
    }
    return result;
}

DecouplingReport decoupling_check(const JointDistribution& joint, double q, double tol) {
    joint.validate();
    if (!(q >= 1.0)) throw std::domain_error("decoupling_check: q must be >= 1");
    DecouplingReport report;

    std::vector<DiscreteDistribution> marginals;
    for (int i = 0; i < joint.dim; ++i) marginals.push_back(joint.marginal(i));
    DiscreteDistribution sum_x = independent_sum(marginals);
    DiscreteDistribution sum_y = sum_of_joint(joint);

    double a_q = fractional_bell(q, 1e-12);
    report.aq_root = std::pow(a_q, 1.0 / q);
    report.lhs_norm = sum_x.norm(q);
    report.rhs_norm = sum_y.norm(q);
    report.norm_holds = report.lhs_norm <= report.aq_root * report.rhs_norm + tol;

    ScaledPoisson py = poisson_times(sum_y, std::min(tol, 1e-10));
    report.cx = cx_dominates(sum_x, py.dist, tol + py.tail_mean_bound);
    report.holds = report.norm_holds && report.cx.holds;
    return report;
}

TightnessConstruction tightness_construction(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("tightness_construction: n must be >= 1");
    TightnessConstruction out;
    out.sum_y = DiscreteDistribution::point_mass(1.0);
    out.second_moment_closed_form = 1.0 + static_cast<double>(n - 1) / static_cast<double>(n);
    if (n == 1) {
        out.sum_x = DiscreteDistribution::point_mass(1.0);
        return out;
    }
    // Binomial(n, 1/n) in log space; pmf(k) = C(n,k) (1/n)^k (1-1/n)^(n-k).
    std::vector<DiscreteDistribution::Atom> atoms;
    double logp = -std::log(static_cast<double>(n));
    double log1m = std::log1p(-1.0 / static_cast<double>(n));
    for (std::int64_t k = 0; k <= n; ++k) {
        double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                    k * logp + (n - k) * log1m;
        double p = std::exp(lg);
        if (p > 0.0) atoms.push_back({static_cast<double>(k), p});
    }
    out.sum_x = DiscreteDistribution::from_atoms(std::move(atoms));
    return out;
}

bool bernoulli_vs_poisson_check(double p, const TestConvexFunction& phi, double tol) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli_vs_poisson_check: p in (0,1]");
    double lhs = (1.0 - p) * phi(0.0) + p * phi(1.0);
    double growth = phi.growth_exponent();
    PoissonTruncation trunc = truncate_for_growth(growth, tol / 2.0);
    double rhs = 0.0;
    for (int t = 0; t <= trunc.max_support; ++t) rhs += phi(static_cast<double>(t)) * poisson_pmf(t, p);
    return lhs <= rhs + tol;
}

NaReport na_decoupling_experiment(NaFamily family, int slots, int draws,
                                  std::span<const double> weights, double q, double tol) {
    if (slots < 1) throw std::invalid_argument("na experiment: slots must be >= 1");
    std::vector<double> w(weights.begin(), weights.end());
    if (w.empty()) w.assign(slots, 1.0);
    if (static_cast<int>(w.size()) != slots)
        throw std::invalid_argument("na experiment: weight count mismatch");

    JointDistribution joint;
    joint.dim = slots;
    if (family == NaFamily::OneHotCategorical) {
        for (int j = 0; j < slots; ++j) {
            JointDistribution::Atom atom;
            atom.values.assign(slots, 0.0);
            atom.values[j] = w[j];
            atom.prob = 1.0 / slots;
            joint.atoms.push_back(std::move(atom));
        }
    } else {
        if (draws < 0 || draws > slots)
            throw std::invalid_argument("na experiment: draws must lie in [0, slots]");
        // uniform k-subsets of [slots]
        std::vector<int> combo(draws);
        for (int i = 0; i < draws; ++i) combo[i] = i;
        double count = 1.0;
        for (int i = 0; i < draws; ++i) count = count * (slots - i) / (i + 1);
        while (true) {
            JointDistribution::Atom atom;
            atom.values.assign(slots, 0.0);
            for (int e : combo) atom.values[e] = w[e];
            atom.prob = 1.0 / count;
            joint.atoms.push_back(std::move(atom));
            int k = draws - 1;
            while (k >= 0 && combo[k] == slots - draws + k) --k;
            if (k < 0) break;
            ++combo[k];
            for (int j = k + 1; j < draws; ++j) combo[j] = combo[j - 1] + 1;
        }
        if (draws == 0) {
            joint.atoms.clear();
            JointDistribution::Atom atom;
            atom.values.assign(slots, 0.0);
            atom.prob = 1.0;
            joint.atoms.push_back(std::move(atom));
        }
    }
    NaReport report;
    report.support_atoms = static_cast<int>(joint.atoms.size());
    report.decoupling = decoupling_check(joint, q, tol);
    return report;
}

//==========================================================================
// Random corpus
//==========================================================================

JointDistribution random_joint(std::uint64_t seed, int max_dim, int max_atoms) {
    RngStream rng(seed);
    JointDistribution joint;
    joint.dim = 1 + static_cast<int>(rng.next_below(max_dim));
    int atoms = 1 + static_cast<int>(rng.next_below(max_atoms));
    std::vector<double> probs(atoms);
    double total = 0.0;
    for (double& p : probs) {
        p = 1.0 + static_cast<double>(rng.next_below(16));
        total += p;
    }
    for (int a = 0; a < atoms; ++a) {
        JointDistribution::Atom atom;
        atom.prob = probs[a] / total;
        for (int i = 0; i < joint.dim; ++i) {
            // small-denominator rationals in [0, 12]
            std::int64_t num = static_cast<std::int64_t>(rng.next_below(13));
            std::int64_t den = 1 + static_cast<std::int64_t>(rng.next_below(4));
            atom.values.push_back(static_cast<double>(num) / static_cast<double>(den));
        }
        joint.atoms.push_back(std::move(atom));
    }
    return joint;
}

CorpusReport run_decoupling_corpus(const CorpusConfig& config, ExecPolicy policy) {
    CorpusReport report;
    report.items = config.size;
    report.seed = config.seed;
    report.worst_norm_slack = std::numeric_limits<double>::infinity();
    report.worst_cx_slack = std::numeric_limits<double>::infinity();

    std::vector<double> norm_slack(config.size, std::numeric_limits<double>::infinity());
    std::vector<double> cx_slack(config.size, std::numeric_limits<double>::infinity());
    std::vector<double> cx_witness(config.size, 0.0);
    std::vector<char> norm_bad(config.size, 0), cx_bad(config.size, 0);
    std::exception_ptr error;

    parallel_for(static_cast<std::size_t>(config.size), policy, [&](std::size_t item) {
        try {
            JointDistribution joint =
                random_joint(config.seed + 1000003ULL * item, config.max_dim, config.max_atoms);
            for (double q : config.q_values) {
                DecouplingReport rep = decoupling_check(joint, q, config.tol);
                double ns = rep.aq_root * rep.rhs_norm + config.tol - rep.lhs_norm;
                norm_slack[item] = std::min(norm_slack[item], ns);
                if (rep.cx.worst_slack < cx_slack[item]) {
                    cx_slack[item] = rep.cx.worst_slack;
                    cx_witness[item] = rep.cx.witness;
                }
                if (!rep.norm_holds) norm_bad[item] = 1;
                if (!rep.cx.holds) cx_bad[item] = 1;
            }
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);

    for (int i = 0; i < config.size; ++i) {
        report.norm_violations += norm_bad[i];
        report.cx_violations += cx_bad[i];
        report.worst_norm_slack = std::min(report.worst_norm_slack, norm_slack[i]);
        if (cx_slack[i] < report.worst_cx_slack) {
            report.worst_cx_slack = cx_slack[i];
            report.worst_cx_witness = cx_witness[i];
            report.worst_cx_item = i;
        }
    }
    return report;
}

}  // namespace dscale
