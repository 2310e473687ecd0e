#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dscale/cost_function.hpp"
#include "dscale/parallel.hpp"

namespace dscale {

/// Finite nonnegative-support distribution. Atoms are kept sorted by value,
/// values distinct (merged within 1e-12), probabilities positive and summing
/// to 1 within 1e-12.
class DiscreteDistribution {
public:
    struct Atom {
        double value = 0.0;
        double prob = 0.0;
    };

    static DiscreteDistribution from_atoms(std::vector<Atom> atoms);
    static DiscreteDistribution point_mass(double value);
    static DiscreteDistribution bernoulli(double p, double value = 1.0);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t support_size() const { return atoms_.size(); }

    double mean() const;
    double moment(double q) const;  // E[X^q]
    double norm(double q) const;    // E[X^q]^(1/q)
    double stop_loss(double t) const;  // E[(X - t)_+], O(log) via suffix sums
    double max_value() const { return atoms_.empty() ? 0.0 : atoms_.back().value; }

private:
    std::vector<Atom> atoms_;
    std::vector<double> suffix_prob_;       // sum of probs from index i
    std::vector<double> suffix_value_mass_; // sum of value*prob from index i
    void build_suffix_sums();
};

/// Finite joint distribution of an n-vector with nonnegative coordinates.
struct JointDistribution {
    int dim = 0;
    struct Atom {
        std::vector<double> values;
        double prob = 0.0;
    };
    std::vector<Atom> atoms;

    void validate() const;
    DiscreteDistribution marginal(int coordinate) const;
};

/// Convex test function for the stochastic-order checks.
class TestConvexFunction {
public:
    struct Power {
        double q = 2.0;
    };
    struct StopLoss {
        double threshold = 0.0;
    };

    TestConvexFunction(Power p) : impl_(p) {}
    TestConvexFunction(StopLoss s) : impl_(s) {}
    TestConvexFunction(TabulatedConvex t) : impl_(std::move(t)) {}

    double operator()(double x) const;
    /// Growth exponent for truncation bounds: q for powers, 1 otherwise.
    double growth_exponent() const;

private:
    std::variant<Power, StopLoss, TabulatedConvex> impl_;
};

/// Exact convolution of independent distributions; throws past the support cap.
DiscreteDistribution independent_sum(std::span<const DiscreteDistribution> dists,
                                     std::size_t support_cap = 1000000);

/// Pushforward of the joint under the coordinate sum.
DiscreteDistribution sum_of_joint(const JointDistribution& joint);

/// E[phi(P * S)] for Poisson(1) P independent of S, within +-tol.
double poisson_scale_expectation(const DiscreteDistribution& s, const TestConvexFunction& phi,
                                 double tol);

/// Distribution of P * S truncated at Poisson support T, plus a bound on the
/// mean mass lost to truncation (feeds the stop-loss tolerance accounting).
struct ScaledPoisson {
    DiscreteDistribution dist;
    double tail_mean_bound = 0.0;
};
ScaledPoisson poisson_times(const DiscreteDistribution& s, double tail_bound);

/// Convex-order test on finite supports: equal means plus stop-loss dominance
/// at every support point of X and Y.
struct CxResult {
    bool holds = true;
    double worst_slack = 0.0;   // most negative margin seen (>= -tol when holds)
    double witness = 0.0;       // threshold attaining the worst slack
    double mean_gap = 0.0;      // |E X - E Y|
};
CxResult cx_dominates(const DiscreteDistribution& x, const DiscreteDistribution& y, double tol);

/// Full decoupling check for one joint distribution: independent copies of the
/// marginals versus the joint, in the q-norm and in the convex order against
/// P * (sum Y).
struct DecouplingReport {
    double lhs_norm = 0.0;       // || sum X ||_q
    double rhs_norm = 0.0;       // || sum Y ||_q
    double aq_root = 1.0;        // A_q^(1/q)
    bool norm_holds = true;      // lhs <= aq_root * rhs + tol
    CxResult cx;                 // sum X vs P * sum Y (truncation-adjusted tol)
    bool holds = true;
};
DecouplingReport decoupling_check(const JointDistribution& joint, double q, double tol);

/// Worst-case family: one-hot uniform coordinates (sum Y == 1) against
/// independent Bernoulli(1/n) copies; sum X is Binomial(n, 1/n) -> Poisson.
struct TightnessConstruction {
    DiscreteDistribution sum_x;  // exact binomial
    DiscreteDistribution sum_y;  // point mass at 1
    double second_moment_closed_form = 0.0;  // 1 + (n-1)/n
};
TightnessConstruction tightness_construction(std::int64_t n);

/// E[phi(B)] <= E[phi(Poisson(p))] for Bernoulli B with the same mean.
bool bernoulli_vs_poisson_check(double p, const TestConvexFunction& phi, double tol);

/// Negative-association families built by construction.
enum class NaFamily { OneHotCategorical, SamplingWithoutReplacement };
struct NaReport {
    DecouplingReport decoupling;
    int support_atoms = 0;
};
NaReport na_decoupling_experiment(NaFamily family, int slots, int draws,
                                  std::span<const double> weights, double q, double tol);

/// Seeded random corpus of joint distributions checked in parallel.
struct CorpusConfig {
    int size = 1000;
    int max_dim = 4;
    int max_atoms = 8;
    std::vector<double> q_values{1.0, 1.5, 2.0, 3.0};
    std::uint64_t seed = 1;
    double tol = 1e-9;
};
struct CorpusReport {
    int items = 0;
    int norm_violations = 0;
    int cx_violations = 0;
    double worst_norm_slack = 0.0;  // min over items of (aq_root*rhs + tol - lhs)
    double worst_cx_slack = 0.0;
    double worst_cx_witness = 0.0;  // stop-loss threshold attaining the worst slack
    int worst_cx_item = -1;
    std::uint64_t seed = 0;
};
JointDistribution random_joint(std::uint64_t seed, int max_dim, int max_atoms);
CorpusReport run_decoupling_corpus(const CorpusConfig& config,
                                   ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace dscale
