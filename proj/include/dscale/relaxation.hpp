#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dscale/parallel.hpp"
#include "dscale/term.hpp"

namespace dscale {

/// Feasible point (xi, eta) of the pricing dual: xi + sum_{i in S} eta_i <=
/// f_j(sum_{i in S} d_ij) for every S, within tolerance. Its objective value
/// xi + sum_i eta_i y_i equals H_j(y) at the evaluation point and minorizes
/// H_j everywhere (the constraints do not involve y).
struct DualCertificate {
    double xi = 0.0;
    std::vector<std::pair<int, double>> eta;  // (variable, eta_i) over the support

    double value_at(std::span<const double> y) const {
        double v = xi;
        for (const auto& [var, e] : eta) v += e * y[var];
        return v;
    }
};

/// Affine global minorant of H_j, exact at the evaluation point.
struct AffineMinorant {
    double constant = 0.0;
    std::vector<std::pair<int, double>> coeffs;

    double operator()(std::span<const double> y) const {
        double v = constant;
        for (const auto& [var, c] : coeffs) v += c * y[var];
        return v;
    }
};

AffineMinorant subgradient(const DualCertificate& cert);

/// Output of one H_j evaluation: value, dual certificate, and the primal
/// column decomposition z (at most |D_j| + 2 columns at a basic optimum).
struct EvaluatedTerm {
    int term_id = 0;
    double value = 0.0;
    DualCertificate certificate;
    std::vector<std::pair<std::vector<int>, double>> columns;  // (sorted variable set, weight)
    int generated_columns = 0;
};

struct RelaxationConfig {
    double tol = 1e-9;                 // relative target for H values
    int column_cap_factor = 50;        // column generation cap: 50 * |D_j|
    int master_cut_cap = 10000;        // cutting-plane master cap
    std::int64_t budget_cap = 2000000; // knapsack budget count bound
};

/// Most violated dual constraint for (xi, eta), or nullopt when all of them
/// hold within tol. Exhaustive DP over budgets B in {0, delta, ..., sum d};
/// ties broken toward the lexicographically smallest item set. Returns
/// positions into term.coeffs.
std::optional<std::vector<int>> knapsack_separate(const TermData& term, double xi,
                                                  std::span<const double> eta, double tol,
                                                  std::int64_t budget_cap = 2000000);

/// H_j(y) by column generation with knapsack pricing.
EvaluatedTerm evaluate_H(const TermData& term, std::span<const double> y, double tol,
                         const RelaxationConfig& config = {});

/// All terms at once; the per-term evaluations are independent (OpenMP path).
std::vector<EvaluatedTerm> evaluate_all_terms(const ProblemInstance& prob,
                                              std::span<const double> y, double tol,
                                              const RelaxationConfig& config = {},
                                              ExecPolicy policy = ExecPolicy::Parallel);

struct SolveResult {
    std::vector<double> y;
    double lp_value = 0.0;     // sum_j H_j(y), the certified upper bound
    double lower_bound = 0.0;  // cutting-plane master bound
    std::vector<EvaluatedTerm> terms;
    int master_iterations = 0;
    double wall_seconds = 0.0;
};

/// Kelley cutting planes on per-term epigraph variables over the polytope
/// (explicit rows plus lazily separated ones). Terminates when the gap drops
/// below eps * lower_bound.
SolveResult solve_relaxation(const ProblemInstance& prob, double eps,
                             const RelaxationConfig& config = {},
                             ExecPolicy policy = ExecPolicy::Parallel);

/// Coefficient rounding plan: variables pinned to zero, per-term granularity
/// and rounded coefficients.
struct DiscretizationPlan {
    std::vector<int> forced_zero;                  // the set I
    Rational eta;                                  // min(eps/(4P), 1/2)
    double smoothness_bound = 0.0;                 // P
    std::vector<Rational> delta;                   // per term
    std::vector<Rational> t_max;                   // per term: max surviving d_ij
};

/// Rounds every d_ij down to a multiple of delta_j = eps * eta * t_j / (k n),
/// pins f_j(d_ij) > opt_bound variables to zero. Requires a smoothness bound
/// for every cost (q for powers, smoothness_override otherwise).
std::pair<ProblemInstance, DiscretizationPlan> discretize(const ProblemInstance& prob,
                                                          const Rational& eps, double opt_bound);

/// Powers of two spanning [min_ij f_j(d_ij), sum_j f_j(sum_i d_ij)],
/// smallest first; single candidate 0 for an all-zero instance.
std::vector<double> estimate_opt_bound(const ProblemInstance& prob);

}  // namespace dscale
