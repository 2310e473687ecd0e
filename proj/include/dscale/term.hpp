#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "dscale/cost_function.hpp"
#include "dscale/instances.hpp"
#include "dscale/polytope.hpp"
#include "dscale/rational.hpp"

namespace dscale {

/// One cost term f_j(sum_i d_ij y_i). Coefficients are exact multiples of the
/// granularity delta_j; the knapsack pricing DP indexes budgets by d_ij/delta_j.
struct TermData {
    int id = 0;
    CostFunction cost = CostFunction(PowerCost(1.0, 1.0));
    Rational granularity{1};                          // delta_j > 0
    std::vector<std::pair<int, Rational>> coeffs;     // (variable, d_ij), support D_j only
    std::optional<double> smoothness_override;        // P for tabulated costs

    std::size_t support_size() const { return coeffs.size(); }

    /// d_ij / delta_j for the k-th support entry.
    std::int64_t weight_of(std::size_t k) const { return coeffs[k].second.floor_div(granularity); }

    Rational total_coeff() const {
        Rational t{0};
        for (const auto& [var, d] : coeffs) t = t + d;
        return t;
    }

    /// Checks the exact-multiple and polynomial-ratio invariants.
    void validate(std::int64_t max_weight_ratio = 2000000) const;
};

/// The boolean convex program: polytope handle + cost terms (+ variables
/// pinned to zero by discretization).
struct ProblemInstance {
    int num_vars = 0;
    PolytopePtr polytope;
    std::vector<TermData> terms;
    std::vector<int> forced_zero;

    /// Exact cost of an integral (or fractional) point under the true convex
    /// objective sum_j f_j(sum_i d_ij y_i).
    double true_cost(std::span<const double> y) const;
};

/// Translate an application instance into polytope + terms:
/// routing -> one term per edge, load balancing -> one per machine,
/// tree -> one per vertex, scheduling -> one linear term per (i,j,t) triple.
ProblemInstance build_problem(const Instance& instance);

/// max_j A(f_j): the rounding guarantee constant for this instance.
double max_amplification(const ProblemInstance& prob, double tol);

}  // namespace dscale
