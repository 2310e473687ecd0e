#pragma once

#include <cstddef>
#include <vector>

#include "dscale/term.hpp"

namespace dscale {

/// Enumeration budget; exceeding it aborts with BudgetExceeded, never a wrong
/// answer.
struct ExhaustiveBudget {
    std::size_t max_enumeration = 10000000;
};

struct BruteForceResult {
    std::vector<double> solution;  // integral vertex
    double value = 0.0;
};

/// Ground-truth integral optimum: exhaustive scan of the polytope's integral
/// vertices under the true convex objective (forced-zero variables respected).
BruteForceResult brute_force_opt(const ProblemInstance& prob, const ExhaustiveBudget& budget = {});

/// Exact relaxation optimum with every column 2^{D_j} present, solved as one
/// explicit LP (plus lazily separated polytope rows). Validates the column
/// generation path.
double explicit_lp_opt(const ProblemInstance& prob, const ExhaustiveBudget& budget = {});

/// The same exponential LP restricted to a single term at a fixed point y:
/// ground truth for evaluate_H.
double explicit_term_lp(const TermData& term, std::span<const double> y,
                        const ExhaustiveBudget& budget = {});

}  // namespace dscale
