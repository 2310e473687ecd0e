#include "dscale/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dscale/errors.hpp"
#include "dscale/lp.hpp"

namespace dscale {

BruteForceResult brute_force_opt(const ProblemInstance& prob, const ExhaustiveBudget& budget) {
    if (!prob.polytope) throw std::invalid_argument("brute_force_opt: missing polytope");
    std::vector<std::vector<double>> vertices = prob.polytope->list_vertices(budget.max_enumeration);
    BruteForceResult best;
    best.value = std::numeric_limits<double>::infinity();
    for (const auto& v : vertices) {
        bool ok = true;
        for (int i : prob.forced_zero)
            if (v[i] > 0.5) {
                ok = false;
                break;
            }
        if (!ok) continue;
        double cost = prob.true_cost(v);
        if (cost < best.value) {
            best.value = cost;
            best.solution = v;
        }
    }
    if (!std::isfinite(best.value))
        throw InfeasiblePolytope("brute_force_opt: no feasible integral vertex");
    return best;
}

namespace {

// Columns of one term: every subset of its support, as (cost, member positions).
struct TermColumns {
    std::vector<double> cost;
    std::vector<std::vector<int>> members;
};

TermColumns enumerate_columns(const TermData& term, const ExhaustiveBudget& budget) {
    std::size_t n = term.support_size();
    if (n > 24 || (std::size_t{1} << n) > budget.max_enumeration)
        throw BudgetExceeded("explicit LP: 2^|D_j| columns exceed the budget");
    TermColumns cols;
    double delta = term.granularity.to_double();
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
        std::int64_t w = 0;
        std::vector<int> members;
        for (std::size_t k = 0; k < n; ++k)
            if (mask & (std::size_t{1} << k)) {
                w += term.weight_of(k);
                members.push_back(static_cast<int>(k));
            }
        cols.cost.push_back(term.cost(delta * static_cast<double>(w)));
        cols.members.push_back(std::move(members));
    }
    return cols;
}

}  // namespace

double explicit_term_lp(const TermData& term, std::span<const double> y,
                        const ExhaustiveBudget& budget) {
    TermColumns cols = enumerate_columns(term, budget);
    lp::Problem problem;
    for (double c : cols.cost) problem.add_var(c);
    lp::Row convexity;
    for (std::size_t c = 0; c < cols.cost.size(); ++c)
        convexity.terms.push_back({static_cast<int>(c), 1.0});
    convexity.sense = lp::Sense::EQ;
    convexity.rhs = 1.0;
    problem.add_row(convexity);
    for (std::size_t k = 0; k < term.support_size(); ++k) {
        lp::Row marginal;
        for (std::size_t c = 0; c < cols.members.size(); ++c)
            if (std::binary_search(cols.members[c].begin(), cols.members[c].end(),
                                   static_cast<int>(k)))
                marginal.terms.push_back({static_cast<int>(c), 1.0});
        marginal.sense = lp::Sense::EQ;
        marginal.rhs = std::clamp(y[term.coeffs[k].first], 0.0, 1.0);
        problem.add_row(std::move(marginal));
    }
    lp::Solution sol = lp::solve(problem);
    if (sol.status != lp::Status::Optimal)
        throw InternalInvariantFailure("explicit_term_lp: solve failed");
    return sol.value;
}

double explicit_lp_opt(const ProblemInstance& prob, const ExhaustiveBudget& budget) {
    if (!prob.polytope) throw std::invalid_argument("explicit_lp_opt: missing polytope");
    // Variables: y (polytope coords), then all z_{jS} blocks.
    lp::Problem problem;
    for (int i = 0; i < prob.num_vars; ++i) problem.add_var(0.0);

    for (const TermData& term : prob.terms) {
        TermColumns cols = enumerate_columns(term, budget);
        int base = problem.num_vars();
        for (double c : cols.cost) problem.add_var(c);
        lp::Row convexity;
        for (std::size_t c = 0; c < cols.cost.size(); ++c)
            convexity.terms.push_back({base + static_cast<int>(c), 1.0});
        convexity.sense = lp::Sense::EQ;
        convexity.rhs = 1.0;
        problem.add_row(std::move(convexity));
        for (std::size_t k = 0; k < term.support_size(); ++k) {
            lp::Row marginal;  // sum_{S:k in S} z_S - y_i = 0
            for (std::size_t c = 0; c < cols.members.size(); ++c)
                if (std::binary_search(cols.members[c].begin(), cols.members[c].end(),
                                       static_cast<int>(k)))
                    marginal.terms.push_back({base + static_cast<int>(c), 1.0});
            marginal.terms.push_back({term.coeffs[k].first, -1.0});
            marginal.sense = lp::Sense::EQ;
            marginal.rhs = 0.0;
            problem.add_row(std::move(marginal));
        }
    }
    for (const LinearRow& row : prob.polytope->initial_rows())
        problem.add_row({row.terms, row.sense, row.rhs});
    for (int i : prob.forced_zero) problem.add_row({{{i, 1.0}}, lp::Sense::LE, 0.0});

    // Lazy polytope rows (matroid rank family) until the y block is inside.
    for (int round = 0; round < 4096; ++round) {
        lp::Solution sol = lp::solve(problem);
        if (sol.status == lp::Status::Infeasible)
            throw InfeasiblePolytope("explicit_lp_opt: infeasible");
        if (sol.status != lp::Status::Optimal)
            throw InternalInvariantFailure("explicit_lp_opt: solve failed");
        std::vector<double> y(sol.x.begin(), sol.x.begin() + prob.num_vars);
        SeparationResult sep = prob.polytope->separate(y, 1e-9);
        if (sep.inside) return sol.value;
        problem.add_row({sep.row.terms, sep.row.sense, sep.row.rhs});
    }
    throw ConvergenceFailure("explicit_lp_opt: separation did not converge", 0.0, 0.0);
}

}  // namespace dscale
