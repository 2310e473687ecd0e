#include "dscale/relaxation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>

#include "dscale/errors.hpp"
#include "dscale/lp.hpp"

namespace dscale {

AffineMinorant subgradient(const DualCertificate& cert) {
    return AffineMinorant{cert.xi, cert.eta};
}

std::optional<std::vector<int>> knapsack_separate(const TermData& term, double xi,
                                                  std::span<const double> eta, double tol,
                                                  std::int64_t budget_cap) {
    const std::size_t n = term.support_size();
    std::vector<std::int64_t> w(n);
    std::int64_t w_total = 0;
    for (std::size_t k = 0; k < n; ++k) {
        w[k] = term.weight_of(k);
        w_total += w[k];
    }
    if (w_total + 1 > budget_cap)
        throw BudgetExceeded("knapsack_separate: budget count " + std::to_string(w_total + 1) +
                             " exceeds cap (discretize first)");

    const double neg_inf = -std::numeric_limits<double>::infinity();
    const std::size_t W = static_cast<std::size_t>(w_total);
    // dp[k][B] = max profit over subsets of items k..n-1 with exact weight B.
    std::vector<std::vector<double>> dp(n + 1, std::vector<double>(W + 1, neg_inf));
    dp[n][0] = 0.0;
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t B = 0; B <= W; ++B) {
            double best = dp[k + 1][B];
            if (B >= static_cast<std::size_t>(w[k]) && dp[k + 1][B - w[k]] != neg_inf) {
                double with = eta[k] + dp[k + 1][B - w[k]];
                if (with > best) best = with;
            }
            dp[k][B] = best;
        }
    }

    // Most violated budget: xi + dp[0][B] > f(B * delta) + tol.
    double delta = term.granularity.to_double();
    std::size_t best_budget = 0;
    double best_violation = tol;
    bool found = false;
    for (std::size_t B = 0; B <= W; ++B) {
        if (dp[0][B] == neg_inf) continue;
        double violation = xi + dp[0][B] - term.cost(delta * static_cast<double>(B));
        if (violation > tol && violation >= best_violation) {  // ties go to the larger budget
            best_violation = violation;
            best_budget = B;
            found = true;
        }
    }
    if (!found) return std::nullopt;

    // Reconstruct the lexicographically smallest max-profit set. Weights are
    // >= 1, so once the remaining budget and profit hit zero nothing else fits;
    // preferring inclusion at each smaller index gives the lex-min set.
    std::vector<int> items;
    std::size_t B = best_budget;
    double profit = dp[0][B];
    for (std::size_t k = 0; k < n && B > 0; ++k) {
        if (B >= static_cast<std::size_t>(w[k]) && dp[k + 1][B - w[k]] != neg_inf &&
            eta[k] + dp[k + 1][B - w[k]] == profit) {
            items.push_back(static_cast<int>(k));
            B -= static_cast<std::size_t>(w[k]);
            profit = dp[k + 1][B];
        } else {
            profit = dp[k + 1][B];  // same value, item excluded
        }
    }
    return items;
}

namespace {

double term_scale(const TermData& term) {
    return std::max(1.0, term.cost(term.total_coeff().to_double()));
}

struct ColumnSet {
    std::vector<std::vector<int>> columns;  // sorted support positions
    std::set<std::vector<int>> seen;

    bool add(std::vector<int> col) {
        std::sort(col.begin(), col.end());
        if (!seen.insert(col).second) return false;
        columns.push_back(std::move(col));
        return true;
    }
};

}  // namespace

EvaluatedTerm evaluate_H(const TermData& term, std::span<const double> y, double tol,
                         const RelaxationConfig& config) {
    term.validate();
    EvaluatedTerm out;
    out.term_id = term.id;

    // Active support: variables with positive marginal. Dropped variables keep
    // eta = 0, which stays dual-feasible because f is nondecreasing.
    std::vector<std::size_t> active;
    std::vector<double> y_active;
    for (std::size_t k = 0; k < term.support_size(); ++k) {
        double yi = std::clamp(y[term.coeffs[k].first], 0.0, 1.0);
        if (yi > 1e-12) {
            active.push_back(k);
            y_active.push_back(yi);
        }
    }

    if (active.empty()) {
        out.value = 0.0;
        out.certificate.xi = 0.0;
        for (const auto& [var, d] : term.coeffs) out.certificate.eta.push_back({var, 0.0});
        out.columns.push_back({{}, 1.0});
        return out;
    }

    // Restricted term over the active positions only.
    TermData restricted;
    restricted.id = term.id;
    restricted.cost = term.cost;
    restricted.granularity = term.granularity;
    for (std::size_t k : active) restricted.coeffs.push_back(term.coeffs[k]);
    const std::size_t n_act = active.size();
    const double delta = term.granularity.to_double();
    const double sep_tol = tol * term_scale(term);

    // Seed columns: empty set, singletons, and the nested chain of the sorted
    // marginals; the chain makes the restricted primal feasible for any y
    // (weights y_(k) - y_(k+1) plus 1 - y_(1) on the empty set).
    ColumnSet cols;
    cols.add({});
    for (std::size_t k = 0; k < n_act; ++k) cols.add({static_cast<int>(k)});
    {
        std::vector<int> order(n_act);
        for (std::size_t k = 0; k < n_act; ++k) order[k] = static_cast<int>(k);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return y_active[a] > y_active[b]; });
        std::vector<int> chain;
        for (int k : order) {
            chain.push_back(k);
            cols.add(chain);
        }
    }

    const int column_cap = config.column_cap_factor * static_cast<int>(n_act) + 8;
    lp::Solution master_sol;
    std::vector<double> col_cost;

    auto solve_master = [&]() {
        lp::Problem master;
        col_cost.assign(cols.columns.size(), 0.0);
        for (std::size_t c = 0; c < cols.columns.size(); ++c) {
            std::int64_t budget = 0;
            for (int k : cols.columns[c]) budget += restricted.weight_of(k);
            col_cost[c] = term.cost(delta * static_cast<double>(budget));
            master.add_var(col_cost[c]);
        }
        lp::Row convexity;
        for (std::size_t c = 0; c < cols.columns.size(); ++c)
            convexity.terms.push_back({static_cast<int>(c), 1.0});
        convexity.sense = lp::Sense::EQ;
        convexity.rhs = 1.0;
        master.add_row(convexity);
        for (std::size_t k = 0; k < n_act; ++k) {
            lp::Row marginal;
            for (std::size_t c = 0; c < cols.columns.size(); ++c)
                if (std::binary_search(cols.columns[c].begin(), cols.columns[c].end(),
                                       static_cast<int>(k)))
                    marginal.terms.push_back({static_cast<int>(c), 1.0});
            marginal.sense = lp::Sense::EQ;
            marginal.rhs = y_active[k];
            master.add_row(marginal);
        }
        master_sol = lp::solve(master);
        if (master_sol.status != lp::Status::Optimal)
            throw InternalInvariantFailure("evaluate_H: restricted master not optimal (status " +
                                           std::to_string(static_cast<int>(master_sol.status)) + ")");
    };

    int rounds = 0;
    while (true) {
        solve_master();
        ++rounds;
        double xi = master_sol.dual[0];
        std::vector<double> eta(master_sol.dual.begin() + 1, master_sol.dual.end());
        auto violated = knapsack_separate(restricted, xi, eta, sep_tol, config.budget_cap);
        if (!violated.has_value()) {
            out.certificate.xi = xi;
            std::vector<double> eta_by_pos(term.support_size(), 0.0);
            for (std::size_t k = 0; k < n_act; ++k) eta_by_pos[active[k]] = eta[k];
            for (std::size_t k = 0; k < term.support_size(); ++k)
                out.certificate.eta.push_back({term.coeffs[k].first, eta_by_pos[k]});
            break;
        }
        if (static_cast<int>(cols.columns.size()) >= column_cap || !cols.add(*violated)) {
            double best_upper = master_sol.value;
            throw ConvergenceFailure("evaluate_H: column cap reached before dual feasibility",
                                     best_upper - sep_tol, best_upper);
        }
    }

    out.value = master_sol.value;
    out.generated_columns = static_cast<int>(cols.columns.size());
    for (std::size_t c = 0; c < cols.columns.size(); ++c) {
        if (master_sol.x[c] <= 1e-12) continue;
        std::vector<int> vars;
        for (int k : cols.columns[c]) vars.push_back(restricted.coeffs[k].first);
        std::sort(vars.begin(), vars.end());
        out.columns.push_back({std::move(vars), master_sol.x[c]});
    }
    return out;
}

std::vector<EvaluatedTerm> evaluate_all_terms(const ProblemInstance& prob,
                                              std::span<const double> y, double tol,
                                              const RelaxationConfig& config, ExecPolicy policy) {
    std::vector<EvaluatedTerm> result(prob.terms.size());
    std::exception_ptr error;
    parallel_for(prob.terms.size(), policy, [&](std::size_t j) {
        try {
            result[j] = evaluate_H(prob.terms[j], y, tol, config);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);
    return result;
}

SolveResult solve_relaxation(const ProblemInstance& prob, double eps,
                             const RelaxationConfig& config, ExecPolicy policy) {
    auto started = std::chrono::steady_clock::now();
    if (!prob.polytope) throw std::invalid_argument("solve_relaxation: instance has no polytope");
    const int n = prob.num_vars;
    const int k = static_cast<int>(prob.terms.size());

    lp::Problem master;
    for (int i = 0; i < n; ++i) master.add_var(0.0);
    for (int j = 0; j < k; ++j) master.add_var(1.0);  // epigraph variables theta_j
    auto add_polytope_row = [&](const LinearRow& row) {
        lp::Row r;
        r.terms = row.terms;
        r.sense = row.sense;
        r.rhs = row.rhs;
        master.add_row(std::move(r));
    };
    for (const LinearRow& row : prob.polytope->initial_rows()) add_polytope_row(row);
    for (int i : prob.forced_zero) master.add_row({{{i, 1.0}}, lp::Sense::LE, 0.0});

    SolveResult result;
    result.lp_value = std::numeric_limits<double>::infinity();
    double lb = 0.0;

    for (int iter = 0; iter < config.master_cut_cap; ++iter) {
        lp::Solution sol = lp::solve(master);
        if (sol.status == lp::Status::Infeasible)
            throw InfeasiblePolytope("solve_relaxation: master infeasible");
        if (sol.status != lp::Status::Optimal)
            throw ConvergenceFailure("solve_relaxation: master solve failed", lb, result.lp_value);
        result.master_iterations = iter + 1;
        lb = std::max(lb, sol.value);

        std::vector<double> y(sol.x.begin(), sol.x.begin() + n);
        SeparationResult sep = prob.polytope->separate(y, 1e-9);
        if (!sep.inside) {
            add_polytope_row(sep.row);
            continue;
        }

        for (double& yi : y) yi = std::clamp(yi, 0.0, 1.0);
        std::vector<EvaluatedTerm> terms = evaluate_all_terms(prob, y, config.tol, config, policy);
        double ub = 0.0;
        for (const EvaluatedTerm& t : terms) ub += t.value;
        bool improved = ub < result.lp_value;

        // One epigraph cut per term sitting below its H value.
        bool any_cut = false;
        for (int j = 0; j < k; ++j) {
            double theta = sol.x[n + j];
            const DualCertificate& cert = terms[j].certificate;
            if (theta < terms[j].value - 1e-11 * term_scale(prob.terms[j])) {
                lp::Row cut;
                cut.terms.push_back({n + j, 1.0});
                for (const auto& [var, e] : cert.eta)
                    if (e != 0.0) cut.terms.push_back({var, -e});
                cut.sense = lp::Sense::GE;
                cut.rhs = cert.xi;
                master.add_row(std::move(cut));
                any_cut = true;
            }
        }
        if (improved) {
            result.lp_value = ub;
            result.y = y;
            result.terms = std::move(terms);
        }
        if (result.lp_value - lb <= eps * std::max(lb, 1e-12) + 1e-12) break;
        if (!any_cut) break;  // theta already matches every H_j: gap is closed
    }

    if (!std::isfinite(result.lp_value)) {
        // No feasible evaluation round happened within the cap.
        throw ConvergenceFailure("solve_relaxation: cut cap reached before feasibility", lb,
                                 std::numeric_limits<double>::infinity());
    }
    result.lower_bound = std::min(lb, result.lp_value);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return result;
}

std::pair<ProblemInstance, DiscretizationPlan> discretize(const ProblemInstance& prob,
                                                          const Rational& eps, double opt_bound) {
    if (!(opt_bound > 0.0)) throw std::invalid_argument("discretize: opt_bound must be positive");
    if (!(eps > Rational(0))) throw std::invalid_argument("discretize: eps must be positive");

    double p_bound = 0.0;
    for (const TermData& term : prob.terms) {
        std::optional<double> p = term.smoothness_override;
        if (!p.has_value()) p = term.cost.smoothness_bound();
        if (!p.has_value())
            throw std::invalid_argument(
                "discretize: tabulated cost needs an explicit smoothness bound");
        p_bound = std::max(p_bound, *p);
    }
    p_bound = std::max(p_bound, 1.0);

    DiscretizationPlan plan;
    plan.smoothness_bound = p_bound;
    // Rational upper bound on P keeps eta (and hence delta) exact; rounding P
    // up only refines the grid, which preserves the theorem's guarantees.
    Rational p_rat(static_cast<std::int64_t>(std::ceil(p_bound * 4096.0)), 4096);
    Rational eta = eps / (Rational(4) * p_rat);
    if (Rational(1, 2) < eta) eta = Rational(1, 2);
    plan.eta = eta;

    // I = {i : f_j(d_ij) > opt_bound for some j}
    std::set<int> forced(prob.forced_zero.begin(), prob.forced_zero.end());
    for (const TermData& term : prob.terms)
        for (const auto& [var, d] : term.coeffs)
            if (term.cost(d.to_double()) > opt_bound) forced.insert(var);
    plan.forced_zero.assign(forced.begin(), forced.end());

    ProblemInstance out;
    out.num_vars = prob.num_vars;
    out.polytope = prob.polytope;
    out.forced_zero = plan.forced_zero;

    const std::int64_t k = std::max<std::int64_t>(1, static_cast<std::int64_t>(prob.terms.size()));
    const std::int64_t n = std::max<std::int64_t>(1, prob.num_vars);
    for (const TermData& term : prob.terms) {
        Rational t_j(0);
        for (const auto& [var, d] : term.coeffs)
            if (!forced.count(var) && t_j < d) t_j = d;
        TermData rounded;
        rounded.id = term.id;
        rounded.cost = term.cost;
        rounded.smoothness_override = term.smoothness_override;
        if (t_j.is_zero()) {
            // Entire support pinned to zero; keep the old granularity.
            rounded.granularity = term.granularity;
            plan.delta.push_back(term.granularity);
            plan.t_max.push_back(t_j);
            out.terms.push_back(std::move(rounded));
            continue;
        }
        Rational delta = eps * eta * t_j / Rational(k * n);
        rounded.granularity = delta;
        for (const auto& [var, d] : term.coeffs) {
            if (forced.count(var)) continue;
            Rational d_rounded = Rational(d.floor_div(delta)) * delta;
            if (!d_rounded.is_zero()) rounded.coeffs.push_back({var, d_rounded});
        }
        rounded.validate();
        plan.delta.push_back(delta);
        plan.t_max.push_back(t_j);
        out.terms.push_back(std::move(rounded));
    }
    return {std::move(out), std::move(plan)};
}

std::vector<double> estimate_opt_bound(const ProblemInstance& prob) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const TermData& term : prob.terms) {
        for (const auto& [var, d] : term.coeffs) {
            double f = term.cost(d.to_double());
            if (f > 0.0) lo = std::min(lo, f);
        }
        hi += term.cost(term.total_coeff().to_double());
    }
    if (hi <= 0.0 || !std::isfinite(lo)) return {0.0};

    std::vector<double> candidates;
    int a = static_cast<int>(std::ceil(std::log2(lo) - 1e-12));
    int b = static_cast<int>(std::ceil(std::log2(hi) - 1e-12));
    for (int e = a; e <= b; ++e) candidates.push_back(std::ldexp(1.0, e));
    return candidates;
}

}  // namespace dscale
