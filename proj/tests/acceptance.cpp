// Acceptance suite: runs every criterion at its stated tolerance and prints
// one pass/fail line each. Exit code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dscale/cxlab.hpp"
#include "dscale/errors.hpp"
#include "dscale/generate.hpp"
#include "dscale/moments.hpp"
#include "dscale/oracles.hpp"
#include "dscale/polytopes.hpp"
#include "dscale/relaxation.hpp"
#include "dscale/rounding.hpp"

using namespace dscale;

namespace {

struct Harness {
    int failures = 0;

    void run(int id, const std::string& name, double time_budget_s,
             const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        auto t0 = std::chrono::steady_clock::now();
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (seconds > time_budget_s) {
            ok = false;
            detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
        }
        if (!ok) ++failures;
        std::printf("[%s] criterion %d: %s (%.2fs) %s\n", ok ? "PASS" : "FAIL", id, name.c_str(),
                    seconds, detail.c_str());
        std::fflush(stdout);
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// --- criterion 1 -----------------------------------------------------------

bool poisson_moments(std::string& detail) {
    const std::vector<std::pair<double, double>> table{
        {1.0, 1.0}, {1.25, 1.163}, {1.5, 1.373}, {1.75, 1.645}, {2.0, 2.0}};
    for (auto [q, expected] : table) {
        double got = fractional_bell(q, 1e-6);
        if (std::abs(got - expected) > 5e-4) {
            detail = "A_" + fmt(q) + " = " + fmt(got) + " vs " + fmt(expected);
            return false;
        }
    }
    // independent series oracle at q = 3
    double oracle = 0.0;
    for (int t = 40; t >= 1; --t)
        oracle += std::exp(3.0 * std::log(static_cast<double>(t)) - 1.0 -
                           std::lgamma(static_cast<double>(t) + 1.0));
    double got = fractional_bell(3.0, 1e-7);
    if (std::abs(got - oracle) > 1e-6 || std::abs(got - 5.0) > 1e-6) {
        detail = "A_3 = " + fmt(got) + " vs oracle " + fmt(oracle);
        return false;
    }
    detail = "A_q table matched at 5e-4; A_3 = " + fmt(got);
    return true;
}

// --- criterion 2 -----------------------------------------------------------

bool concave_gains(std::string& detail) {
    PiecewiseLinear cap;
    cap.breakpoints = {0.0, 1.0, 100.0};
    cap.values = {0.0, 1.0, 1.0};
    double min_t_1 = concave_gain(TabulatedConcave(cap), 1.0, 1e-4).value;
    double target = 1.0 - std::exp(-1.0);
    if (std::abs(min_t_1 - target) > 1e-3) {
        detail = "B(min{t,1}) = " + fmt(min_t_1);
        return false;
    }
    PiecewiseLinear root;
    int points = 6000;
    for (int i = 0; i <= points; ++i) {
        double x = 60.0 * i / points;
        root.breakpoints.push_back(x);
        root.values.push_back(std::sqrt(x));
    }
    double sqrt_gain = concave_gain(TabulatedConcave(root), 1.0, 1e-4).value;
    if (std::abs(sqrt_gain - 0.773) > 2e-3) {
        detail = "B(sqrt) = " + fmt(sqrt_gain);
        return false;
    }
    detail = "B(min{t,1}) = " + fmt(min_t_1) + ", B(sqrt) = " + fmt(sqrt_gain);
    return true;
}

// --- criterion 3 -----------------------------------------------------------

bool decoupling_corpus(std::string& detail) {
    CorpusConfig cfg;  // 1000 joints, n <= 4, <= 8 atoms, q in {1, 1.5, 2, 3}
    cfg.seed = 20240601;
    CorpusReport rep = run_decoupling_corpus(cfg);
    detail = "items " + std::to_string(rep.items) + ", worst norm slack " +
             fmt(rep.worst_norm_slack) + ", worst cx slack " + fmt(rep.worst_cx_slack);
    return rep.norm_violations == 0 && rep.cx_violations == 0 && rep.items >= 1000;
}

// --- criterion 4 -----------------------------------------------------------

bool tightness(std::string& detail) {
    auto t = tightness_construction(10000);
    double closed = t.second_moment_closed_form;
    double summed = t.sum_x.moment(2.0);
    double a2 = fractional_bell(2.0, 1e-10);
    detail = "closed " + fmt(closed) + ", binomial sum " + fmt(summed) + ", 0.999 A_2 = " +
             fmt(0.999 * a2);
    return std::abs(closed - summed) < 1e-9 && summed >= 0.999 * a2 &&
           std::abs(closed - (1.0 + 9999.0 / 10000.0)) < 1e-12;
}

// --- criterion 5 -----------------------------------------------------------

bool routing_end_to_end(std::string& detail) {
    for (int n : {2, 4, 8}) {
        ProblemInstance prob = build_problem(Instance(make_parallel_gap(n, 2.0)));
        SolveResult sol = solve_relaxation(prob, 0.01);
        if (std::abs(sol.lp_value - 1.0) > 1e-6) {
            detail = "gap n=" + std::to_string(n) + ": lp " + fmt(sol.lp_value);
            return false;
        }
    }
    int count = 0;
    double worst_ratio = 0.0;
    for (std::uint64_t seed = 0; count < 50; ++seed) {
        Instance inst(random_routing(9000 + seed, 8, 5, 3, 3, 2.0));
        ProblemInstance prob = build_problem(inst);
        double explicit_lp, opt;
        try {
            explicit_lp = explicit_lp_opt(prob);
            opt = brute_force_opt(prob, ExhaustiveBudget{500000}).value;
        } catch (const BudgetExceeded&) {
            continue;  // too many paths; draw another instance
        }
        if (explicit_lp > opt + 1e-7) {
            detail = "seed " + std::to_string(seed) + ": explicit LP above OPT";
            return false;
        }
        SolveResult sol = solve_relaxation(prob, 0.01);
        if (sol.lp_value < explicit_lp - 1e-7 || sol.lp_value > 1.01 * explicit_lp + 1e-7) {
            detail = "seed " + std::to_string(seed) + ": solver value " + fmt(sol.lp_value) +
                     " vs explicit " + fmt(explicit_lp);
            return false;
        }
        double expected = expected_rounded_cost_exact(sol.y, inst);
        double a_q = fractional_bell(2.0, 1e-10);
        if (expected > a_q * sol.lp_value + 1e-7) {
            detail = "seed " + std::to_string(seed) + ": E[cost] " + fmt(expected) + " > A_q lp " +
                     fmt(a_q * sol.lp_value);
            return false;
        }
        if (sol.lp_value > 0.0) worst_ratio = std::max(worst_ratio, expected / sol.lp_value);

        // The guarantee covers every feasible fractional point, not only the
        // optimum; stress it at a midpoint of two vertices.
        auto vertices = prob.polytope->list_vertices(200000);
        std::vector<double> mid(prob.num_vars);
        const auto& va = vertices[seed % vertices.size()];
        const auto& vb = vertices[(7 * seed + 3) % vertices.size()];
        for (int i = 0; i < prob.num_vars; ++i) mid[i] = 0.5 * (va[i] + vb[i]);
        double relax_mid = 0.0;
        for (const TermData& term : prob.terms) relax_mid += evaluate_H(term, mid, 1e-10).value;
        double expected_mid = expected_rounded_cost_exact(mid, inst);
        if (expected_mid > a_q * relax_mid + 1e-7) {
            detail = "fractional stress at seed " + std::to_string(seed) + ": E " +
                     fmt(expected_mid) + " > A_q relax " + fmt(a_q * relax_mid);
            return false;
        }
        if (relax_mid > 1e-12) worst_ratio = std::max(worst_ratio, expected_mid / relax_mid);
        ++count;
    }
    detail = "gap family exact; " + std::to_string(count) +
             " random instances incl. fractional midpoints, worst E[cost]/relax = " +
             fmt(worst_ratio);
    return true;
}

// --- criterion 6 -----------------------------------------------------------

bool load_balancing(std::string& detail) {
    double a_worst = 0.0;
    int count = 0;
    for (std::uint64_t seed = 0; count < 50; ++seed) {
        double q = 1.0 + static_cast<double>(seed % 5) * 0.5;  // 1 .. 3
        Instance inst(random_loadbalance(7000 + seed, 3, 5, q));
        ProblemInstance prob = build_problem(inst);
        SolveResult sol = solve_relaxation(prob, 0.01);
        double expected = expected_rounded_cost_exact(sol.y, inst);
        double a_q = fractional_bell(q, 1e-10);
        if (expected > a_q * sol.lp_value + 1e-7) {
            detail = "seed " + std::to_string(seed) + " q=" + fmt(q) + ": E " + fmt(expected) +
                     " > " + fmt(a_q * sol.lp_value);
            return false;
        }
        if (sol.lp_value > 1e-12)
            a_worst = std::max(a_worst, std::pow(expected / sol.lp_value, 1.0 / q) /
                                            std::pow(a_q, 1.0 / q));

        // fractional stress: midpoint of two assignments
        auto vertices = prob.polytope->list_vertices(200000);
        std::vector<double> mid(prob.num_vars);
        const auto& va = vertices[seed % vertices.size()];
        const auto& vb = vertices[(5 * seed + 1) % vertices.size()];
        for (int i = 0; i < prob.num_vars; ++i) mid[i] = 0.5 * (va[i] + vb[i]);
        double relax_mid = 0.0;
        for (const TermData& term : prob.terms) relax_mid += evaluate_H(term, mid, 1e-10).value;
        double expected_mid = expected_rounded_cost_exact(mid, inst);
        if (expected_mid > a_q * relax_mid + 1e-7) {
            detail = "fractional stress failed at seed " + std::to_string(seed);
            return false;
        }
        ++count;
    }
    detail = std::to_string(count) + " instances incl. fractional midpoints, worst norm-ratio/bound = " +
             fmt(a_worst);
    return true;
}

// --- criterion 7 -----------------------------------------------------------

bool scheduling(std::string& detail) {
    int count = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; count < 25; ++seed) {
        double p = 1.0 + static_cast<double>(seed % 2);
        Instance inst(random_schedule(11000 + seed, 2, 4, 3, p));
        ProblemInstance prob = build_problem(inst);
        SolveResult sol = solve_relaxation(prob, 0.01);
        double expected;
        try {
            expected = expected_rounded_cost_exact(sol.y, inst);
        } catch (const BudgetExceeded&) {
            continue;
        }
        double bound = std::pow(2.0, p) * fractional_bell(p, 1e-10);
        if (expected > bound * sol.lp_value + 1e-7) {
            detail = "seed " + std::to_string(seed) + ": E " + fmt(expected) + " > 2^p A_p lp " +
                     fmt(bound * sol.lp_value);
            return false;
        }
        if (sol.lp_value > 1e-12) worst = std::max(worst, expected / (bound * sol.lp_value));
        ++count;
    }
    detail = std::to_string(count) + " instances, worst E/(2^p A_p LP) = " + fmt(worst);
    return true;
}

// --- criterion 8 -----------------------------------------------------------

// Connected graphs on <= 6 vertices up to isomorphism: canonical form is the
// minimum edge bitmask over all vertex permutations.
std::vector<TreeInstance> all_connected_graphs(int max_vertices) {
    std::vector<TreeInstance> graphs;
    RngStream weight_rng(271828);
    for (int n = 2; n <= max_vertices; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int u = 0; u < n; ++u)
            for (int v = u + 1; v < n; ++v) pairs.push_back({u, v});
        int m = static_cast<int>(pairs.size());
        std::vector<int> perm(n);
        std::set<unsigned> seen;
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            // connectivity over all n vertices
            std::vector<int> parent(n);
            for (int i = 0; i < n; ++i) parent[i] = i;
            std::function<int(int)> find = [&](int v) {
                while (parent[v] != v) v = parent[v] = parent[parent[v]];
                return v;
            };
            int comps = n;
            for (int e = 0; e < m; ++e)
                if (mask & (1u << e)) {
                    int a = find(pairs[e].first), b = find(pairs[e].second);
                    if (a != b) {
                        parent[a] = b;
                        --comps;
                    }
                }
            if (comps != 1) continue;
            // canonical form over vertex permutations
            for (int i = 0; i < n; ++i) perm[i] = i;
            unsigned canon = mask;
            do {
                unsigned mapped = 0;
                for (int e = 0; e < m; ++e) {
                    if (!(mask & (1u << e))) continue;
                    int a = perm[pairs[e].first], b = perm[pairs[e].second];
                    if (a > b) std::swap(a, b);
                    // index of pair (a, b) in the lexicographic pair list
                    int idx = a * (2 * n - a - 1) / 2 + (b - a - 1);
                    mapped |= 1u << idx;
                }
                canon = std::min(canon, mapped);
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (!seen.insert(canon).second) continue;

            TreeInstance inst;
            inst.num_vertices = n;
            for (int e = 0; e < m; ++e)
                if (mask & (1u << e))
                    inst.edges.push_back(
                        {pairs[e].first, pairs[e].second,
                         Rational(1 + static_cast<std::int64_t>(weight_rng.next_below(8)), 2)});
            graphs.push_back(std::move(inst));
        }
    }
    return graphs;
}

bool spanning_tree(std::string& detail) {
    std::vector<TreeInstance> graphs = all_connected_graphs(6);
    int checked = 0;
    for (double q : {1.5, 2.0}) {
        for (TreeInstance inst : graphs) {
            inst.exponent = q;
            ProblemInstance prob = build_problem(Instance(inst));
            SolveResult sol = solve_relaxation(prob, 0.01);
            PipageResult pip = pipage_round(sol.y, inst);
            const auto& edges = std::get<TreeChoice>(pip.solution.choice).tree_edges;
            if (static_cast<int>(edges.size()) != inst.num_vertices - 1 ||
                graphic_matroid_rank(inst, edges) != inst.num_vertices - 1) {
                detail = "non-tree output on a graph with " + std::to_string(inst.num_vertices) +
                         " vertices";
                return false;
            }
            for (std::size_t i = 1; i < pip.f_trace.size(); ++i)
                if (pip.f_trace[i] > pip.f_trace[i - 1] + 1e-7) {
                    detail = "F increased during pipage";
                    return false;
                }
            if (pip.steps > inst.num_edges()) {
                detail = "pipage took more than |E| steps";
                return false;
            }
            double f_start = pip.f_trace.front();
            double a_q = fractional_bell(q, 1e-10);
            double opt = brute_force_opt(prob).value;
            if (pip.solution.cost > f_start + 1e-7 || f_start > a_q * sol.lp_value + 1e-7 ||
                pip.solution.cost < opt - 1e-9) {
                detail = "bound chain broken: cost " + fmt(pip.solution.cost) + ", F(x*) " +
                         fmt(f_start) + ", A_q lp " + fmt(a_q * sol.lp_value) + ", opt " + fmt(opt);
                return false;
            }
            ++checked;
        }
    }
    detail = std::to_string(graphs.size()) + " connected graphs x {1.5, 2}, " +
             std::to_string(checked) + " runs";
    return true;
}

// --- criterion 9 -----------------------------------------------------------

bool discretization(std::string& detail) {
    int count = 0;
    for (std::uint64_t seed = 0; count < 50; ++seed) {
        Instance inst = (seed % 2 == 0) ? Instance(random_loadbalance(13000 + seed, 3, 4, 2.0))
                                        : Instance(random_tree(13000 + seed, 5, 2.0));
        ProblemInstance prob = build_problem(inst);
        double opt = brute_force_opt(prob).value;
        // smallest power-of-two candidate at or above OPT
        double opt_bound = 0.0;
        for (double c : estimate_opt_bound(prob))
            if (c >= opt) {
                opt_bound = c;
                break;
            }
        if (opt_bound <= 0.0) {
            if (opt <= 1e-12) continue;  // all-zero instance
            detail = "no candidate bound above OPT";
            return false;
        }
        for (Rational eps : {Rational(1, 10), Rational(3, 10)}) {
            auto [rounded, plan] = discretize(prob, eps, opt_bound);
            double opt_rounded = brute_force_opt(rounded).value;
            if (opt_rounded > opt + 1e-9) {
                detail = "OPT' > OPT at seed " + std::to_string(seed);
                return false;
            }
            if (opt > opt_rounded + 2.0 * eps.to_double() * opt_bound + 1e-9) {
                detail = "OPT exceeds OPT' + 2 eps bound at seed " + std::to_string(seed);
                return false;
            }
        }
        ++count;
    }
    detail = std::to_string(count) + " instances at eps in {0.1, 0.3}";
    return true;
}

// --- criterion 10 ----------------------------------------------------------

bool h_properties(std::string& detail) {
    RngStream rng(660649);
    int triples = 0;
    while (triples < 200) {
        TermData term;
        int support = 1 + static_cast<int>(rng.next_below(6));
        double q = 1.0 + rng.next_double() * 2.0;
        term.cost = CostFunction::power(0.5 + rng.next_double() * 2.0, q);
        for (int k = 0; k < support; ++k)
            term.coeffs.push_back({k, Rational(1 + static_cast<std::int64_t>(rng.next_below(5)))});
        std::vector<double> y(support), y2(support), y3(support);
        for (int k = 0; k < support; ++k) {
            y[k] = rng.next_double();
            y2[k] = rng.next_double();
            y3[k] = rng.next_double();
        }
        double lambda = rng.next_double();
        EvaluatedTerm at_y = evaluate_H(term, y, 1e-10);
        EvaluatedTerm at_y2 = evaluate_H(term, y2, 1e-10);

        // convexity along the segment
        std::vector<double> mid(support);
        for (int k = 0; k < support; ++k) mid[k] = lambda * y[k] + (1.0 - lambda) * y2[k];
        double h_mid = evaluate_H(term, mid, 1e-10).value;
        if (h_mid > lambda * at_y.value + (1.0 - lambda) * at_y2.value + 1e-7) {
            detail = "convexity violated";
            return false;
        }
        // subgradient minorant at a third point
        AffineMinorant g = subgradient(at_y.certificate);
        double h_y3 = evaluate_H(term, y3, 1e-10).value;
        if (g(y3) > h_y3 + 1e-7 || std::abs(g(y) - at_y.value) > 1e-7) {
            detail = "minorant violated";
            return false;
        }
        // column generation matches the explicit exponential LP
        double explicit_value = explicit_term_lp(term, y);
        if (std::abs(explicit_value - at_y.value) > 1e-7 * std::max(1.0, explicit_value)) {
            detail = "evaluate_H " + fmt(at_y.value) + " vs explicit " + fmt(explicit_value);
            return false;
        }
        ++triples;
    }
    detail = "200 random (term, y, y~) triples";
    return true;
}

}  // namespace

int main() {
    Harness h;
    h.run(1, "Poisson moments match the reference table and the series oracle", 1.0, poisson_moments);
    h.run(2, "concave gains B(min{t,1}) and B(sqrt t)", 5.0, concave_gains);
    h.run(3, "decoupling corpus: 1000 joints, zero violations", 120.0, decoupling_corpus);
    h.run(4, "tightness construction at n = 10^4 reaches 0.999 A_2", 1.0, tightness);
    h.run(5, "routing end-to-end: gap family exact, oracle sandwich on 50 instances", 300.0,
          routing_end_to_end);
    h.run(6, "load balancing: exact expected cost within A_q on 50 instances", 180.0,
          load_balancing);
    h.run(7, "scheduling: exact expected cost within 2^p A_p on 25 instances", 300.0, scheduling);
    h.run(8, "spanning tree: pipage chain on all connected graphs with <= 6 vertices", 300.0,
          spanning_tree);
    h.run(9, "discretization bounds OPT' <= OPT <= OPT' + 2 eps bound on 50 instances", 120.0,
          discretization);
    h.run(10, "H convexity, subgradient minorants, explicit-LP agreement", 120.0, h_properties);
    if (h.failures == 0) std::printf("all acceptance criteria passed\n");
    return h.failures;
}
