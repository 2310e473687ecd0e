#include "dscale/term.hpp"

#include <numeric>
#include <stdexcept>

#include "dscale/moments.hpp"
#include "dscale/polytopes.hpp"

namespace dscale {

void TermData::validate(std::int64_t max_weight_ratio) const {
    if (!(granularity > Rational(0))) throw std::invalid_argument("term: granularity must be positive");
    for (const auto& [var, d] : coeffs) {
        if (var < 0) throw std::invalid_argument("term: negative variable index");
        if (!(d > Rational(0))) throw std::invalid_argument("term: support coefficients must be positive");
        if (!d.is_multiple_of(granularity))
            throw std::invalid_argument("term: coefficient not an exact multiple of granularity");
        if (d.floor_div(granularity) > max_weight_ratio)
            throw std::invalid_argument("term: d/delta exceeds configured bound (discretize first)");
    }
}

double ProblemInstance::true_cost(std::span<const double> y) const {
    double total = 0.0;
    for (const TermData& term : terms) {
        double load = 0.0;
        for (const auto& [var, d] : term.coeffs) load += d.to_double() * y[var];
        total += term.cost(load);
    }
    return total;
}

namespace {

// Common denominator of a set of rationals, as a granularity 1/L.
Rational common_granularity(const std::vector<Rational>& values) {
    std::int64_t lcm = 1;
    for (const Rational& v : values) lcm = std::lcm(lcm, v.den());
    return Rational(1, lcm);
}

ProblemInstance from_routing(const RoutingInstance& inst) {
    ProblemInstance prob;
    prob.num_vars = inst.num_demands() * inst.num_edges();
    for (int e = 0; e < inst.num_edges(); ++e) {
        TermData term;
        term.id = e;
        term.cost = CostFunction::power(inst.edges[e].scale, inst.edges[e].exponent);
        term.granularity = Rational(1);
        for (int i = 0; i < inst.num_demands(); ++i)
            term.coeffs.push_back({inst.var(i, e), Rational(inst.demands[i].amount)});
        term.validate();
        prob.terms.push_back(std::move(term));
    }
    return prob;
}

ProblemInstance from_loadbalance(const LoadBalancingInstance& inst) {
    ProblemInstance prob;
    prob.num_vars = inst.machines * inst.jobs;
    for (int i = 0; i < inst.machines; ++i) {
        TermData term;
        term.id = i;
        term.cost = CostFunction::power(1.0, inst.exponent);
        std::vector<Rational> support;
        for (int j = 0; j < inst.jobs; ++j)
            if (!inst.processing[i][j].is_zero()) support.push_back(inst.processing[i][j]);
        term.granularity = support.empty() ? Rational(1) : common_granularity(support);
        for (int j = 0; j < inst.jobs; ++j)
            if (!inst.processing[i][j].is_zero())
                term.coeffs.push_back({inst.var(i, j), inst.processing[i][j]});
        term.validate();
        prob.terms.push_back(std::move(term));
    }
    return prob;
}

ProblemInstance from_tree(const TreeInstance& inst) {
    ProblemInstance prob;
    prob.num_vars = inst.num_edges();
    for (int v = 0; v < inst.num_vertices; ++v) {
        TermData term;
        term.id = v;
        term.cost = CostFunction::power(1.0, inst.exponent);
        std::vector<Rational> support;
        for (int e = 0; e < inst.num_edges(); ++e)
            if ((inst.edges[e].u == v || inst.edges[e].v == v) && !inst.edges[e].weight.is_zero())
                support.push_back(inst.edges[e].weight);
        term.granularity = support.empty() ? Rational(1) : common_granularity(support);
        for (int e = 0; e < inst.num_edges(); ++e)
            if ((inst.edges[e].u == v || inst.edges[e].v == v) && !inst.edges[e].weight.is_zero())
                term.coeffs.push_back({e, inst.edges[e].weight});
        term.validate();
        prob.terms.push_back(std::move(term));
    }
    return prob;
}

ProblemInstance from_schedule(const SchedulingInstance& inst) {
    // Completion-time costs are linear in x, so each (machine, job, start)
    // triple is its own singleton term with f(t) = w_j (start + p_ij)^p * t.
    ProblemInstance prob;
    prob.num_vars = inst.machines * inst.jobs * inst.horizon;
    int id = 0;
    for (int i = 0; i < inst.machines; ++i) {
        for (int j = 0; j < inst.jobs; ++j) {
            double w = inst.weights[j].to_double();
            if (w == 0.0) continue;
            for (int t = 0; t < inst.horizon; ++t) {
                double completion = t + static_cast<double>(inst.processing[i][j]);
                TermData term;
                term.id = id++;
                term.cost = CostFunction::power(w * std::pow(completion, inst.exponent), 1.0);
                term.granularity = Rational(1);
                term.coeffs.push_back({inst.var(i, j, t), Rational(1)});
                prob.terms.push_back(std::move(term));
            }
        }
    }
    return prob;
}

}  // namespace

ProblemInstance build_problem(const Instance& instance) {
    ProblemInstance prob = std::visit(
        [](const auto& inst) {
            using T = std::decay_t<decltype(inst)>;
            if constexpr (std::is_same_v<T, RoutingInstance>) return from_routing(inst);
            else if constexpr (std::is_same_v<T, LoadBalancingInstance>) return from_loadbalance(inst);
            else if constexpr (std::is_same_v<T, TreeInstance>) return from_tree(inst);
            else return from_schedule(inst);
        },
        instance);
    prob.polytope = make_polytope(instance);
    return prob;
}

double max_amplification(const ProblemInstance& prob, double tol) {
    double worst = 1.0;
    for (const TermData& term : prob.terms) {
        if (term.coeffs.empty()) continue;
        double t_max = term.total_coeff().to_double();
        worst = std::max(worst, amplification_factor(term.cost, std::max(t_max, 1.0), tol).value);
    }
    return worst;
}

}  // namespace dscale
