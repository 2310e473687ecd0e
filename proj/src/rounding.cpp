#include "dscale/rounding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "dscale/errors.hpp"
#include "dscale/polytopes.hpp"

namespace dscale {

namespace {

double power(double base, double exp) { return base <= 0.0 ? 0.0 : std::pow(base, exp); }

}  // namespace

//==========================================================================
// Flow decomposition
//==========================================================================

PathDecomposition decompose_flow(std::span<const double> y_edges, const RoutingInstance& graph,
                                 std::int64_t demand_amount, int source, int target, double tol) {
    const int E = graph.num_edges();
    const int V = graph.num_vertices;
    const double d = static_cast<double>(demand_amount);

    // Conservation check on y before scaling to flow.
    for (int u = 0; u < V; ++u) {
        double out = 0.0, in = 0.0;
        for (int e = 0; e < E; ++e) {
            if (graph.edges[e].tail == u) out += y_edges[e];
            if (graph.edges[e].head == u) in += y_edges[e];
        }
        double resid;
        if (u == source) resid = std::abs(out - 1.0);
        else if (u == target) resid = std::abs(in - 1.0);
        else resid = std::abs(out - in);
        if (resid > tol)
            throw std::invalid_argument("decompose_flow: conservation violated at vertex " +
                                        std::to_string(u));
    }

    std::vector<double> flow(E);
    for (int e = 0; e < E; ++e) flow[e] = std::max(0.0, y_edges[e]) * d;
    const double zero = 1e-12 * std::max(1.0, d);

    std::vector<std::vector<int>> out_edges(V);
    for (int e = 0; e < E; ++e) out_edges[graph.edges[e].tail].push_back(e);

    // Cycle stripping: cancel directed cycles in the positive-flow subgraph.
    // Removing a cycle lowers edge loads, never raises any, so it is cost-safe.
    auto find_cycle = [&]() -> std::vector<int> {
        std::vector<int> state(V, 0);  // 0 unseen, 1 on stack, 2 done
        std::vector<int> via(V, -1);   // edge used to enter each stacked vertex
        std::vector<int> cyc;
        auto dfs = [&](auto&& self, int u) -> bool {
            state[u] = 1;
            for (int e : out_edges[u]) {
                if (flow[e] <= zero) continue;
                int v = graph.edges[e].head;
                if (state[v] == 1) {  // back edge closes a cycle: e plus the stack from u down to v
                    cyc.push_back(e);
                    for (int w = u; w != v; w = graph.edges[via[w]].tail) cyc.push_back(via[w]);
                    return true;
                }
                if (state[v] == 0) {
                    via[v] = e;
                    if (self(self, v)) return true;
                }
            }
            state[u] = 2;
            return false;
        };
        for (int u = 0; u < V; ++u)
            if (state[u] == 0 && dfs(dfs, u)) return cyc;
        return {};
    };

    while (true) {
        std::vector<int> cycle = find_cycle();
        if (cycle.empty()) break;
        double m = std::numeric_limits<double>::infinity();
        for (int e : cycle) m = std::min(m, flow[e]);
        for (int e : cycle) flow[e] = std::max(0.0, flow[e] - m);
    }

    // Greedy path peeling: follow positive edges from the source, push the
    // bottleneck, repeat. Each round zeroes at least one edge.
    PathDecomposition decomposition;
    decomposition.total = d;
    for (int rounds = 0; rounds <= E + 1; ++rounds) {
        double remaining = 0.0;
        for (int e : out_edges[source]) remaining += flow[e];
        if (remaining <= tol * std::max(1.0, d)) break;

        std::vector<int> path;
        int u = source;
        std::vector<char> visited(V, 0);
        while (u != target) {
            visited[u] = 1;
            int next = -1;
            for (int e : out_edges[u])
                if (flow[e] > zero && !visited[graph.edges[e].head]) {
                    next = e;
                    break;
                }
            if (next < 0) {
                // Acyclic positive flow with conservation must reach the target.
                throw InternalInvariantFailure("decompose_flow: dead end during path peeling");
            }
            path.push_back(next);
            u = graph.edges[next].head;
        }
        double bottleneck = std::numeric_limits<double>::infinity();
        for (int e : path) bottleneck = std::min(bottleneck, flow[e]);
        for (int e : path) flow[e] = std::max(0.0, flow[e] - bottleneck);
        decomposition.paths.push_back({std::move(path), bottleneck});
    }
    double sum = 0.0;
    for (const auto& p : decomposition.paths) sum += p.weight;
    if (std::abs(sum - d) > tol * std::max(1.0, d))
        throw InternalInvariantFailure("decompose_flow: path weights do not sum to demand");
    // Normalize the tiny residual so weights sum to d exactly enough.
    if (!decomposition.paths.empty() && sum > 0.0)
        for (auto& p : decomposition.paths) p.weight *= d / sum;
    return decomposition;
}

//==========================================================================
// Randomized rounding per application
//==========================================================================

RoundedSolution round_routing(std::span<const double> y, const RoutingInstance& instance,
                              RngStream rng) {
    RoutingChoice choice;
    const int E = instance.num_edges();
    for (int i = 0; i < instance.num_demands(); ++i) {
        const auto& dem = instance.demands[i];
        PathDecomposition dec = decompose_flow(y.subspan(instance.var(i, 0), E), instance,
                                               dem.amount, dem.source, dem.target);
        std::vector<double> weights;
        for (const auto& p : dec.paths) weights.push_back(p.weight);
        RngStream sub = rng.substream(static_cast<std::uint64_t>(i));
        std::size_t pick = sub.categorical(weights);
        choice.path_of_demand.push_back(dec.paths[pick].edges);
    }
    RoundedSolution sol;
    sol.choice = std::move(choice);
    sol.cost = evaluate_cost(sol, Instance(instance));
    return sol;
}

RoundedSolution round_assignment(std::span<const double> x, const LoadBalancingInstance& instance,
                                 RngStream rng) {
    AssignmentChoice choice;
    for (int j = 0; j < instance.jobs; ++j) {
        double colsum = 0.0;
        std::vector<double> weights;
        for (int i = 0; i < instance.machines; ++i) {
            weights.push_back(std::max(0.0, x[instance.var(i, j)]));
            colsum += x[instance.var(i, j)];
        }
        if (std::abs(colsum - 1.0) > 1e-6)
            throw std::invalid_argument("round_assignment: job column does not sum to 1");
        RngStream sub = rng.substream(static_cast<std::uint64_t>(j));
        choice.machine_of_job.push_back(static_cast<int>(sub.categorical(weights)));
    }
    RoundedSolution sol;
    sol.choice = std::move(choice);
    sol.cost = evaluate_cost(sol, Instance(instance));
    return sol;
}

namespace {

// Back-to-back sequencing in nondecreasing tentative completion order,
// ties by job index.
std::vector<std::int64_t> realize_schedule(const SchedulingInstance& inst,
                                           const std::vector<int>& machine_of_job,
                                           const std::vector<int>& tentative_start) {
    std::vector<std::int64_t> completion(inst.jobs, 0);
    for (int i = 0; i < inst.machines; ++i) {
        std::vector<int> jobs_here;
        for (int j = 0; j < inst.jobs; ++j)
            if (machine_of_job[j] == i) jobs_here.push_back(j);
        std::sort(jobs_here.begin(), jobs_here.end(), [&](int a, int b) {
            std::int64_t ca = tentative_start[a] + inst.processing[i][a];
            std::int64_t cb = tentative_start[b] + inst.processing[i][b];
            if (ca != cb) return ca < cb;
            return a < b;
        });
        std::int64_t clock = 0;
        for (int j : jobs_here) {
            clock += inst.processing[i][j];
            completion[j] = clock;
        }
    }
    return completion;
}

}  // namespace

RoundedSolution round_schedule(std::span<const double> x, const SchedulingInstance& instance,
                               RngStream rng) {
    ScheduleChoice choice;
    choice.machine_of_job.resize(instance.jobs);
    choice.tentative_start.resize(instance.jobs);
    for (int j = 0; j < instance.jobs; ++j) {
        std::vector<double> weights;
        weights.reserve(static_cast<std::size_t>(instance.machines) * instance.horizon);
        for (int i = 0; i < instance.machines; ++i)
            for (int t = 0; t < instance.horizon; ++t)
                weights.push_back(std::max(0.0, x[instance.var(i, j, t)]));
        RngStream sub = rng.substream(static_cast<std::uint64_t>(j));
        std::size_t pick = sub.categorical(weights);  // throws on all-zero column
        choice.machine_of_job[j] = static_cast<int>(pick) / instance.horizon;
        choice.tentative_start[j] = static_cast<int>(pick) % instance.horizon;
    }
    choice.completion = realize_schedule(instance, choice.machine_of_job, choice.tentative_start);
    RoundedSolution sol;
    sol.choice = std::move(choice);
    sol.cost = evaluate_cost(sol, Instance(instance));
    return sol;
}

//==========================================================================
// Multilinear extension for trees
//==========================================================================

MultilinearValue multilinear_F_exact(std::span<const double> x, const TreeInstance& instance,
                                     int degree_cap) {
    double total = 0.0;
    for (int v = 0; v < instance.num_vertices; ++v) {
        double fixed = 0.0;  // weight of incident edges with x ~ 1
        std::vector<int> random_edges;
        for (int e = 0; e < instance.num_edges(); ++e) {
            if (instance.edges[e].u != v && instance.edges[e].v != v) continue;
            if (x[e] >= 1.0 - 1e-12) fixed += instance.edges[e].weight.to_double();
            else if (x[e] > 1e-12) random_edges.push_back(e);
        }
        if (static_cast<int>(random_edges.size()) > degree_cap)
            throw BudgetExceeded("multilinear_F_exact: fractional degree above cap; use sampling");
        const unsigned count = 1u << random_edges.size();
        for (unsigned mask = 0; mask < count; ++mask) {
            double prob = 1.0, load = fixed;
            for (std::size_t b = 0; b < random_edges.size(); ++b) {
                int e = random_edges[b];
                if (mask & (1u << b)) {
                    prob *= x[e];
                    load += instance.edges[e].weight.to_double();
                } else {
                    prob *= 1.0 - x[e];
                }
            }
            total += prob * power(load, instance.exponent);
        }
    }
    return {total, 0.0};
}

MultilinearValue multilinear_F_sample(std::span<const double> x, const TreeInstance& instance,
                                      int samples, RngStream rng, ExecPolicy policy) {
    if (samples <= 1) throw std::invalid_argument("multilinear_F_sample: need >= 2 samples");
    std::vector<double> values(samples);
    parallel_for(static_cast<std::size_t>(samples), policy, [&](std::size_t s) {
        RngStream sub = rng.substream(s);
        std::vector<char> in(instance.num_edges());
        for (int e = 0; e < instance.num_edges(); ++e) in[e] = sub.next_double() < x[e];
        double cost = 0.0;
        for (int v = 0; v < instance.num_vertices; ++v) {
            double load = 0.0;
            for (int e = 0; e < instance.num_edges(); ++e)
                if (in[e] && (instance.edges[e].u == v || instance.edges[e].v == v))
                    load += instance.edges[e].weight.to_double();
            cost += power(load, instance.exponent);
        }
        values[s] = cost;
    });
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / samples;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(samples) * (samples - 1);
    return {mean, std::sqrt(var)};
}

//==========================================================================
// Pipage rounding
//==========================================================================

namespace {

struct RankTable {
    int num_edges = 0;
    std::vector<int> rank;  // by edge mask

    RankTable(const TreeInstance& inst) : num_edges(inst.num_edges()) {
        if (num_edges > 20) throw BudgetExceeded("pipage: edge count above enumeration cap");
        rank.resize(1u << num_edges);
        std::vector<int> ids;
        for (unsigned mask = 0; mask < rank.size(); ++mask) {
            ids.clear();
            for (int e = 0; e < num_edges; ++e)
                if (mask & (1u << e)) ids.push_back(e);
            rank[mask] = graphic_matroid_rank(inst, ids);
        }
    }
};

double mask_sum(unsigned mask, std::span<const double> x) {
    double s = 0.0;
    for (int e = 0; mask; ++e, mask >>= 1)
        if (mask & 1u) s += x[e];
    return s;
}

}  // namespace

PipageResult pipage_round(std::span<const double> x_star, const TreeInstance& instance) {
    const int E = instance.num_edges();
    const double frac_eps = 1e-9;
    const double tight_tol = 1e-6;
    RankTable ranks(instance);

    // Masks ordered by size then value: the minimal-tight-set scan.
    std::vector<unsigned> by_size(1u << E);
    std::iota(by_size.begin(), by_size.end(), 0u);
    std::stable_sort(by_size.begin(), by_size.end(),
                     [](unsigned a, unsigned b) { return std::popcount(a) < std::popcount(b); });

    std::vector<double> x(x_star.begin(), x_star.end());
    auto snap = [&]() {
        for (double& xi : x) {
            if (xi < frac_eps) xi = 0.0;
            if (xi > 1.0 - frac_eps) xi = 1.0;
        }
    };
    snap();

    PipageResult result;
    result.f_trace.push_back(multilinear_F_exact(x, instance).value);

    const int step_cap = 4 * E * E + 8;
    for (int step = 0; step < step_cap; ++step) {
        std::vector<int> frac;
        for (int e = 0; e < E; ++e)
            if (x[e] > 0.0 && x[e] < 1.0) frac.push_back(e);
        if (frac.empty()) break;
        if (frac.size() == 1)
            throw InternalInvariantFailure("pipage: single fractional coordinate");

        // Minimal tight set (x(S) = rank(S)) containing >= 2 fractional edges.
        unsigned tight_mask = 0;
        for (unsigned mask : by_size) {
            int nf = 0;
            for (int e : frac)
                if (mask & (1u << e)) ++nf;
            if (nf < 2) continue;
            if (std::abs(mask_sum(mask, x) - ranks.rank[mask]) <= tight_tol) {
                tight_mask = mask;
                break;
            }
        }
        if (tight_mask == 0)
            throw InternalInvariantFailure("pipage: no tight set found (ground set is always tight)");

        int e1 = -1, e2 = -1;
        for (int e : frac)
            if (tight_mask & (1u << e)) {
                if (e1 < 0) e1 = e;
                else if (e2 < 0) {
                    e2 = e;
                    break;
                }
            }

        // Feasible step ranges: box bounds plus rank slack of every set
        // containing exactly one of the pair.
        double up = std::min(1.0 - x[e1], x[e2]);    // x[e1] += eps, x[e2] -= eps
        double down = std::min(x[e1], 1.0 - x[e2]);  // x[e1] -= eps, x[e2] += eps
        for (unsigned mask : by_size) {
            bool has1 = mask & (1u << e1), has2 = mask & (1u << e2);
            if (has1 == has2) continue;
            double slack = ranks.rank[mask] - mask_sum(mask, x);
            if (slack < 0.0) slack = 0.0;
            if (has1) up = std::min(up, slack);
            else down = std::min(down, slack);
        }
        if (up < 1e-11 && down < 1e-11)
            throw InternalInvariantFailure("pipage: both step directions blocked");

        std::vector<double> x_up = x, x_down = x;
        x_up[e1] += up;
        x_up[e2] -= up;
        x_down[e1] -= down;
        x_down[e2] += down;
        double f_up = multilinear_F_exact(x_up, instance).value;
        double f_down = multilinear_F_exact(x_down, instance).value;
        x = (f_up <= f_down) ? x_up : x_down;
        snap();
        result.f_trace.push_back(std::min(f_up, f_down));
        ++result.steps;
    }

    TreeChoice choice;
    for (int e = 0; e < E; ++e) {
        if (x[e] > 0.5) choice.tree_edges.push_back(e);
        else if (x[e] != 0.0)
            throw InternalInvariantFailure("pipage: non-integral output");
    }
    RoundedSolution sol;
    sol.choice = std::move(choice);
    sol.cost = evaluate_cost(sol, Instance(instance));
    result.solution = std::move(sol);
    return result;
}

//==========================================================================
// Exact expectation oracles and cost recomputation
//==========================================================================

namespace {

double routing_cost_of_loads(const RoutingInstance& inst, std::span<const double> load) {
    double total = 0.0;
    for (int e = 0; e < inst.num_edges(); ++e)
        total += inst.edges[e].scale * power(load[e], inst.edges[e].exponent);
    return total;
}

double expected_routing(std::span<const double> y, const RoutingInstance& inst,
                        std::size_t cap) {
    std::vector<PathDecomposition> decs;
    std::size_t outcomes = 1;
    for (int i = 0; i < inst.num_demands(); ++i) {
        const auto& dem = inst.demands[i];
        decs.push_back(decompose_flow(y.subspan(inst.var(i, 0), inst.num_edges()), inst,
                                      dem.amount, dem.source, dem.target));
        outcomes *= decs.back().paths.size();
        if (outcomes > cap)
            throw BudgetExceeded("expected_rounded_cost_exact: outcome space too large; "
                                 "use Monte Carlo trials instead");
    }
    double total = 0.0;
    std::vector<double> load(inst.num_edges(), 0.0);
    auto recurse = [&](auto&& self, int i, double prob) -> void {
        if (prob == 0.0) return;
        if (i == inst.num_demands()) {
            total += prob * routing_cost_of_loads(inst, load);
            return;
        }
        for (const auto& p : decs[i].paths) {
            for (int e : p.edges) load[e] += static_cast<double>(inst.demands[i].amount);
            self(self, i + 1, prob * p.weight / static_cast<double>(inst.demands[i].amount));
            for (int e : p.edges) load[e] -= static_cast<double>(inst.demands[i].amount);
        }
    };
    recurse(recurse, 0, 1.0);
    return total;
}

double expected_assignment(std::span<const double> x, const LoadBalancingInstance& inst,
                           std::size_t cap) {
    std::size_t outcomes = 1;
    std::vector<std::vector<std::pair<int, double>>> support(inst.jobs);
    for (int j = 0; j < inst.jobs; ++j) {
        for (int i = 0; i < inst.machines; ++i)
            if (x[inst.var(i, j)] > 1e-15) support[j].push_back({i, x[inst.var(i, j)]});
        outcomes *= support[j].size();
        if (outcomes > cap) throw BudgetExceeded("expected_rounded_cost_exact: m^n too large");
    }
    double total = 0.0;
    std::vector<double> load(inst.machines, 0.0);
    auto recurse = [&](auto&& self, int j, double prob) -> void {
        if (j == inst.jobs) {
            double cost = 0.0;
            for (int i = 0; i < inst.machines; ++i) cost += power(load[i], inst.exponent);
            total += prob * cost;
            return;
        }
        for (const auto& [i, p] : support[j]) {
            load[i] += inst.processing[i][j].to_double();
            self(self, j + 1, prob * p);
            load[i] -= inst.processing[i][j].to_double();
        }
    };
    recurse(recurse, 0, 1.0);
    return total;
}

double expected_schedule(std::span<const double> x, const SchedulingInstance& inst,
                         std::size_t cap) {
    std::size_t outcomes = 1;
    std::vector<std::vector<std::pair<int, double>>> support(inst.jobs);  // (flat it, prob)
    for (int j = 0; j < inst.jobs; ++j) {
        for (int i = 0; i < inst.machines; ++i)
            for (int t = 0; t < inst.horizon; ++t)
                if (x[inst.var(i, j, t)] > 1e-15)
                    support[j].push_back({i * inst.horizon + t, x[inst.var(i, j, t)]});
        if (support[j].empty())
            throw std::invalid_argument("expected_rounded_cost_exact: all-zero job column");
        outcomes *= support[j].size();
        if (outcomes > cap)
            throw BudgetExceeded("expected_rounded_cost_exact: tentative draw space too large");
    }
    double total = 0.0;
    std::vector<int> machine(inst.jobs), start(inst.jobs);
    auto recurse = [&](auto&& self, int j, double prob) -> void {
        if (j == inst.jobs) {
            std::vector<std::int64_t> completion = realize_schedule(inst, machine, start);
            double cost = 0.0;
            for (int jj = 0; jj < inst.jobs; ++jj)
                cost += inst.weights[jj].to_double() *
                        power(static_cast<double>(completion[jj]), inst.exponent);
            total += prob * cost;
            return;
        }
        for (const auto& [it, p] : support[j]) {
            machine[j] = it / inst.horizon;
            start[j] = it % inst.horizon;
            self(self, j + 1, prob * p);
        }
    };
    recurse(recurse, 0, 1.0);
    return total;
}

}  // namespace

double expected_rounded_cost_exact(std::span<const double> fractional, const Instance& instance,
                                   std::size_t outcome_cap) {
    if (const auto* r = std::get_if<RoutingInstance>(&instance))
        return expected_routing(fractional, *r, outcome_cap);
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&instance))
        return expected_assignment(fractional, *lb, outcome_cap);
    if (const auto* s = std::get_if<SchedulingInstance>(&instance))
        return expected_schedule(fractional, *s, outcome_cap);
    const auto& t = std::get<TreeInstance>(instance);
    return multilinear_F_exact(fractional, t).value;
}

double evaluate_cost(const RoundedSolution& solution, const Instance& instance) {
    if (const auto* r = std::get_if<RoutingInstance>(&instance)) {
        const auto& choice = std::get<RoutingChoice>(solution.choice);
        if (static_cast<int>(choice.path_of_demand.size()) != r->num_demands())
            throw std::invalid_argument("evaluate_cost: demand count mismatch");
        std::vector<double> load(r->num_edges(), 0.0);
        for (int i = 0; i < r->num_demands(); ++i) {
            const auto& path = choice.path_of_demand[i];
            int at = r->demands[i].source;
            for (int e : path) {
                if (r->edges[e].tail != at)
                    throw std::invalid_argument("evaluate_cost: path does not connect source to target");
                at = r->edges[e].head;
                load[e] += static_cast<double>(r->demands[i].amount);
            }
            if (at != r->demands[i].target)
                throw std::invalid_argument("evaluate_cost: path does not reach the target");
        }
        return routing_cost_of_loads(*r, load);
    }
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&instance)) {
        const auto& choice = std::get<AssignmentChoice>(solution.choice);
        std::vector<double> load(lb->machines, 0.0);
        for (int j = 0; j < lb->jobs; ++j) load[choice.machine_of_job[j]] += lb->processing[choice.machine_of_job[j]][j].to_double();
        double cost = 0.0;
        for (int i = 0; i < lb->machines; ++i) cost += power(load[i], lb->exponent);
        return cost;
    }
    if (const auto* s = std::get_if<SchedulingInstance>(&instance)) {
        const auto& choice = std::get<ScheduleChoice>(solution.choice);
        std::vector<std::int64_t> completion =
            realize_schedule(*s, choice.machine_of_job, choice.tentative_start);
        double cost = 0.0;
        for (int j = 0; j < s->jobs; ++j)
            cost += s->weights[j].to_double() * power(static_cast<double>(completion[j]), s->exponent);
        return cost;
    }
    const auto& t = std::get<TreeInstance>(instance);
    const auto& choice = std::get<TreeChoice>(solution.choice);
    if (static_cast<int>(choice.tree_edges.size()) != t.num_vertices - 1 ||
        graphic_matroid_rank(t, choice.tree_edges) != t.num_vertices - 1)
        throw std::invalid_argument("evaluate_cost: edge set is not a spanning tree");
    double cost = 0.0;
    for (int v = 0; v < t.num_vertices; ++v) {
        double load = 0.0;
        for (int e : choice.tree_edges)
            if (t.edges[e].u == v || t.edges[e].v == v) load += t.edges[e].weight.to_double();
        cost += power(load, t.exponent);
    }
    return cost;
}

std::vector<double> integral_point(const RoundedSolution& solution, const Instance& instance) {
    if (const auto* r = std::get_if<RoutingInstance>(&instance)) {
        const auto& choice = std::get<RoutingChoice>(solution.choice);
        std::vector<double> x(static_cast<std::size_t>(r->num_demands()) * r->num_edges(), 0.0);
        for (int i = 0; i < r->num_demands(); ++i)
            for (int e : choice.path_of_demand[i]) x[r->var(i, e)] = 1.0;
        return x;
    }
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&instance)) {
        const auto& choice = std::get<AssignmentChoice>(solution.choice);
        std::vector<double> x(static_cast<std::size_t>(lb->machines) * lb->jobs, 0.0);
        for (int j = 0; j < lb->jobs; ++j) x[lb->var(choice.machine_of_job[j], j)] = 1.0;
        return x;
    }
    if (const auto* s = std::get_if<SchedulingInstance>(&instance)) {
        // realized starts: back-to-back in completion order
        const auto& choice = std::get<ScheduleChoice>(solution.choice);
        std::vector<double> x(static_cast<std::size_t>(s->machines) * s->jobs * s->horizon, 0.0);
        for (int j = 0; j < s->jobs; ++j) {
            int i = choice.machine_of_job[j];
            std::int64_t start = choice.completion[j] - s->processing[i][j];
            if (start < 0 || start >= s->horizon)
                throw std::invalid_argument("integral_point: realized schedule exceeds the horizon");
            x[s->var(i, j, static_cast<int>(start))] = 1.0;
        }
        return x;
    }
    const auto& t = std::get<TreeInstance>(instance);
    const auto& choice = std::get<TreeChoice>(solution.choice);
    std::vector<double> x(t.num_edges(), 0.0);
    for (int e : choice.tree_edges) x[e] = 1.0;
    return x;
}

RoundedSolution round_any(std::span<const double> fractional, const Instance& instance,
                          RngStream rng) {
    if (const auto* r = std::get_if<RoutingInstance>(&instance))
        return round_routing(fractional, *r, rng);
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&instance))
        return round_assignment(fractional, *lb, rng);
    if (const auto* s = std::get_if<SchedulingInstance>(&instance))
        return round_schedule(fractional, *s, rng);
    return pipage_round(fractional, std::get<TreeInstance>(instance)).solution;
}

TrialStats rounding_trials(std::span<const double> fractional, const Instance& instance,
                           std::uint64_t seed, int trials, ExecPolicy policy) {
    TrialStats stats;
    stats.costs.resize(trials);
    std::exception_ptr error;
    parallel_for(static_cast<std::size_t>(trials), policy, [&](std::size_t t) {
        try {
            RngStream rng(seed, t + 1);
            RoundedSolution sol = round_any(fractional, instance, rng);
            stats.costs[t] = sol.cost;
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!error) error = std::current_exception();
        }
    });
    if (error) std::rethrow_exception(error);
    stats.mean = std::accumulate(stats.costs.begin(), stats.costs.end(), 0.0) / std::max(1, trials);
    stats.max = stats.costs.empty() ? 0.0 : *std::max_element(stats.costs.begin(), stats.costs.end());
    return stats;
}

}  // namespace dscale
