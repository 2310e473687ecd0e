#include "dscale/generate.hpp"

#include <algorithm>

#include "dscale/rng.hpp"

namespace dscale {

RoutingInstance make_parallel_gap(int n, double q) {
    RoutingInstance inst;
    inst.num_vertices = 2;
    for (int e = 0; e < n; ++e) inst.edges.push_back({0, 1, 1.0, q});
    inst.demands.push_back({1, 0, 1});
    inst.validate();
    return inst;
}

RoutingInstance random_routing(std::uint64_t seed, int max_vertices, int max_extra_edges,
                               int max_demands, std::int64_t max_amount, double q) {
    RngStream rng(seed);
    RoutingInstance inst;
    inst.num_vertices = 3 + static_cast<int>(rng.next_below(std::max(1, max_vertices - 2)));
    const double scales[] = {0.5, 1.0, 1.0, 1.5, 2.0};
    // Forward backbone 0 -> 1 -> ... -> V-1 keeps later vertices reachable.
    for (int v = 0; v + 1 < inst.num_vertices; ++v)
        inst.edges.push_back({v, v + 1, scales[rng.next_below(5)], q});
    int extra = static_cast<int>(rng.next_below(max_extra_edges + 1));
    for (int e = 0; e < extra; ++e) {
        int a = static_cast<int>(rng.next_below(inst.num_vertices));
        int b = static_cast<int>(rng.next_below(inst.num_vertices));
        if (a == b) continue;
        inst.edges.push_back({a, b, scales[rng.next_below(5)], q});
    }
    int demands = 1 + static_cast<int>(rng.next_below(max_demands));
    for (int i = 0; i < demands; ++i) {
        int s = static_cast<int>(rng.next_below(inst.num_vertices - 1));
        int t = s + 1 + static_cast<int>(rng.next_below(inst.num_vertices - s - 1));
        inst.demands.push_back({1 + static_cast<std::int64_t>(rng.next_below(max_amount)), s, t});
    }
    inst.validate();
    return inst;
}

LoadBalancingInstance random_loadbalance(std::uint64_t seed, int max_machines, int max_jobs,
                                         double q) {
    RngStream rng(seed);
    LoadBalancingInstance inst;
    inst.machines = 1 + static_cast<int>(rng.next_below(max_machines));
    inst.jobs = 1 + static_cast<int>(rng.next_below(max_jobs));
    inst.exponent = q;
    for (int i = 0; i < inst.machines; ++i) {
        std::vector<Rational> row;
        for (int j = 0; j < inst.jobs; ++j) {
            std::int64_t num = static_cast<std::int64_t>(rng.next_below(9));  // 0..8
            std::int64_t den = 1 + static_cast<std::int64_t>(rng.next_below(2));
            row.push_back(Rational(num, den * 2));
        }
        inst.processing.push_back(std::move(row));
    }
    inst.validate();
    return inst;
}

TreeInstance random_tree(std::uint64_t seed, int max_vertices, double q) {
    RngStream rng(seed);
    TreeInstance inst;
    inst.num_vertices = 3 + static_cast<int>(rng.next_below(std::max(1, max_vertices - 2)));
    inst.exponent = q;
    auto weight = [&]() {
        return Rational(1 + static_cast<std::int64_t>(rng.next_below(8)),
                        1 + static_cast<std::int64_t>(rng.next_below(2)));
    };
    // Random spanning tree first, extra edges after.
    for (int v = 1; v < inst.num_vertices; ++v)
        inst.edges.push_back({static_cast<int>(rng.next_below(v)), v, weight()});
    int extra = static_cast<int>(rng.next_below(inst.num_vertices + 1));
    for (int e = 0; e < extra; ++e) {
        int a = static_cast<int>(rng.next_below(inst.num_vertices));
        int b = static_cast<int>(rng.next_below(inst.num_vertices));
        if (a == b) continue;
        inst.edges.push_back({std::min(a, b), std::max(a, b), weight()});
    }
    inst.validate();
    return inst;
}

SchedulingInstance random_schedule(std::uint64_t seed, int max_machines, int max_jobs,
                                   int max_processing, double p) {
    RngStream rng(seed);
    SchedulingInstance inst;
    inst.machines = 1 + static_cast<int>(rng.next_below(max_machines));
    inst.jobs = 1 + static_cast<int>(rng.next_below(max_jobs));
    inst.exponent = p;
    for (int i = 0; i < inst.machines; ++i) {
        std::vector<std::int64_t> row;
        for (int j = 0; j < inst.jobs; ++j)
            row.push_back(1 + static_cast<std::int64_t>(rng.next_below(max_processing)));
        inst.processing.push_back(std::move(row));
    }
    for (int j = 0; j < inst.jobs; ++j)
        inst.weights.push_back(Rational(1 + static_cast<std::int64_t>(rng.next_below(6)),
                                        1 + static_cast<std::int64_t>(rng.next_below(2))));
    inst.horizon = inst.default_horizon();
    inst.validate();
    return inst;
}

}  // namespace dscale
