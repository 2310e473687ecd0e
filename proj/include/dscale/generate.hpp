#pragma once

#include <cstdint>

#include "dscale/instances.hpp"

namespace dscale {

/// Two vertices joined by n parallel unit edges, one unit demand: the family
/// whose naive convex relaxation pays n^(1-q) while the true optimum pays 1.
RoutingInstance make_parallel_gap(int n, double q);

/// Seeded random generators; identical seeds give identical instances.
RoutingInstance random_routing(std::uint64_t seed, int max_vertices, int max_extra_edges,
                               int max_demands, std::int64_t max_amount, double q);
LoadBalancingInstance random_loadbalance(std::uint64_t seed, int max_machines, int max_jobs,
                                         double q);
TreeInstance random_tree(std::uint64_t seed, int max_vertices, double q);
SchedulingInstance random_schedule(std::uint64_t seed, int max_machines, int max_jobs,
                                   int max_processing, double p);

}  // namespace dscale
