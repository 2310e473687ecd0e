#pragma once

#include <span>

#include "dscale/instances.hpp"
#include "dscale/polytope.hpp"

namespace dscale {

/// Per-demand unit flow products: conservation (one unit leaves each source,
/// one enters each target) over y_{i,e} in [0,1].
PolytopePtr flow_polytope(const RoutingInstance& instance);

/// Each job assigned to exactly one machine.
PolytopePtr assignment_polytope(const LoadBalancingInstance& instance);

/// Base polytope of the graphic matroid; separation enumerates connected
/// vertex subsets (|V| <= 16).
PolytopePtr matroid_base_polytope(const TreeInstance& instance);

/// Time-indexed scheduling: every job gets one (machine, start), at most one
/// job per machine per unit time.
PolytopePtr time_indexed_polytope(const SchedulingInstance& instance);

/// Oracle for whichever kind the instance holds.
PolytopePtr make_polytope(const Instance& instance);

/// Rank of an edge subset in the graphic matroid (shared with pipage rounding).
int graphic_matroid_rank(const TreeInstance& instance, std::span<const int> edge_ids);

}  // namespace dscale
