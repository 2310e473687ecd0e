#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dscale/rational.hpp"

namespace dscale {

/// Directed multigraph routing with per-edge power costs c_e * load^q_e.
struct RoutingInstance {
    struct Edge {
        int tail = 0, head = 0;
        double scale = 1.0;     // c_e >= 0
        double exponent = 2.0;  // q_e >= 1
    };
    struct Demand {
        std::int64_t amount = 1;  // d_i >= 1, integral
        int source = 0, target = 0;
    };
    int num_vertices = 0;
    std::vector<Edge> edges;  // parallel edges stay distinct
    std::vector<Demand> demands;

    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_demands() const { return static_cast<int>(demands.size()); }
    // variable layout: y[(demand i) * |E| + e]
    int var(int demand, int edge) const { return demand * num_edges() + edge; }

    void validate() const;
};

/// Unrelated machines, minimize sum of load^q (the l_q norm is its q-th root).
struct LoadBalancingInstance {
    int machines = 0, jobs = 0;
    std::vector<std::vector<Rational>> processing;  // [machine][job], >= 0
    double exponent = 2.0;                          // q >= 1

    // variable layout: x[machine * jobs + job]
    int var(int machine, int job) const { return machine * jobs + job; }

    void validate() const;
};

/// Spanning tree minimizing sum over vertices of (weighted degree)^q.
struct TreeInstance {
    struct Edge {
        int u = 0, v = 0;
        Rational weight;  // w_e >= 0
    };
    int num_vertices = 0;
    std::vector<Edge> edges;
    double exponent = 2.0;

    int num_edges() const { return static_cast<int>(edges.size()); }
    void validate() const;  // connectivity included
};

/// Time-indexed scheduling minimizing sum of w_j * C_j^p.
struct SchedulingInstance {
    int machines = 0, jobs = 0;
    std::vector<std::vector<std::int64_t>> processing;  // [machine][job], >= 1 integral
    std::vector<Rational> weights;                      // per job, >= 0
    double exponent = 1.0;                              // p >= 1
    int horizon = 0;                                    // defaults to sum of all p_ij

    int default_horizon() const;
    // variable layout: x[(machine * jobs + job) * horizon + t]
    int var(int machine, int job, int t) const { return (machine * jobs + job) * horizon + t; }

    void validate() const;
};

using Instance = std::variant<RoutingInstance, LoadBalancingInstance, TreeInstance, SchedulingInstance>;

std::string instance_kind(const Instance& inst);

/// UTF-8 JSON with a top-level "kind" discriminator; integers for d_i and
/// p_ij, decimal strings for weights. Serialization is canonical (fixed key
/// order) so replays are byte-identical and digests are stable.
Instance parse_instance_json(const std::string& text);
std::string instance_to_json(const Instance& inst);

/// FNV-1a over the canonical serialization.
std::uint64_t instance_digest(const Instance& inst);

}  // namespace dscale
