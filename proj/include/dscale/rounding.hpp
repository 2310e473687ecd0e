#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "dscale/instances.hpp"
#include "dscale/parallel.hpp"
#include "dscale/rng.hpp"

namespace dscale {

/// Flow decomposition of one demand: paths (edge-id sequences) with weights
/// lambda summing to d_i; per edge, sum of lambda over paths through it equals
/// d_i * y_{i,e}. Any cycle flow is stripped first (cost-safe: loads only drop).
struct PathDecomposition {
    struct Entry {
        std::vector<int> edges;
        double weight = 0.0;  // lambda > 0
    };
    std::vector<Entry> paths;
    double total = 0.0;  // = d_i
};

PathDecomposition decompose_flow(std::span<const double> y_edges, const RoutingInstance& graph,
                                 std::int64_t demand_amount, int source, int target,
                                 double tol = 1e-7);

struct RoutingChoice {
    std::vector<std::vector<int>> path_of_demand;  // edge ids per demand
};
struct AssignmentChoice {
    std::vector<int> machine_of_job;
};
struct ScheduleChoice {
    std::vector<int> machine_of_job;
    std::vector<int> tentative_start;
    std::vector<std::int64_t> completion;  // realized, after sequencing
};
struct TreeChoice {
    std::vector<int> tree_edges;
};

/// Integral solution plus realized cost and the seed that produced it.
struct RoundedSolution {
    std::variant<RoutingChoice, AssignmentChoice, ScheduleChoice, TreeChoice> choice;
    double cost = 0.0;
    std::uint64_t seed = 0;
};

/// One path per demand, drawn with probability lambda_{i,p} / d_i; demands use
/// independent substreams.
RoundedSolution round_routing(std::span<const double> y, const RoutingInstance& instance,
                              RngStream rng);

/// Independent per-job categorical draws over machines with probabilities x_ij.
RoundedSolution round_assignment(std::span<const double> x, const LoadBalancingInstance& instance,
                                 RngStream rng);

/// Tentative (machine, start) per job with probability x*_{ijt}; each machine
/// then runs its jobs back-to-back in nondecreasing tentative completion order
/// (ties by job index).
RoundedSolution round_schedule(std::span<const double> x, const SchedulingInstance& instance,
                               RngStream rng);

/// Multilinear extension F(x) = sum_v E[(sum_{e in delta(v)} w_e X_e)^q] under
/// independent edge inclusion.
struct MultilinearValue {
    double value = 0.0;
    double std_error = 0.0;  // 0 in exact mode
};
MultilinearValue multilinear_F_exact(std::span<const double> x, const TreeInstance& instance,
                                     int degree_cap = 20);
MultilinearValue multilinear_F_sample(std::span<const double> x, const TreeInstance& instance,
                                      int samples, RngStream rng,
                                      ExecPolicy policy = ExecPolicy::Parallel);

/// Pipage rounding in the graphic-matroid base polytope: repeatedly pick two
/// fractional elements inside a minimal tight set, move to whichever feasible
/// endpoint has the smaller F (concavity along the swap direction puts the
/// minimum at an endpoint). F never increases; the trace of F values is
/// returned for verification.
struct PipageResult {
    RoundedSolution solution;
    std::vector<double> f_trace;  // F(x^0), F(x^1), ..., F(final)
    int steps = 0;
};
PipageResult pipage_round(std::span<const double> x_star, const TreeInstance& instance);

/// Exact expectation of the rounding procedure's cost by full enumeration of
/// the independent draws (tree uses the multilinear extension directly).
double expected_rounded_cost_exact(std::span<const double> fractional, const Instance& instance,
                                   std::size_t outcome_cap = 1000000);

/// Recompute the objective from the combinatorial object.
double evaluate_cost(const RoundedSolution& solution, const Instance& instance);

/// The 0/1 point in polytope coordinates that the solution corresponds to
/// (for feasibility checks through the separation oracle).
std::vector<double> integral_point(const RoundedSolution& solution, const Instance& instance);

/// Rounding applied to whichever kind the instance holds (pipage for trees).
RoundedSolution round_any(std::span<const double> fractional, const Instance& instance,
                          RngStream rng);

/// Independent trials with per-trial derived seeds; identical output for the
/// serial and OpenMP paths.
struct TrialStats {
    std::vector<double> costs;  // by trial index
    double mean = 0.0;
    double max = 0.0;
};
TrialStats rounding_trials(std::span<const double> fractional, const Instance& instance,
                           std::uint64_t seed, int trials,
                           ExecPolicy policy = ExecPolicy::Parallel);

}  // namespace dscale
