#include "dscale/polytopes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "dscale/errors.hpp"

namespace dscale {

namespace {

// Pick the worst violation across a row set; fall back to box bounds.
class RowChecker {
public:
    void consider(const LinearRow& row, std::span<const double> x, double tol) {
        double v = row.violation(x);
        if (v > tol && v > worst_violation_) {
            worst_violation_ = v;
            worst_ = row;
        }
    }
    void consider_box(std::span<const double> x, double tol) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (x[j] < -tol && -x[j] > worst_violation_) {
                worst_violation_ = -x[j];
                worst_ = LinearRow{{{static_cast<int>(j), 1.0}}, lp::Sense::GE, 0.0, "x >= 0"};
            }
            if (x[j] > 1.0 + tol && x[j] - 1.0 > worst_violation_) {
                worst_violation_ = x[j] - 1.0;
                worst_ = LinearRow{{{static_cast<int>(j), 1.0}}, lp::Sense::LE, 1.0, "x <= 1"};
            }
        }
    }
    SeparationResult result() const {
        if (worst_violation_ <= 0.0) return SeparationResult{true, {}, 0.0};
        return SeparationResult{false, worst_, worst_violation_};
    }

private:
    double worst_violation_ = 0.0;
    LinearRow worst_;
};

//==========================================================================
// Routing: product of per-demand unit-flow polytopes
//==========================================================================

class FlowPolytope final : public PolytopeOracle {
public:
    explicit FlowPolytope(RoutingInstance inst) : inst_(std::move(inst)) {
        inst_.validate();
        build_rows();
    }

    int dimension() const override { return inst_.num_demands() * inst_.num_edges(); }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::vector<LinearRow> initial_rows() const override { return rows_; }

    SeparationResult separate(std::span<const double> x, double tol) const override {
        RowChecker checker;
        for (const LinearRow& row : rows_) checker.consider(row, x, tol);
        checker.consider_box(x, tol);
        return checker.result();
    }

    std::vector<double> linear_minimize(std::span<const double> cost) const override {
        for (double c : cost)
            if (c < 0.0)
                throw UnboundedDirection("flow linear_minimize: negative edge costs rejected "
                                         "(cycles would make the direction unbounded)");
        std::vector<double> x(dimension(), 0.0);
        for (int i = 0; i < inst_.num_demands(); ++i) {
            std::vector<int> path = shortest_path(i, cost);
            for (int e : path) x[inst_.var(i, e)] = 1.0;
        }
        return x;
    }

    std::vector<std::vector<double>> list_vertices(std::size_t budget) const override {
        std::vector<std::vector<std::vector<int>>> per_demand;
        for (int i = 0; i < inst_.num_demands(); ++i)
            per_demand.push_back(simple_paths(inst_.demands[i].source, inst_.demands[i].target, budget));
        std::size_t total = 1;
        for (const auto& paths : per_demand) {
            total *= paths.size();
            if (total > budget) throw BudgetExceeded("flow list_vertices: path product too large");
        }
        std::vector<std::vector<double>> out;
        std::vector<std::size_t> pick(per_demand.size(), 0);
        while (true) {
            std::vector<double> x(dimension(), 0.0);
            for (int i = 0; i < inst_.num_demands(); ++i)
                for (int e : per_demand[i][pick[i]]) x[inst_.var(i, e)] = 1.0;
            out.push_back(std::move(x));
            int k = static_cast<int>(pick.size()) - 1;
            while (k >= 0 && ++pick[k] == per_demand[k].size()) pick[k--] = 0;
            if (k < 0) break;
        }
        return out;
    }

    /// All simple s->t paths as edge-index lists (shared with flow rounding tests).
    std::vector<std::vector<int>> simple_paths(int s, int t, std::size_t budget) const {
        std::vector<std::vector<int>> out;
        std::vector<int> stack_edges;
        std::vector<char> visited(inst_.num_vertices, 0);
        dfs_paths(s, t, visited, stack_edges, out, budget);
        return out;
    }

private:
    RoutingInstance inst_;
    std::vector<LinearRow> rows_;
    std::vector<std::vector<int>> out_edges_;  // vertex -> edge ids

    void build_rows() {
        out_edges_.assign(inst_.num_vertices, {});
        for (int e = 0; e < inst_.num_edges(); ++e) out_edges_[inst_.edges[e].tail].push_back(e);

        for (int i = 0; i < inst_.num_demands(); ++i) {
            const auto& d = inst_.demands[i];
            for (int u = 0; u < inst_.num_vertices; ++u) {
                LinearRow row;
                if (u == d.source) {
                    // exactly one unit leaves the source
                    for (int e = 0; e < inst_.num_edges(); ++e)
                        if (inst_.edges[e].tail == u) row.terms.push_back({inst_.var(i, e), 1.0});
                    row.rhs = 1.0;
                    row.label = "source outflow, demand " + std::to_string(i);
                } else if (u == d.target) {
                    for (int e = 0; e < inst_.num_edges(); ++e)
                        if (inst_.edges[e].head == u) row.terms.push_back({inst_.var(i, e), 1.0});
                    row.rhs = 1.0;
                    row.label = "target inflow, demand " + std::to_string(i);
                } else {
                    for (int e = 0; e < inst_.num_edges(); ++e) {
                        if (inst_.edges[e].tail == u) row.terms.push_back({inst_.var(i, e), 1.0});
                        if (inst_.edges[e].head == u) row.terms.push_back({inst_.var(i, e), -1.0});
                    }
                    row.rhs = 0.0;
                    row.label = "conservation, demand " + std::to_string(i) + " vertex " + std::to_string(u);
                }
                row.sense = lp::Sense::EQ;
                if (!row.terms.empty()) rows_.push_back(std::move(row));
            }
            for (int e = 0; e < inst_.num_edges(); ++e)
                rows_.push_back({{{inst_.var(i, e), 1.0}}, lp::Sense::LE, 1.0,
                                 "y <= 1, demand " + std::to_string(i) + " edge " + std::to_string(e)});
        }
    }

    std::vector<int> shortest_path(int demand, std::span<const double> cost) const {
        const auto& d = inst_.demands[demand];
        int V = inst_.num_vertices;
        std::vector<double> dist(V, std::numeric_limits<double>::infinity());
        std::vector<int> via_edge(V, -1);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist[d.source] = 0.0;
        heap.push({0.0, d.source});
        while (!heap.empty()) {
            auto [dd, u] = heap.top();
            heap.pop();
            if (dd > dist[u] + 1e-15) continue;
            for (int e : out_edges_[u]) {
                double nd = dd + cost[inst_.var(demand, e)];
                int v = inst_.edges[e].head;
                if (nd < dist[v] - 1e-15) {
                    dist[v] = nd;
                    via_edge[v] = e;
                    heap.push({nd, v});
                }
            }
        }
        if (via_edge[d.target] < 0 && d.target != d.source)
            throw InfeasiblePolytope("flow linear_minimize: target unreachable");
        std::vector<int> path;
        for (int v = d.target; v != d.source;) {
            int e = via_edge[v];
            path.push_back(e);
            v = inst_.edges[e].tail;
        }
        std::reverse(path.begin(), path.end());
        return path;
    }

    void dfs_paths(int u, int t, std::vector<char>& visited, std::vector<int>& stack_edges,
                   std::vector<std::vector<int>>& out, std::size_t budget) const {
        if (out.size() > budget) throw BudgetExceeded("flow: too many simple paths");
        if (u == t) {
            out.push_back(stack_edges);
            return;
        }
        visited[u] = 1;
        for (int e : out_edges_[u]) {
            int v = inst_.edges[e].head;
            if (visited[v]) continue;
            stack_edges.push_back(e);
            dfs_paths(v, t, visited, stack_edges, out, budget);
            stack_edges.pop_back();
        }
        visited[u] = 0;
    }
};

//==========================================================================
// Assignment
//==========================================================================

class AssignmentPolytope final : public PolytopeOracle {
public:
    explicit AssignmentPolytope(LoadBalancingInstance inst) : inst_(std::move(inst)) {
        inst_.validate();
        for (int j = 0; j < inst_.jobs; ++j) {
            LinearRow row;
            for (int i = 0; i < inst_.machines; ++i) row.terms.push_back({inst_.var(i, j), 1.0});
            row.sense = lp::Sense::EQ;
            row.rhs = 1.0;
            row.label = "assign job " + std::to_string(j);
            rows_.push_back(std::move(row));
        }
    }

    int dimension() const override { return inst_.machines * inst_.jobs; }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::vector<LinearRow> initial_rows() const override { return rows_; }

    SeparationResult separate(std::span<const double> x, double tol) const override {
        RowChecker checker;
        for (const LinearRow& row : rows_) checker.consider(row, x, tol);
        checker.consider_box(x, tol);
        return checker.result();
    }

    std::vector<double> linear_minimize(std::span<const double> cost) const override {
        std::vector<double> x(dimension(), 0.0);
        for (int j = 0; j < inst_.jobs; ++j) {
            int best = 0;
            for (int i = 1; i < inst_.machines; ++i)
                if (cost[inst_.var(i, j)] < cost[inst_.var(best, j)]) best = i;
            x[inst_.var(best, j)] = 1.0;
        }
        return x;
    }

    std::vector<std::vector<double>> list_vertices(std::size_t budget) const override {
        double count = std::pow(static_cast<double>(inst_.machines), inst_.jobs);
        if (count > static_cast<double>(budget))
            throw BudgetExceeded("assignment list_vertices: m^n too large");
        std::vector<std::vector<double>> out;
        std::vector<int> assign(inst_.jobs, 0);
        while (true) {
            std::vector<double> x(dimension(), 0.0);
            for (int j = 0; j < inst_.jobs; ++j) x[inst_.var(assign[j], j)] = 1.0;
            out.push_back(std::move(x));
            int k = inst_.jobs - 1;
            while (k >= 0 && ++assign[k] == inst_.machines) assign[k--] = 0;
            if (k < 0) break;
        }
        return out;
    }

private:
    LoadBalancingInstance inst_;
    std::vector<LinearRow> rows_;
};

//==========================================================================
// Graphic matroid base polytope
//==========================================================================

class GraphicMatroidPolytope final : public PolytopeOracle {
public:
    explicit GraphicMatroidPolytope(TreeInstance inst) : inst_(std::move(inst)) {
        std::vector<int> all_edges(inst_.num_edges());
        std::iota(all_edges.begin(), all_edges.end(), 0);
        if (graphic_matroid_rank(inst_, all_edges) != inst_.num_vertices - 1)
            throw InfeasiblePolytope("matroid base polytope: graph not connected");
        inst_.validate();
        if (inst_.num_vertices > 16)
            throw BudgetExceeded("matroid separation enumerates vertex subsets; |V| <= 16 required");
        adjacency_mask_.assign(inst_.num_edges(), 0);
        for (int e = 0; e < inst_.num_edges(); ++e)
            adjacency_mask_[e] = (1u << inst_.edges[e].u) | (1u << inst_.edges[e].v);
    }

    int dimension() const override { return inst_.num_edges(); }
    Capabilities capabilities() const override { return {true, true, true}; }

    std::vector<LinearRow> initial_rows() const override {
        std::vector<LinearRow> rows;
        LinearRow total;
        for (int e = 0; e < inst_.num_edges(); ++e) total.terms.push_back({e, 1.0});
        total.sense = lp::Sense::EQ;
        total.rhs = inst_.num_vertices - 1.0;
        total.label = "base size";
        rows.push_back(std::move(total));
        for (int e = 0; e < inst_.num_edges(); ++e)
            rows.push_back({{{e, 1.0}}, lp::Sense::LE, 1.0, "rank singleton " + std::to_string(e)});
        return rows;
    }

    SeparationResult separate(std::span<const double> x, double tol) const override {
        RowChecker checker;
        double total = 0.0;
        for (int e = 0; e < inst_.num_edges(); ++e) total += x[e];
        LinearRow total_row;
        for (int e = 0; e < inst_.num_edges(); ++e) total_row.terms.push_back({e, 1.0});
        total_row.sense = lp::Sense::EQ;
        total_row.rhs = inst_.num_vertices - 1.0;
        total_row.label = "base size";
        checker.consider(total_row, x, tol);
        // Rank inequalities x(E(S)) <= |S| - 1 for connected S; disconnected
        // subsets are dominated by their components.
        int V = inst_.num_vertices;
        for (unsigned mask = 1; mask < (1u << V); ++mask) {
            int size = std::popcount(mask);
            if (size < 2 || !connected_in_induced(mask)) continue;
            LinearRow row;
            double sum = 0.0;
            for (int e = 0; e < inst_.num_edges(); ++e) {
                if ((adjacency_mask_[e] & mask) == adjacency_mask_[e]) {
                    row.terms.push_back({e, 1.0});
                    sum += x[e];
                }
            }
            if (sum - (size - 1.0) > tol) {
                row.sense = lp::Sense::LE;
                row.rhs = size - 1.0;
                row.label = "rank subset " + std::to_string(mask);
                checker.consider(row, x, tol);
            }
        }
        checker.consider_box(x, tol);
        return checker.result();
    }

    std::vector<double> linear_minimize(std::span<const double> cost) const override {
        // Kruskal greedy; handles any cost signs since a base has fixed size.
        std::vector<int> order(inst_.num_edges());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return cost[a] < cost[b]; });
        std::vector<int> parent(inst_.num_vertices);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        std::vector<double> x(inst_.num_edges(), 0.0);
        int taken = 0;
        for (int e : order) {
            int a = find(inst_.edges[e].u), b = find(inst_.edges[e].v);
            if (a == b) continue;
            parent[a] = b;
            x[e] = 1.0;
            if (++taken == inst_.num_vertices - 1) break;
        }
        if (taken != inst_.num_vertices - 1)
            throw InfeasiblePolytope("matroid linear_minimize: graph not connected");
        return x;
    }

    std::vector<std::vector<double>> list_vertices(std::size_t budget) const override {
        // All spanning trees by choosing |V|-1 edges and testing acyclicity.
        int E = inst_.num_edges(), V = inst_.num_vertices;
        std::vector<std::vector<double>> out;
        std::vector<int> combo(V - 1);
        std::iota(combo.begin(), combo.end(), 0);
        if (E < V - 1) throw InfeasiblePolytope("fewer edges than |V|-1");
        std::size_t scanned = 0;
        while (true) {
            if (++scanned > budget) throw BudgetExceeded("matroid list_vertices: too many edge subsets");
            if (is_spanning_tree(combo)) {
                std::vector<double> x(E, 0.0);
                for (int e : combo) x[e] = 1.0;
                out.push_back(std::move(x));
            }
            int k = V - 2;
            while (k >= 0 && combo[k] == E - (V - 1) + k) --k;
            if (k < 0) break;
            ++combo[k];
            for (int j = k + 1; j < V - 1; ++j) combo[j] = combo[j - 1] + 1;
        }
        return out;
    }

    /// Rank of an edge subset in the graphic matroid (used by pipage rounding).
    int rank_of_edge_set(const std::vector<int>& edge_ids) const {
        std::vector<int> parent(inst_.num_vertices);
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        int rank = 0;
        for (int e : edge_ids) {
            int a = find(inst_.edges[e].u), b = find(inst_.edges[e].v);
            if (a != b) {
                parent[a] = b;
                ++rank;
            }
        }
        return rank;
    }

    const TreeInstance& instance() const { return inst_; }

private:
    TreeInstance inst_;
    std::vector<unsigned> adjacency_mask_;

    bool connected_in_induced(unsigned mask) const {
        // BFS over vertices of mask using edges fully inside it.
        int start = std::countr_zero(mask);
        unsigned seen = 1u << start;
        std::vector<int> frontier{start};
        while (!frontier.empty()) {
            int u = frontier.back();
            frontier.pop_back();
            for (int e = 0; e < inst_.num_edges(); ++e) {
                if ((adjacency_mask_[e] & mask) != adjacency_mask_[e]) continue;
                int a = inst_.edges[e].u, b = inst_.edges[e].v;
                int other = a == u ? b : (b == u ? a : -1);
                if (other >= 0 && !(seen & (1u << other))) {
                    seen |= 1u << other;
                    frontier.push_back(other);
                }
            }
        }
        return seen == mask;
    }

    bool is_spanning_tree(const std::vector<int>& combo) const {
        return rank_of_edge_set(combo) == inst_.num_vertices - 1;
    }
};

//==========================================================================
// Time-indexed scheduling polytope
//==========================================================================

class TimeIndexedPolytope final : public PolytopeOracle {
public:
    explicit TimeIndexedPolytope(SchedulingInstance inst) : inst_(std::move(inst)) {
        inst_.validate();
        max_p_ = 0;
        for (const auto& row : inst_.processing)
            for (std::int64_t p : row) max_p_ = std::max<std::int64_t>(max_p_, p);
        build_rows();
    }

    int dimension() const override { return inst_.machines * inst_.jobs * inst_.horizon; }
    Capabilities capabilities() const override { return {true, true, true}; }
    std::vector<LinearRow> initial_rows() const override { return rows_; }

    SeparationResult separate(std::span<const double> x, double tol) const override {
        RowChecker checker;
        for (const LinearRow& row : rows_) checker.consider(row, x, tol);
        checker.consider_box(x, tol);
        return checker.result();
    }

    std::vector<double> linear_minimize(std::span<const double> cost) const override {
        // Exact minimization over integral schedules: enumerate machine
        // assignments, then place each machine's jobs by a time-subset DP.
        double combos = std::pow(static_cast<double>(inst_.machines), inst_.jobs);
        if (combos > 1e6) throw BudgetExceeded("time-indexed linear_minimize: m^n too large");
        std::vector<int> assign(inst_.jobs, 0);
        std::vector<int> best_assign;
        std::vector<std::vector<int>> best_starts;
        double best = std::numeric_limits<double>::infinity();
        while (true) {
            double total = 0.0;
            std::vector<std::vector<int>> starts(inst_.machines);
            bool ok = true;
            for (int i = 0; i < inst_.machines && ok; ++i) {
                std::vector<int> jobs_here;
                for (int j = 0; j < inst_.jobs; ++j)
                    if (assign[j] == i) jobs_here.push_back(j);
                double c = place_jobs(i, jobs_here, cost, starts[i]);
                if (!std::isfinite(c)) ok = false;
                total += c;
            }
            if (ok && total < best) {
                best = total;
                best_assign = assign;
                best_starts = starts;
            }
            int k = inst_.jobs - 1;
            while (k >= 0 && ++assign[k] == inst_.machines) assign[k--] = 0;
            if (k < 0) break;
        }
        if (!std::isfinite(best))
            throw InfeasiblePolytope("time-indexed linear_minimize: no feasible schedule in horizon");
        std::vector<double> x(dimension(), 0.0);
        for (int i = 0; i < inst_.machines; ++i) {
            int idx = 0;
            for (int j = 0; j < inst_.jobs; ++j)
                if (best_assign[j] == i) x[inst_.var(i, j, best_starts[i][idx++])] = 1.0;
        }
        return x;
    }

    std::vector<std::vector<double>> list_vertices(std::size_t budget) const override {
        std::vector<std::vector<double>> out;
        std::vector<int> machine(inst_.jobs, 0), start(inst_.jobs, 0);
        enumerate_schedules(0, machine, start, out, budget);
        return out;
    }

private:
    SchedulingInstance inst_;
    std::int64_t max_p_ = 0;
    std::vector<LinearRow> rows_;

    void build_rows() {
        for (int j = 0; j < inst_.jobs; ++j) {
            LinearRow row;
            for (int i = 0; i < inst_.machines; ++i)
                for (int t = 0; t < inst_.horizon; ++t) row.terms.push_back({inst_.var(i, j, t), 1.0});
            row.sense = lp::Sense::EQ;
            row.rhs = 1.0;
            row.label = "assign job " + std::to_string(j);
            rows_.push_back(std::move(row));
        }
        // Unit-capacity rows out to horizon + max_p - 1 so intervals started
        // late in the horizon still cannot overlap.
        for (int i = 0; i < inst_.machines; ++i) {
            for (int t = 0; t < inst_.horizon + static_cast<int>(max_p_) - 1; ++t) {
                LinearRow row;
                for (int j = 0; j < inst_.jobs; ++j) {
                    int p = static_cast<int>(inst_.processing[i][j]);
                    for (int tau = std::max(0, t - p + 1); tau <= t && tau < inst_.horizon; ++tau)
                        row.terms.push_back({inst_.var(i, j, tau), 1.0});
                }
                if (row.terms.empty()) continue;
                row.sense = lp::Sense::LE;
                row.rhs = 1.0;
                row.label = "machine " + std::to_string(i) + " time " + std::to_string(t);
                rows_.push_back(std::move(row));
            }
        }
    }

    // Min-cost placement of a machine's jobs at pairwise disjoint starts:
    // dp over (frontier time, subset already placed).
    double place_jobs(int machine, const std::vector<int>& jobs, std::span<const double> cost,
                      std::vector<int>& starts_out) const {
        int n = static_cast<int>(jobs.size());
        if (n == 0) return 0.0;
        if (n > 20) throw BudgetExceeded("time-indexed placement: too many jobs per machine");
        int T = inst_.horizon;
        int full = (1 << n) - 1;
        const double inf = std::numeric_limits<double>::infinity();
        // dp[t][mask]: min cost, all placed intervals inside [0, t)
        std::vector<std::vector<double>> dp(T + 1, std::vector<double>(full + 1, inf));
        dp[0][0] = 0.0;
        for (int t = 0; t < T; ++t) {
            for (int mask = 0; mask <= full; ++mask) {
                double cur = dp[t][mask];
                if (cur == inf) continue;
                if (cur < dp[t + 1][mask]) dp[t + 1][mask] = cur;  // idle step
                for (int a = 0; a < n; ++a) {
                    if (mask & (1 << a)) continue;
                    int j = jobs[a];
                    int p = static_cast<int>(inst_.processing[machine][j]);
                    int finish = t + p;
                    if (finish > T) continue;
                    double nc = cur + cost[inst_.var(machine, j, t)];
                    if (nc < dp[finish][mask | (1 << a)]) dp[finish][mask | (1 << a)] = nc;
                }
            }
        }
        double best = inf;
        int best_t = -1;
        for (int t = 0; t <= T; ++t)
            if (dp[t][full] < best) {
                best = dp[t][full];
                best_t = t;
            }
        if (best == inf) return inf;
        // Reconstruct starts by re-walking the DP.
        starts_out.assign(n, -1);
        int t = best_t, mask = full;
        while (mask != 0) {
            bool stepped = false;
            for (int a = 0; a < n && !stepped; ++a) {
                if (!(mask & (1 << a))) continue;
                int j = jobs[a];
                int p = static_cast<int>(inst_.processing[machine][j]);
                int start = t - p;
                if (start >= 0 && dp[start][mask ^ (1 << a)] != inf &&
                    dp[start][mask ^ (1 << a)] + cost[inst_.var(machine, j, start)] == dp[t][mask]) {
                    starts_out[a] = start;
                    mask ^= 1 << a;
                    t = start;
                    stepped = true;
                }
            }
            if (!stepped) {
                --t;  // idle step
                if (t < 0) throw InternalInvariantFailure("time-indexed DP reconstruction failed");
            }
        }
        return best;
    }

    void enumerate_schedules(int job, std::vector<int>& machine, std::vector<int>& start,
                             std::vector<std::vector<double>>& out, std::size_t budget) const {
        if (out.size() > budget) throw BudgetExceeded("time-indexed list_vertices: too many schedules");
        if (job == inst_.jobs) {
            std::vector<double> x(dimension(), 0.0);
            for (int j = 0; j < inst_.jobs; ++j) x[inst_.var(machine[j], j, start[j])] = 1.0;
            out.push_back(std::move(x));
            return;
        }
        for (int i = 0; i < inst_.machines; ++i) {
            int p = static_cast<int>(inst_.processing[i][job]);
            for (int t = 0; t + p <= inst_.horizon; ++t) {
                bool clash = false;
                for (int j2 = 0; j2 < job && !clash; ++j2) {
                    if (machine[j2] != i) continue;
                    int p2 = static_cast<int>(inst_.processing[i][j2]);
                    clash = t < start[j2] + p2 && start[j2] < t + p;
                }
                if (clash) continue;
                machine[job] = i;
                start[job] = t;
                enumerate_schedules(job + 1, machine, start, out, budget);
            }
        }
    }
};

}  // namespace

int graphic_matroid_rank(const TreeInstance& instance, std::span<const int> edge_ids) {
    std::vector<int> parent(instance.num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    int rank = 0;
    for (int e : edge_ids) {
        int a = find(instance.edges[e].u), b = find(instance.edges[e].v);
        if (a != b) {
            parent[a] = b;
            ++rank;
        }
    }
    return rank;
}

PolytopePtr flow_polytope(const RoutingInstance& instance) {
    return std::make_shared<FlowPolytope>(instance);
}
PolytopePtr assignment_polytope(const LoadBalancingInstance& instance) {
    return std::make_shared<AssignmentPolytope>(instance);
}
PolytopePtr matroid_base_polytope(const TreeInstance& instance) {
    return std::make_shared<GraphicMatroidPolytope>(instance);
}
PolytopePtr time_indexed_polytope(const SchedulingInstance& instance) {
    return std::make_shared<TimeIndexedPolytope>(instance);
}

PolytopePtr make_polytope(const Instance& instance) {
    return std::visit(
        [](const auto& inst) -> PolytopePtr {
            using T = std::decay_t<decltype(inst)>;
            if constexpr (std::is_same_v<T, RoutingInstance>) return flow_polytope(inst);
            else if constexpr (std::is_same_v<T, LoadBalancingInstance>) return assignment_polytope(inst);
            else if constexpr (std::is_same_v<T, TreeInstance>) return matroid_base_polytope(inst);
            else return time_indexed_polytope(inst);
        },
        instance);
}

}  // namespace dscale
