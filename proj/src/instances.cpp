#include "dscale/instances.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

#include <json.hpp>

namespace dscale {

using ordered_json = nlohmann::ordered_json;

void RoutingInstance::validate() const {
    if (num_vertices <= 0) throw std::invalid_argument("routing: need at least one vertex");
    for (const Edge& e : edges) {
        if (e.tail < 0 || e.tail >= num_vertices || e.head < 0 || e.head >= num_vertices)
            throw std::invalid_argument("routing: edge endpoint out of range");
        if (!(e.scale >= 0.0)) throw std::invalid_argument("routing: edge scale must be >= 0");
        if (!(e.exponent >= 1.0)) throw std::invalid_argument("routing: edge exponent must be >= 1");
    }
    for (const Demand& d : demands) {
        if (d.amount < 1) throw std::invalid_argument("routing: demand amount must be >= 1");
        if (d.source == d.target) throw std::invalid_argument("routing: source equals target");
        if (d.source < 0 || d.source >= num_vertices || d.target < 0 || d.target >= num_vertices)
            throw std::invalid_argument("routing: demand endpoint out of range");
        // reachability
        std::vector<char> seen(num_vertices, 0);
        std::queue<int> q;
        q.push(d.source);
        seen[d.source] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (const Edge& e : edges)
                if (e.tail == u && !seen[e.head]) {
                    seen[e.head] = 1;
                    q.push(e.head);
                }
        }
        if (!seen[d.target]) throw std::invalid_argument("routing: target unreachable from source");
    }
}

void LoadBalancingInstance::validate() const {
    if (machines <= 0 || jobs <= 0) throw std::invalid_argument("loadbalance: need machines and jobs");
    if (static_cast<int>(processing.size()) != machines)
        throw std::invalid_argument("loadbalance: processing must have one row per machine");
    for (const auto& row : processing) {
        if (static_cast<int>(row.size()) != jobs)
            throw std::invalid_argument("loadbalance: processing row length mismatch");
        for (const Rational& p : row)
            if (p < Rational(0)) throw std::invalid_argument("loadbalance: processing times must be >= 0");
    }
    if (!(exponent >= 1.0)) throw std::invalid_argument("loadbalance: exponent must be >= 1");
}

void TreeInstance::validate() const {
    if (num_vertices <= 1) throw std::invalid_argument("tree: need at least two vertices");
    if (num_edges() < num_vertices - 1) throw std::invalid_argument("tree: |E| >= |V|-1 required");
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= num_vertices || e.v < 0 || e.v >= num_vertices || e.u == e.v)
            throw std::invalid_argument("tree: bad edge endpoints");
        if (e.weight < Rational(0)) throw std::invalid_argument("tree: edge weights must be >= 0");
    }
    if (!(exponent >= 1.0)) throw std::invalid_argument("tree: exponent must be >= 1");
    // connectivity
    std::vector<int> parent(num_vertices);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    int comps = num_vertices;
    for (const Edge& e : edges) {
        int a = find(e.u), b = find(e.v);
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    if (comps != 1) throw std::invalid_argument("tree: graph must be connected");
}

int SchedulingInstance::default_horizon() const {
    std::int64_t sum = 0;
    for (const auto& row : processing)
        for (std::int64_t p : row) sum += p;
    return static_cast<int>(sum);
}

void SchedulingInstance::validate() const {
    if (machines <= 0 || jobs <= 0) throw std::invalid_argument("schedule: need machines and jobs");
    if (static_cast<int>(processing.size()) != machines ||
        static_cast<int>(weights.size()) != jobs)
        throw std::invalid_argument("schedule: processing/weights dimensions mismatch");
    for (const auto& row : processing) {
        if (static_cast<int>(row.size()) != jobs)
            throw std::invalid_argument("schedule: processing row length mismatch");
        for (std::int64_t p : row)
            if (p < 1) throw std::invalid_argument("schedule: processing times must be integers >= 1");
    }
    for (const Rational& w : weights)
        if (w < Rational(0)) throw std::invalid_argument("schedule: weights must be >= 0");
    if (!(exponent >= 1.0)) throw std::invalid_argument("schedule: exponent must be >= 1");
    if (horizon <= 0) throw std::invalid_argument("schedule: horizon must be positive");
    if (static_cast<std::int64_t>(machines) * jobs * horizon > 2000000)
        throw std::invalid_argument("schedule: variable count exceeds desk-scale cap");
}

std::string instance_kind(const Instance& inst) {
    switch (inst.index()) {
        case 0: return "routing";
        case 1: return "loadbalance";
        case 2: return "tree";
        default: return "schedule";
    }
}

namespace {

// Doubles that are exact in decimal form (scales, exponents) travel as
// decimal strings too; parse both spellings.
double parse_decimal(const ordered_json& v, const char* what) {
    if (v.is_string()) return Rational::from_decimal_string(v.get<std::string>()).to_double();
    if (v.is_number()) return v.get<double>();
    throw std::invalid_argument(std::string("expected decimal string or number for ") + what);
}

Rational parse_rational(const ordered_json& v, const char* what) {
    if (v.is_string()) return Rational::from_decimal_string(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    throw std::invalid_argument(std::string("expected decimal string or integer for ") + what);
}

std::string format_double(double x) {
    // shortest round-trip-exact decimal
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::stod(buf) == x) break;
    }
    return buf;
}

}  // namespace

Instance parse_instance_json(const std::string& text) {
    ordered_json j = ordered_json::parse(text);
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "routing") {
        RoutingInstance inst;
        inst.num_vertices = j.at("num_vertices").get<int>();
        for (const auto& e : j.at("edges")) {
            RoutingInstance::Edge edge;
            edge.tail = e.at("tail").get<int>();
            edge.head = e.at("head").get<int>();
            edge.scale = parse_decimal(e.at("scale"), "edge scale");
            edge.exponent = parse_decimal(e.at("exponent"), "edge exponent");
            inst.edges.push_back(edge);
        }
        for (const auto& d : j.at("demands")) {
            RoutingInstance::Demand dem;
            dem.amount = d.at("amount").get<std::int64_t>();
            dem.source = d.at("source").get<int>();
            dem.target = d.at("target").get<int>();
            inst.demands.push_back(dem);
        }
        inst.validate();
        return inst;
    }
    if (kind == "loadbalance") {
        LoadBalancingInstance inst;
        inst.machines = j.at("machines").get<int>();
        inst.jobs = j.at("jobs").get<int>();
        for (const auto& row : j.at("processing")) {
            std::vector<Rational> r;
            for (const auto& p : row) r.push_back(parse_rational(p, "processing time"));
            inst.processing.push_back(std::move(r));
        }
        inst.exponent = parse_decimal(j.at("exponent"), "exponent");
        inst.validate();
        return inst;
    }
    if (kind == "tree") {
        TreeInstance inst;
        inst.num_vertices = j.at("num_vertices").get<int>();
        for (const auto& e : j.at("edges")) {
            TreeInstance::Edge edge;
            edge.u = e.at("u").get<int>();
            edge.v = e.at("v").get<int>();
            edge.weight = parse_rational(e.at("weight"), "edge weight");
            inst.edges.push_back(edge);
        }
        inst.exponent = parse_decimal(j.at("exponent"), "exponent");
        inst.validate();
        return inst;
    }
    if (kind == "schedule") {
        SchedulingInstance inst;
        inst.machines = j.at("machines").get<int>();
        inst.jobs = j.at("jobs").get<int>();
        for (const auto& row : j.at("processing")) {
            std::vector<std::int64_t> r;
            for (const auto& p : row) r.push_back(p.get<std::int64_t>());
            inst.processing.push_back(std::move(r));
        }
        for (const auto& w : j.at("weights")) inst.weights.push_back(parse_rational(w, "job weight"));
        inst.exponent = parse_decimal(j.at("exponent"), "exponent");
        inst.horizon = j.contains("horizon") ? j.at("horizon").get<int>() : inst.default_horizon();
        inst.validate();
        return inst;
    }
    throw std::invalid_argument("unknown instance kind: " + kind);
}

std::string instance_to_json(const Instance& inst) {
    ordered_json j;
    if (const auto* r = std::get_if<RoutingInstance>(&inst)) {
        j["kind"] = "routing";
        j["num_vertices"] = r->num_vertices;
        j["edges"] = ordered_json::array();
        for (const auto& e : r->edges)
            j["edges"].push_back({{"tail", e.tail},
                                  {"head", e.head},
                                  {"scale", format_double(e.scale)},
                                  {"exponent", format_double(e.exponent)}});
        j["demands"] = ordered_json::array();
        for (const auto& d : r->demands)
            j["demands"].push_back({{"amount", d.amount}, {"source", d.source}, {"target", d.target}});
    } else if (const auto* lb = std::get_if<LoadBalancingInstance>(&inst)) {
        j["kind"] = "loadbalance";
        j["machines"] = lb->machines;
        j["jobs"] = lb->jobs;
        j["processing"] = ordered_json::array();
        for (const auto& row : lb->processing) {
            ordered_json r = ordered_json::array();
            for (const auto& p : row) r.push_back(p.to_decimal_string());
            j["processing"].push_back(std::move(r));
        }
        j["exponent"] = format_double(lb->exponent);
    } else if (const auto* t = std::get_if<TreeInstance>(&inst)) {
        j["kind"] = "tree";
        j["num_vertices"] = t->num_vertices;
        j["edges"] = ordered_json::array();
        for (const auto& e : t->edges)
            j["edges"].push_back({{"u", e.u}, {"v", e.v}, {"weight", e.weight.to_decimal_string()}});
        j["exponent"] = format_double(t->exponent);
    } else if (const auto* s = std::get_if<SchedulingInstance>(&inst)) {
        j["kind"] = "schedule";
        j["machines"] = s->machines;
        j["jobs"] = s->jobs;
        j["processing"] = ordered_json::array();
        for (const auto& row : s->processing) {
            ordered_json r = ordered_json::array();
            for (std::int64_t p : row) r.push_back(p);
            j["processing"].push_back(std::move(r));
        }
        j["weights"] = ordered_json::array();
        for (const auto& w : s->weights) j["weights"].push_back(w.to_decimal_string());
        j["exponent"] = format_double(s->exponent);
        j["horizon"] = s->horizon;
    }
    return j.dump(2) + "\n";
}

std::uint64_t instance_digest(const Instance& inst) {
    std::string canon = instance_to_json(inst);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace dscale
