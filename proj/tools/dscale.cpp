// Command-line front end: solve the relaxation, round, verify against the
// enumeration oracles, run the decoupling lab, and benchmark the parallel
// kernels. JSON reports go to stdout, human-readable summaries to stderr.
// Exit codes: 0 success, 2 validation failure, 3 theoretical bound violated.
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dscale/cxlab.hpp"
#include "dscale/errors.hpp"
#include "dscale/generate.hpp"
#include "dscale/moments.hpp"
#include "dscale/oracles.hpp"
#include "dscale/relaxation.hpp"
#include "dscale/rounding.hpp"
#include "dscale/term.hpp"

using ordered_json = nlohmann::ordered_json;
using namespace dscale;

namespace {

constexpr int kExitValidation = 2;

std::string g_command_echo;

// Budget caps default from the environment (desk-scale guards).
std::size_t env_cap(const char* name, std::size_t fallback) {
    const char* v = std::getenv(name);
    if (!v) return fallback;
    return static_cast<std::size_t>(std::strtoull(v, nullptr, 10));
}
constexpr int kExitBoundViolated = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Instance load_instance(const std::string& path, const std::string& expected_kind) {
    Instance inst = parse_instance_json(read_file(path));
    if (!expected_kind.empty() && instance_kind(inst) != expected_kind)
        throw std::invalid_argument("instance kind '" + instance_kind(inst) +
                                    "' does not match --kind " + expected_kind);
    return inst;
}

double instance_exponent(const Instance& inst) {
    if (const auto* r = std::get_if<RoutingInstance>(&inst)) {
        double q = 1.0;
        for (const auto& e : r->edges) q = std::max(q, e.exponent);
        return q;
    }
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&inst)) return lb->exponent;
    if (const auto* t = std::get_if<TreeInstance>(&inst)) return t->exponent;
    return std::get<SchedulingInstance>(inst).exponent;
}

// A_q (or 2^p A_p for scheduling): the expected-cost guarantee of rounding.
double theoretical_bound(const Instance& inst) {
    double q = instance_exponent(inst);
    double a_q = fractional_bell(q, 1e-9);
    if (std::holds_alternative<SchedulingInstance>(inst)) return std::pow(2.0, q) * a_q;
    return a_q;
}

std::string bound_name(const Instance& inst) {
    if (std::holds_alternative<SchedulingInstance>(inst)) return "2^p A_p";
    if (std::holds_alternative<LoadBalancingInstance>(inst)) return "A_q (A_q^{1/q} in norm)";
    return "A_q";
}

int cmd_moments(double q, bool table, double q_min, double q_max, double step) {
    if (table) {
        for (double v = q_min; v <= q_max + 1e-12; v += step)
            std::cout << v << "\t" << fractional_bell(v, 1e-9) << "\n";
        return 0;
    }
    char buf[64];
    snprintf(buf, sizeof buf, "%.6f", fractional_bell(q, 1e-9));
    std::cout << buf << "\n";
    return 0;
}

ordered_json solve_report(const Instance& inst, const SolveResult& result) {
    ordered_json rep;
    rep["command"] = g_command_echo;
    rep["kind"] = instance_kind(inst);
    rep["instance_digest"] = instance_digest(inst);
    rep["lp_value"] = result.lp_value;
    rep["lower_bound"] = result.lower_bound;
    rep["y_vector"] = result.y;
    ordered_json per_term = ordered_json::array();
    for (const auto& t : result.terms) per_term.push_back(t.value);
    rep["per_term_values"] = per_term;
    rep["timings"] = {{"solve_seconds", result.wall_seconds},
                      {"master_iterations", result.master_iterations}};
    return rep;
}

int cmd_solve(const std::string& kind, const std::string& input, double eps, bool serial) {
    Instance inst = load_instance(input, kind);
    ProblemInstance prob = build_problem(inst);
    SolveResult result =
        solve_relaxation(prob, eps, {}, serial ? ExecPolicy::Serial : ExecPolicy::Parallel);
    std::cout << solve_report(inst, result).dump(2) << "\n";
    std::cerr << "lp_value " << result.lp_value << "  lower_bound " << result.lower_bound
              << "  iterations " << result.master_iterations << "\n";
    return 0;
}

struct FractionalReport {
    std::vector<double> y;
    double lp_value = 0.0;
};

FractionalReport load_fractional(const std::string& path, int expected_dim) {
    ordered_json j = ordered_json::parse(read_file(path));
    FractionalReport rep;
    for (const auto& v : j.at("y_vector")) rep.y.push_back(v.get<double>());
    if (static_cast<int>(rep.y.size()) != expected_dim)
        throw std::invalid_argument("fractional vector length mismatch");
    rep.lp_value = j.value("lp_value", 0.0);
    return rep;
}

int cmd_round(const std::string& kind, const std::string& input, const std::string& fractional,
              std::uint64_t seed, int trials, int jobs) {
    Instance inst = load_instance(input, kind);
    ProblemInstance prob = build_problem(inst);
    FractionalReport frac = load_fractional(fractional, prob.num_vars);
    ExecPolicy policy = jobs == 1 ? ExecPolicy::Serial : ExecPolicy::Parallel;
    auto t0 = std::chrono::steady_clock::now();
    TrialStats stats = rounding_trials(frac.y, inst, seed, trials, policy);
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    ordered_json rep;
    rep["command"] = g_command_echo;
    rep["kind"] = instance_kind(inst);
    rep["instance_digest"] = instance_digest(inst);
    rep["seed"] = seed;
    rep["lp_value"] = frac.lp_value;
    rep["trials"] = stats.costs;
    rep["mean_cost"] = stats.mean;
    rep["max_cost"] = stats.max;
    rep["ratio"] = frac.lp_value > 0.0 ? stats.mean / frac.lp_value : 1.0;
    rep["bound_name"] = bound_name(inst);
    rep["bound_value"] = theoretical_bound(inst);
    if (const auto* lb = std::get_if<LoadBalancingInstance>(&inst)) {
        // both the sum of load^q and its q-th root
        rep["mean_cost_norm"] = std::pow(stats.mean, 1.0 / lb->exponent);
        rep["lp_value_norm"] = std::pow(frac.lp_value, 1.0 / lb->exponent);
    }
    rep["timings"] = {{"round_seconds", seconds}};
    std::cout << rep.dump(2) << "\n";
    std::cerr << trials << " trials  mean " << stats.mean << "  max " << stats.max << "\n";
    return 0;
}

int cmd_verify(const std::string& kind, const std::string& input, double eps, std::uint64_t seed,
               bool oracle, bool exact, int trials) {
    Instance inst = load_instance(input, kind);
    ProblemInstance prob = build_problem(inst);
    SolveResult lp = solve_relaxation(prob, eps);

    ordered_json rep;
    rep["command"] = g_command_echo;
    rep["kind"] = instance_kind(inst);
    rep["instance_digest"] = instance_digest(inst);
    rep["seed"] = seed;
    rep["lp_solver_value"] = lp.lp_value;
    rep["lower_bound"] = lp.lower_bound;

    ExhaustiveBudget budget{env_cap("DSCALE_MAX_ENUMERATION", 10000000)};
    double reference_lp = lp.lp_value;
    if (oracle) {
        double explicit_lp = explicit_lp_opt(prob, budget);
        BruteForceResult opt = brute_force_opt(prob, budget);
        rep["lp"] = explicit_lp;
        rep["opt"] = opt.value;
        reference_lp = explicit_lp;
    }

    double expected_cost;
    double allowance = 1e-7;
    if (exact) {
        expected_cost = expected_rounded_cost_exact(lp.y, inst,
                                                    env_cap("DSCALE_OUTCOME_CAP", 1000000));
        rep["expected_alg_cost"] = expected_cost;
        rep["expected_mode"] = "exact";
    } else {
        TrialStats stats = rounding_trials(lp.y, inst, seed, trials);
        expected_cost = stats.mean;
        double var = 0.0;
        for (double c : stats.costs) var += (c - stats.mean) * (c - stats.mean);
        double std_error = trials > 1 ? std::sqrt(var / trials / (trials - 1.0)) : 0.0;
        allowance += 4.0 * std_error;  // Monte Carlo noise, not a bound violation
        rep["expected_alg_cost"] = expected_cost;
        rep["expected_mode"] = "monte-carlo";
        rep["trials"] = trials;
        rep["std_error"] = std_error;
    }

    double bound = theoretical_bound(inst);
    double ratio = reference_lp > 0.0 ? expected_cost / reference_lp : 1.0;
    bool pass = expected_cost <= bound * reference_lp + allowance || reference_lp == 0.0;
    rep["ratio"] = ratio;
    rep["bound_name"] = bound_name(inst);
    rep["bound_value"] = bound;
    rep["pass"] = pass;
    std::cout << rep.dump(2) << "\n";
    std::cerr << "E[cost] " << expected_cost << "  lp " << reference_lp << "  ratio " << ratio
              << "  bound " << bound << (pass ? "  PASS" : "  BOUND VIOLATED") << "\n";
    return pass ? 0 : kExitBoundViolated;
}

int cmd_decoupling(int corpus_size, const std::vector<double>& qs, std::uint64_t seed,
                   std::int64_t tightness_n, double tightness_q, bool serial) {
    ordered_json rep;
    if (tightness_n > 0) {
        TightnessConstruction t = tightness_construction(tightness_n);
        double moment = t.sum_x.moment(tightness_q);
        double target = fractional_bell(tightness_q, 1e-9);
        rep["mode"] = "tightness";
        rep["n"] = tightness_n;
        rep["q"] = tightness_q;
        rep["moment"] = moment;
        rep["closed_form_second_moment"] = t.second_moment_closed_form;
        rep["a_q"] = target;
        rep["moment_over_a_q"] = moment / target;
    } else {
        CorpusConfig cfg;
        cfg.size = corpus_size;
        if (!qs.empty()) cfg.q_values = qs;
        cfg.seed = seed;
        CorpusReport corpus =
            run_decoupling_corpus(cfg, serial ? ExecPolicy::Serial : ExecPolicy::Parallel);
        rep["mode"] = "corpus";
        rep["items"] = corpus.items;
        rep["seed"] = corpus.seed;
        rep["q_values"] = cfg.q_values;
        rep["norm_violations"] = corpus.norm_violations;
        rep["cx_violations"] = corpus.cx_violations;
        rep["worst_norm_slack"] = corpus.worst_norm_slack;
        rep["worst_cx_slack"] = corpus.worst_cx_slack;
        rep["worst_cx_witness_threshold"] = corpus.worst_cx_witness;
        rep["worst_cx_item"] = corpus.worst_cx_item;
        std::cerr << corpus.items << " joints checked, " << corpus.norm_violations
                  << " norm violations, " << corpus.cx_violations << " cx violations\n";
        if (corpus.norm_violations || corpus.cx_violations) {
            std::cout << rep.dump(2) << "\n";
            return kExitBoundViolated;
        }
    }
    std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_generate(const std::string& kind, const std::string& family, int n, double q,
                 std::uint64_t seed, const std::string& out) {
    Instance inst;
    if (family == "parallel-gap") {
        inst = make_parallel_gap(n, q);
    } else if (kind == "routing") {
        inst = random_routing(seed, 6, 6, 3, 3, q);
    } else if (kind == "loadbalance") {
        inst = random_loadbalance(seed, 3, 5, q);
    } else if (kind == "tree") {
        inst = random_tree(seed, 6, q);
    } else if (kind == "schedule") {
        inst = random_schedule(seed, 2, 4, 3, q);
    } else {
        throw std::invalid_argument("unknown kind: " + kind);
    }
    std::string text = instance_to_json(inst);
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(out);
        if (!f) throw std::invalid_argument("cannot write file: " + out);
        f << text;
    }
    return 0;
}

template <typename Fn>
double time_seconds(Fn&& fn) {
    auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int cmd_bench() {
    std::cerr << "threads available: " << hardware_threads() << "\n";
    ordered_json rep = ordered_json::array();
    auto row = [&](const std::string& name, double serial, double parallel) {
        rep.push_back({{"kernel", name},
                       {"serial_seconds", serial},
                       {"parallel_seconds", parallel},
                       {"speedup", serial / std::max(parallel, 1e-12)}});
        std::cerr << name << ": serial " << serial << "s, openmp " << parallel << "s, speedup "
                  << serial / std::max(parallel, 1e-12) << "\n";
    };

    {
        CorpusConfig cfg;
        cfg.size = 600;
        CorpusReport a, b;
        double ts = time_seconds([&] { a = run_decoupling_corpus(cfg, ExecPolicy::Serial); });
        double tp = time_seconds([&] { b = run_decoupling_corpus(cfg, ExecPolicy::Parallel); });
        if (a.worst_norm_slack != b.worst_norm_slack)
            throw InternalInvariantFailure("bench: corpus results differ between paths");
        row("decoupling corpus (600 joints)", ts, tp);
    }
    {
        Instance inst = random_loadbalance(7, 3, 5, 2.0);
        ProblemInstance prob = build_problem(inst);
        SolveResult lp = solve_relaxation(prob, 0.01);
        TrialStats a, b;
        double ts =
            time_seconds([&] { a = rounding_trials(lp.y, inst, 11, 20000, ExecPolicy::Serial); });
        double tp =
            time_seconds([&] { b = rounding_trials(lp.y, inst, 11, 20000, ExecPolicy::Parallel); });
        if (a.mean != b.mean)
            throw InternalInvariantFailure("bench: trial results differ between paths");
        row("rounding trials (20000)", ts, tp);
    }
    {
        Instance inst = random_tree(3, 6, 2.0);
        const auto& tree = std::get<TreeInstance>(inst);
        std::vector<double> x(tree.num_edges(), 0.5);
        MultilinearValue a, b;
        double ts = time_seconds(
            [&] { a = multilinear_F_sample(x, tree, 200000, RngStream(5), ExecPolicy::Serial); });
        double tp = time_seconds(
            [&] { b = multilinear_F_sample(x, tree, 200000, RngStream(5), ExecPolicy::Parallel); });
        if (a.value != b.value)
            throw InternalInvariantFailure("bench: sampled F differs between paths");
        row("multilinear F sampling (200000)", ts, tp);
    }
    std::cout << rep.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"LP-relaxation framework for diseconomy-of-scale minimization"};
    app.require_subcommand(1);

    auto* moments_cmd = app.add_subcommand("moments", "fractional Bell numbers A_q");
    double q = 2.0;
    std::vector<double> table_args;
    moments_cmd->add_option("--q", q, "exponent q >= 1");
    moments_cmd->add_option("--table", table_args, "q_min q_max step")->expected(3);

    auto* solve_cmd = app.add_subcommand("solve", "solve the LP relaxation");
    std::string kind, input, fractional, out, family;
    double eps = 0.01;
    std::uint64_t seed = 1;
    bool serial = false, oracle = false, exact = false;
    int trials = 100, jobs = 0, gap_n = 4;
    solve_cmd->add_option("--kind", kind, "routing|loadbalance|schedule|tree");
    solve_cmd->add_option("--input", input)->required();
    solve_cmd->add_option("--eps", eps, "relative optimality gap");
    solve_cmd->add_option("--seed", seed);
    solve_cmd->add_flag("--serial", serial, "disable the OpenMP paths");

    auto* round_cmd = app.add_subcommand("round", "randomized rounding trials");
    round_cmd->add_option("--kind", kind);
    round_cmd->add_option("--input", input)->required();
    round_cmd->add_option("--fractional", fractional, "report file from solve")->required();
    round_cmd->add_option("--seed", seed);
    round_cmd->add_option("--trials", trials);
    round_cmd->add_option("--jobs", jobs, "1 forces the serial path");

    auto* verify_cmd = app.add_subcommand("verify", "check rounding against the bound");
    verify_cmd->add_option("--kind", kind);
    verify_cmd->add_option("--input", input)->required();
    verify_cmd->add_option("--eps", eps);
    verify_cmd->add_option("--seed", seed);
    verify_cmd->add_flag("--oracle", oracle, "run the enumeration oracles too");
    verify_cmd->add_flag("--exact", exact, "exact expectation instead of Monte Carlo");
    verify_cmd->add_option("--trials", trials);

    auto* dec_cmd = app.add_subcommand("decoupling", "decoupling-inequality lab");
    int corpus_size = 1000;
    std::int64_t tightness_n = 0;
    std::vector<double> dec_q;
    dec_cmd->add_option("--corpus-size", corpus_size);
    dec_cmd->add_option("--q", dec_q, "q values");
    dec_cmd->add_option("--seed", seed);
    dec_cmd->add_option("--tightness", tightness_n, "run the tightness construction at this n");
    dec_cmd->add_flag("--serial", serial);

    auto* gen_cmd = app.add_subcommand("generate", "emit a random valid instance");
    gen_cmd->add_option("--kind", kind);
    gen_cmd->add_option("--family", family, "parallel-gap for the integrality-gap family");
    gen_cmd->add_option("--n", gap_n, "parallel-gap path count");
    gen_cmd->add_option("--q", q, "cost exponent");
    gen_cmd->add_option("--seed", seed);
    gen_cmd->add_option("--out", out, "output path (stdout if omitted)");

    app.add_subcommand("bench", "compare serial and OpenMP kernel paths");

    CLI11_PARSE(app, argc, argv);
    for (int i = 0; i < argc; ++i) {
        if (i) g_command_echo += " ";
        g_command_echo += argv[i];
    }

    try {
        if (moments_cmd->parsed()) {
            bool table = table_args.size() == 3;
            return cmd_moments(q, table, table ? table_args[0] : 0, table ? table_args[1] : 0,
                               table ? table_args[2] : 1);
        }
        if (solve_cmd->parsed()) return cmd_solve(kind, input, eps, serial);
        if (round_cmd->parsed()) return cmd_round(kind, input, fractional, seed, trials, jobs);
        if (verify_cmd->parsed()) return cmd_verify(kind, input, eps, seed, oracle, exact, trials);
        if (dec_cmd->parsed())
            return cmd_decoupling(corpus_size, dec_q, seed, tightness_n,
                                  dec_q.empty() ? 2.0 : dec_q.front(), serial);
        if (gen_cmd->parsed()) return cmd_generate(kind, family, gap_n, q, seed, out);
        return cmd_bench();
    } catch (const BudgetExceeded& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
