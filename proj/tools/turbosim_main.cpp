// turbosim: power-budgeted turbo frequency assignment. Solves single
// instances, replays utilization traces against governor/arbiter pairs,
// compares arbiters, and benchmarks solver scaling.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "turbosim/errors.hpp"
#include "turbosim/kernels.hpp"
#include "turbosim/sim.hpp"
#include "turbosim/solver.hpp"
#include "turbosim/spec_io.hpp"
#include "turbosim/trace_io.hpp"

namespace {

using namespace turbosim;

std::string fmt_watts(double w) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", w);
    return buf;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open file: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write file: " + path.string());
    f << text;
}

kernels::Impl kernel_from_name(const std::string& name) {
    if (name == "auto") return kernels::Impl::auto_detect;
    if (name == "scalar") return kernels::Impl::scalar;
    if (name == "avx2") return kernels::Impl::avx2;
    throw ParseError("unknown kernel: " + name);
}

ArbiterKind arbiter_from_name(const std::string& name) {
    if (name == "baseline" || name == "baseline_hard_limit") return ArbiterKind::baseline_hard_limit;
    if (name == "optimal" || name == "optimal_mckp") return ArbiterKind::optimal_mckp;
    if (name == "greedy" || name == "greedy_mckp") return ArbiterKind::greedy_mckp;
    throw ParseError("unknown arbiter: " + name);
}

const char* arbiter_name(ArbiterKind kind) {
    switch (kind) {
        case ArbiterKind::baseline_hard_limit: return "baseline_hard_limit";
        case ArbiterKind::optimal_mckp: return "optimal_mckp";
        case ArbiterKind::greedy_mckp: return "greedy_mckp";
    }
    return "unknown";
}

std::map<int, int> parse_bin_table_flag(const std::string& text) {
    std::map<int, int> table;
    std::stringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        const auto colon = entry.find(':');
        if (colon == std::string::npos) throw ParseError("bad --bins entry: " + entry);
        table[std::stoi(entry.substr(0, colon))] = std::stoi(entry.substr(colon + 1));
    }
    if (table.empty()) throw ParseError("--bins needs at least one n:bins entry");
    int prev = -1;
    for (const auto& [n, bins] : table) {
        if (n < 1 || bins < 0) throw ParseError("--bins entries must map core counts >= 1 to bins >= 0");
        if (prev >= 0 && bins > prev) throw ParseError("--bins must be non-increasing in the core count");
        prev = bins;
    }
    return table;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) out.push_back(std::stoi(entry));
    if (out.empty()) throw ParseError("empty list");
    return out;
}

// ---------------------------------------------------------------------------
// solve

struct SolveFlags {
    std::string spec_path;
    int active = -1;  // -1 = all cores
    double budget = 0;
    std::string method = "exact";
    int granularity = 1;
};

int cmd_solve(const SolveFlags& flags) {
    const LoadedSpec loaded = load_processor_spec(flags.spec_path);
    const ProcessorSpec& spec = loaded.spec;

    const int n_active = flags.active < 0 ? spec.n_cores : flags.active;
    if (n_active < 0 || n_active > spec.n_cores)
        throw ValidationError("--active outside 0..n_cores");
    std::vector<int> cores(static_cast<size_t>(n_active));
    std::iota(cores.begin(), cores.end(), 0);

    Watts budget = flags.budget > 0 ? flags.budget
                                    : loaded.defaults.budget_watts.value_or(spec.pow_max_watts);

    if (flags.method == "lookup") {
        if (!spec.power.lookup.has_value())
            throw ValidationError("spec file carries no lookup table");
        const auto choice = solve_lookup_uniform(*spec.power.lookup, n_active, budget);
        if (!choice.has_value()) {
            std::cerr << "error: infeasible: no uniform turbo level fits the budget\n";
            return 2;
        }
        std::cout << "core_id,chosen_khz,watts\n";
        for (int core = 0; core < n_active; ++core)
            std::cout << core << ',' << choice->freq_khz << ','
                      << fmt_watts(choice->table_watts / n_active) << '\n';
        std::cout << "objective_khz=" << choice->freq_khz * n_active
                  << " total_watts=" << fmt_watts(choice->table_watts)
                  << " budget_watts=" << fmt_watts(budget) << '\n';
        std::cout << "method=lookup level_khz=" << choice->freq_khz << " n_active=" << n_active << '\n';
        return 0;
    }

    SolveRequest req(spec, std::move(cores), budget, flags.granularity);
    SolveResult result;
    if (flags.method == "exact")
        result = solve_exact_dp(req);
    else if (flags.method == "greedy")
        result = solve_greedy(req);
    else if (flags.method == "oracle")
        result = solve_brute_force(req);
    else
        throw ParseError("unknown --method: " + flags.method);

    std::cout << "core_id,chosen_khz,watts\n";
    for (const auto& choice : result.assignment.choices) {
        const int level = spec.ladder.guaranteed_index + choice.turbo_rank;
        std::cout << choice.core_id << ',' << spec.ladder.levels[static_cast<size_t>(level)].freq_khz
                  << ',' << fmt_watts(spec.power.per_core_watts[static_cast<size_t>(level)]) << '\n';
    }
    std::cout << "objective_khz=" << result.objective_khz
              << " total_watts=" << fmt_watts(result.assignment.total_watts)
              << " budget_watts=" << fmt_watts(budget) << '\n';
    std::cout << "method=" << flags.method << " optimal=" << (result.optimal ? "true" : "false")
              << " kernel=" << kernels::impl_name(kernels::active()) << " n_active=" << n_active
              << " granularity_deciwatts=" << flags.granularity << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// simulate / compare

struct SimFlags {
    std::string spec_path;
    std::string trace_path;
    std::string out_dir;
    std::string governor;       // empty = spec default / ondemand
    Khz userspace_khz = 0;
    double up_threshold = -1;
    double down_threshold = -1;
    std::string arbiter;        // empty = spec default / baseline
    std::string bins;
    Khz cap_khz = -1;           // -1 = keep default
    double budget = 0;
    double tick_seconds = 1.0;
    std::uint64_t seed = 0;
    std::string turbo = "on";
    double idle_threshold = 0.0;
    int granularity = 1;
};

SimConfig make_config(const LoadedSpec& loaded, const SimFlags& flags, const std::string& arbiter_override,
                      Khz cap_override) {
    SimConfig config;
    config.spec = loaded.spec;
    config.policy = loaded.defaults.governor.value_or(GovernorPolicy{});
    config.arbiter = loaded.defaults.arbiter.value_or(TurboArbiter{ArbiterKind::baseline_hard_limit,
                                                                   TurboArbiter::default_bin_table(), 0});
    config.budget_watts = flags.budget > 0 ? flags.budget : loaded.defaults.budget_watts.value_or(0);
    config.tick_seconds = flags.tick_seconds;
    config.rng_seed = flags.seed;
    config.idle_sleep_threshold = flags.idle_threshold;
    config.granularity_deciwatts = flags.granularity;

    if (flags.turbo == "on")
        config.turbo_enabled = true;
    else if (flags.turbo == "off")
        config.turbo_enabled = false;
    else
        throw ParseError("--turbo takes on|off");

    if (!flags.governor.empty()) {
        if (flags.governor == "ondemand")
            config.policy.kind = GovernorKind::ondemand;
        else if (flags.governor == "userspace")
            config.policy.kind = GovernorKind::userspace;
        else
            throw ParseError("unknown governor: " + flags.governor);
    }
    if (flags.userspace_khz > 0) config.policy.userspace_target_khz = flags.userspace_khz;
    if (config.policy.kind == GovernorKind::userspace && config.policy.userspace_target_khz == 0)
        config.policy.userspace_target_khz = config.spec.ladder.guaranteed_khz();
    if (flags.up_threshold >= 0) config.policy.up_threshold = flags.up_threshold;
    if (flags.down_threshold >= 0) config.policy.down_threshold = flags.down_threshold;
    if (!(config.policy.down_threshold > 0 &&
          config.policy.down_threshold < config.policy.up_threshold &&
          config.policy.up_threshold <= 1.0))
        throw ValidationError("governor thresholds must satisfy 0 < down < up <= 1");

    if (!arbiter_override.empty()) config.arbiter.kind = arbiter_from_name(arbiter_override);
    if (!flags.bins.empty()) config.arbiter.bin_table = parse_bin_table_flag(flags.bins);
    if (cap_override >= 0) config.arbiter.bios_cap_khz = cap_override;

    if (flags.tick_seconds <= 0) throw ValidationError("--tick-seconds must be positive");
    return config;
}

const char* governor_name(const SimConfig& config) {
    return config.policy.kind == GovernorKind::ondemand ? "ondemand" : "userspace";
}

void write_run_outputs(const std::filesystem::path& dir, const SimConfig& config, const SimRun& run_out) {
    std::filesystem::create_directories(dir);
    write_file(dir / "trace.csv", emit_output_trace(run_out.rows));
    emit_plot_data(run_out.rows, config.spec, dir);
    write_file(dir / "summary.json",
               summary_to_json(run_out.stats, governor_name(config), arbiter_name(config.arbiter.kind)));
}

int cmd_simulate(const SimFlags& flags) {
    const LoadedSpec loaded = load_processor_spec(flags.spec_path);
    const SimConfig config = make_config(loaded, flags, flags.arbiter, flags.cap_khz);
    const InputTrace trace = parse_trace(read_file(flags.trace_path));
    const SimRun run_out = run(config, trace);
    write_run_outputs(flags.out_dir, config, run_out);
    std::cout << "wrote " << flags.out_dir << " ticks=" << run_out.stats.ticks
              << " total_core_cycles=" << run_out.stats.total_core_cycles
              << " budget_violations=" << run_out.stats.budget_violations << '\n';
    return 0;
}

struct CompareFlags {
    SimFlags base;
    std::string arbiter_a = "optimal";
    std::string arbiter_b = "baseline";
    Khz cap_a = -1;
    Khz cap_b = -1;
};

int cmd_compare(const CompareFlags& flags) {
    const LoadedSpec loaded = load_processor_spec(flags.base.spec_path);
    const InputTrace trace = parse_trace(read_file(flags.base.trace_path));

    SimConfig config_a = make_config(loaded, flags.base, flags.arbiter_a, flags.cap_a);
    SimConfig config_b = make_config(loaded, flags.base, flags.arbiter_b, flags.cap_b);

    SimRun run_a = run(config_a, trace);
    SimRun run_b = run(config_b, trace);
    const double delta = performance_delta_pct(run_a.stats, run_b.stats);
    run_b.stats.performance_delta_pct = delta;

    // Per-tick total granted frequency, side by side.
    const size_t ticks = trace.ticks.size();
    const size_t n = static_cast<size_t>(trace.n_cores);
    std::int64_t a_ge_b = 0;
    std::int64_t granted_a = 0, granted_b = 0;
    for (size_t t = 0; t < ticks; ++t) {
        std::int64_t sum_a = 0, sum_b = 0;
        for (size_t i = 0; i < n; ++i) {
            sum_a += run_a.rows[t * n + i].granted_khz;
            sum_b += run_b.rows[t * n + i].granted_khz;
        }
        if (sum_a >= sum_b) ++a_ge_b;
        granted_a += sum_a;
        granted_b += sum_b;
    }

    const std::filesystem::path out_dir = flags.base.out_dir;
    write_run_outputs(out_dir / "a", config_a, run_a);
    write_run_outputs(out_dir / "b", config_b, run_b);

    nlohmann::ordered_json j;
    j["arbiter_a"] = arbiter_name(config_a.arbiter.kind);
    j["arbiter_b"] = arbiter_name(config_b.arbiter.kind);
    j["total_core_cycles_a"] = run_a.stats.total_core_cycles;
    j["total_core_cycles_b"] = run_b.stats.total_core_cycles;
    j["total_granted_khz_a"] = granted_a;
    j["total_granted_khz_b"] = granted_b;
    j["performance_delta_pct"] = delta;
    j["budget_violations_a"] = run_a.stats.budget_violations;
    j["budget_violations_b"] = run_b.stats.budget_violations;
    j["dominance_a_ge_b_ticks"] = a_ge_b;
    j["ticks"] = static_cast<std::int64_t>(ticks);
    write_file(out_dir / "compare.json", j.dump(2) + "\n");

    char buf[160];
    std::snprintf(buf, sizeof(buf), "performance_delta_pct=%.4f dominance=%lld/%lld", delta,
                  static_cast<long long>(a_ge_b), static_cast<long long>(ticks));
    std::cout << buf << '\n';
    return 0;
}

// ---------------------------------------------------------------------------
// gen-trace

struct GenFlags {
    std::string pattern = "constant";
    int cores = 4;
    int ticks = 32;
    double u = 1.0;
    int period = 4;
    double hi = 1.0;
    double lo = 0.0;
    double step = 0.1;
    std::uint64_t seed = 0;
    std::string out = "-";
};

int cmd_gen_trace(const GenFlags& flags) {
    WorkloadSpec spec;
    spec.pattern = pattern_from_name(flags.pattern);
    spec.n_cores = flags.cores;
    spec.duration_ticks = flags.ticks;
    spec.u = flags.u;
    spec.period = flags.period;
    spec.hi = flags.hi;
    spec.lo = flags.lo;
    spec.step = flags.step;
    spec.seed = flags.seed;
    const std::string text = emit_trace(generate_trace(spec));
    if (flags.out == "-")
        std::cout << text;
    else
        write_file(flags.out, text);
    return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchFlags {
    std::string cores = "10,100,1000";
    std::string levels = "4,14";
    int granularity = 1;
    int reps = 3;
    std::int64_t spare_units = 5000;
    std::uint64_t seed = 1;
    std::string out = "-";
};

ProcessorSpec bench_spec(int n_cores, int m, std::uint64_t seed) {
    // Synthetic homogeneous package: guaranteed 2 GHz plus m bus-clock turbo
    // bins; per-core powers walk upward in whole deciwatts.
    std::mt19937_64 rng(seed);
    std::vector<Khz> levels;
    std::vector<Watts> watts;
    std::int64_t units = 5;  // 0.5 W at the guaranteed level
    for (int j = 0; j <= m; ++j) {
        levels.push_back(2'000'000 + static_cast<Khz>(j) * 133'000);
        watts.push_back(static_cast<double>(units) / 10.0);
        units += 1 + static_cast<std::int64_t>(rng() % 2);
    }
    ProcessorSpec spec;
    spec.name = "bench";
    spec.n_cores = n_cores;
    spec.t_crit_c = 100.0;
    spec.ladder = FrequencyLadder::from_khz(std::move(levels), 0, 133'000);
    spec.power.per_core_watts = std::move(watts);
    spec.pow_max_watts = 1e9;  // budget passed per request
    return spec;
}

int cmd_bench(const BenchFlags& flags) {
    using clock = std::chrono::steady_clock;
    if (flags.reps < 1) throw ValidationError("--reps must be at least 1");

    std::string out = "n_cores,m,granularity,budget_units,exact_ms,greedy_ms,gap_khz\n";
    for (int n : parse_int_list(flags.cores)) {
        for (int m : parse_int_list(flags.levels)) {
            if (n < 1 || m < 1) throw ValidationError("bench sizes must be at least 1");
            const ProcessorSpec spec = bench_spec(n, m, flags.seed);
            std::vector<int> cores(static_cast<size_t>(n));
            std::iota(cores.begin(), cores.end(), 0);
            const std::int64_t budget_units = 5 * n + flags.spare_units;
            SolveRequest req(spec, std::move(cores), static_cast<double>(budget_units) / 10.0,
                             flags.granularity);

            std::vector<double> exact_ms, greedy_ms;
            Khz exact_obj = 0, greedy_obj = 0;
            for (int rep = 0; rep < flags.reps; ++rep) {
                auto t0 = clock::now();
                exact_obj = solve_exact_dp(req).objective_khz;
                auto t1 = clock::now();
                greedy_obj = solve_greedy(req).objective_khz;
                auto t2 = clock::now();
                exact_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
                greedy_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
            }
            std::sort(exact_ms.begin(), exact_ms.end());
            std::sort(greedy_ms.begin(), greedy_ms.end());
            char line[192];
            std::snprintf(line, sizeof(line), "%d,%d,%d,%lld,%.3f,%.3f,%lld\n", n, m,
                          flags.granularity, static_cast<long long>(budget_units),
                          exact_ms[exact_ms.size() / 2], greedy_ms[greedy_ms.size() / 2],
                          static_cast<long long>(exact_obj - greedy_obj));
            out += line;
        }
    }
    if (flags.out == "-")
        std::cout << out;
    else
        write_file(flags.out, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"power-budgeted turbo frequency assignment: solvers and trace simulator"};
    app.require_subcommand(1);
    std::string kernel = "auto";
    app.add_option("--kernel", kernel, "solver kernel variant: auto|scalar|avx2");

    SolveFlags solve_flags;
    auto* solve_cmd = app.add_subcommand("solve", "solve one assignment instance from a spec file");
    solve_cmd->add_option("--spec", solve_flags.spec_path, "processor spec JSON")->required();
    solve_cmd->add_option("--active", solve_flags.active, "number of active cores (default: all)");
    solve_cmd->add_option("--budget", solve_flags.budget, "power budget in watts (default: spec)");
    solve_cmd->add_option("--method", solve_flags.method, "exact|greedy|lookup|oracle");
    solve_cmd->add_option("--granularity", solve_flags.granularity, "budget units in deciwatts");

    auto add_sim_flags = [](CLI::App* cmd, SimFlags& flags) {
        cmd->add_option("--spec", flags.spec_path, "processor spec JSON")->required();
        cmd->add_option("--trace", flags.trace_path, "input utilization trace CSV")->required();
        cmd->add_option("--out-dir", flags.out_dir, "output directory")->required();
        cmd->add_option("--governor", flags.governor, "ondemand|userspace");
        cmd->add_option("--userspace-khz", flags.userspace_khz, "userspace target frequency");
        cmd->add_option("--up", flags.up_threshold, "ondemand up threshold");
        cmd->add_option("--down", flags.down_threshold, "ondemand down threshold");
        cmd->add_option("--bins", flags.bins, "baseline bin table, e.g. 1:2,2:1,3:1,4:1");
        cmd->add_option("--budget", flags.budget, "power budget in watts");
        cmd->add_option("--tick-seconds", flags.tick_seconds, "seconds per tick");
        cmd->add_option("--seed", flags.seed, "run seed (recorded in the summary)");
        cmd->add_option("--turbo", flags.turbo, "on|off");
        cmd->add_option("--idle-threshold", flags.idle_threshold,
                        "utilization at or below this counts as asleep");
        cmd->add_option("--granularity", flags.granularity, "budget units in deciwatts");
    };

    SimFlags sim_flags;
    auto* sim_cmd = app.add_subcommand("simulate", "replay a utilization trace");
    add_sim_flags(sim_cmd, sim_flags);
    sim_cmd->add_option("--arbiter", sim_flags.arbiter, "baseline|optimal|greedy");
    sim_cmd->add_option("--cap", sim_flags.cap_khz, "baseline BIOS frequency cap in kHz (0 = none)");

    CompareFlags compare_flags;
    auto* compare_cmd = app.add_subcommand("compare", "run two arbiters on one trace");
    add_sim_flags(compare_cmd, compare_flags.base);
    compare_cmd->add_option("--arbiter-a", compare_flags.arbiter_a, "reference arbiter");
    compare_cmd->add_option("--arbiter-b", compare_flags.arbiter_b, "compared arbiter");
    compare_cmd->add_option("--cap-a", compare_flags.cap_a, "BIOS cap for side a (0 = none)");
    compare_cmd->add_option("--cap-b", compare_flags.cap_b, "BIOS cap for side b (0 = none)");

    GenFlags gen_flags;
    auto* gen_cmd = app.add_subcommand("gen-trace", "generate a synthetic utilization trace");
    gen_cmd->add_option("--pattern", gen_flags.pattern, "constant|square|ramp|walk");
    gen_cmd->add_option("--cores", gen_flags.cores, "core count");
    gen_cmd->add_option("--ticks", gen_flags.ticks, "tick count");
    gen_cmd->add_option("--u", gen_flags.u, "constant utilization");
    gen_cmd->add_option("--period", gen_flags.period, "square period in ticks");
    gen_cmd->add_option("--hi", gen_flags.hi, "square high utilization");
    gen_cmd->add_option("--lo", gen_flags.lo, "square low utilization");
    gen_cmd->add_option("--step", gen_flags.step, "random walk step");
    gen_cmd->add_option("--seed", gen_flags.seed, "generator seed");
    gen_cmd->add_option("--out", gen_flags.out, "output file or - for stdout");

    BenchFlags bench_flags;
    auto* bench_cmd = app.add_subcommand("bench", "time exact and greedy solvers over sizes");
    bench_cmd->add_option("--cores", bench_flags.cores, "comma list of core counts");
    bench_cmd->add_option("--levels", bench_flags.levels, "comma list of turbo level counts");
    bench_cmd->add_option("--granularity", bench_flags.granularity, "budget units in deciwatts");
    bench_cmd->add_option("--reps", bench_flags.reps, "timing repetitions (median reported)");
    bench_cmd->add_option("--spare-units", bench_flags.spare_units, "budget above the floor, in units");
    bench_cmd->add_option("--seed", bench_flags.seed, "instance seed");
    bench_cmd->add_option("--out", bench_flags.out, "output file or - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        kernels::select(kernel_from_name(kernel));
        if (solve_cmd->parsed()) return cmd_solve(solve_flags);
        if (sim_cmd->parsed()) return cmd_simulate(sim_flags);
        if (compare_cmd->parsed()) return cmd_compare(compare_flags);
        if (gen_cmd->parsed()) return cmd_gen_trace(gen_flags);
        if (bench_cmd->parsed()) return cmd_bench(bench_flags);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
