#include "turbosim/trace_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include <json.hpp>

#include "turbosim/errors.hpp"

namespace turbosim {

namespace {

constexpr const char* kInputHeader = "time_s,core_id,utilization";
constexpr const char* kOutputHeader = "time_s,core_id,utilization,granted_khz,measured_khz,package_watts";

[[noreturn]] void fail_line(size_t line_no, const std::string& reason) {
    throw ParseError("line " + std::to_string(line_no) + ": " + reason);
}

std::string fmt_double(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

double quantize(double u) {
    return std::round(u * 1e6) / 1e6;
}

// Portable uniform in [0,1): identical bytes for identical seeds on every
// platform, unlike std::uniform_real_distribution.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

struct RawRow {
    double time_s;
    int core_id;
    double utilization;
};

RawRow parse_row(std::string_view line, size_t line_no) {
    RawRow row{};
    std::array<std::string_view, 3> fields;
    size_t start = 0, field = 0;
    for (size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            if (field >= 3) fail_line(line_no, "expected 3 fields");
            fields[field++] = line.substr(start, i - start);
            start = i + 1;
        }
    }
    if (field != 3) fail_line(line_no, "expected 3 fields");

    auto parse_double = [&](std::string_view s, const char* what) {
        double v{};
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            fail_line(line_no, std::string("bad ") + what);
        return v;
    };
    auto parse_int = [&](std::string_view s, const char* what) {
        int v{};
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
            fail_line(line_no, std::string("bad ") + what);
        return v;
    };
    row.time_s = parse_double(fields[0], "time");
    row.core_id = parse_int(fields[1], "core id");
    row.utilization = parse_double(fields[2], "utilization");
    if (!(row.time_s >= 0) || !std::isfinite(row.time_s)) fail_line(line_no, "bad time");
    if (row.core_id < 0) fail_line(line_no, "bad core id");
    if (!(row.utilization >= 0.0 && row.utilization <= 1.0))
        fail_line(line_no, "utilization outside [0,1]");
    return row;
}

} // namespace

WorkloadSpec::Pattern pattern_from_name(std::string_view name) {
    if (name == "constant") return WorkloadSpec::Pattern::constant;
    if (name == "square") return WorkloadSpec::Pattern::square;
    if (name == "ramp" || name == "phased_ramp") return WorkloadSpec::Pattern::phased_ramp;
    if (name == "walk" || name == "random_walk") return WorkloadSpec::Pattern::random_walk;
    throw ParseError("unknown workload pattern: " + std::string(name));
}

InputTrace parse_trace(std::string_view text) {
    InputTrace trace;
    size_t line_no = 0;
    size_t pos = 0;
    bool saw_header = false;
    std::vector<bool> seen;

    while (pos <= text.size()) {
        const size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        if (!saw_header) {
            if (line != kInputHeader) fail_line(line_no, std::string("expected header ") + kInputHeader);
            saw_header = true;
            continue;
        }

        const RawRow row = parse_row(line, line_no);
        const bool new_tick = trace.ticks.empty() || row.time_s != trace.ticks.back().time_s;
        if (new_tick) {
            if (!trace.ticks.empty()) {
                if (row.time_s <= trace.ticks.back().time_s)
                    fail_line(line_no, "tick times must strictly increase");
                if (std::find(seen.begin(), seen.end(), false) != seen.end())
                    fail_line(line_no, "previous tick is missing cores");
            }
            if (trace.ticks.empty()) {
                // The first tick defines the core set.
            } else if (row.core_id >= trace.n_cores) {
                fail_line(line_no, "core id outside the set declared by the first tick");
            }
            trace.ticks.push_back({row.time_s, std::vector<double>()});
            if (trace.n_cores > 0) trace.ticks.back().utilization.assign(static_cast<size_t>(trace.n_cores), 0.0);
            std::fill(seen.begin(), seen.end(), false);
        }

        auto& tick = trace.ticks.back();
        if (trace.ticks.size() == 1) {
            if (row.core_id != static_cast<int>(tick.utilization.size()))
                fail_line(line_no, "first tick must list cores 0..n-1 in order");
            tick.utilization.push_back(row.utilization);
            trace.n_cores = static_cast<int>(tick.utilization.size());
            seen.assign(static_cast<size_t>(trace.n_cores), true);
        } else {
            if (row.core_id >= trace.n_cores)
                fail_line(line_no, "core id outside the set declared by the first tick");
            if (seen[static_cast<size_t>(row.core_id)])
                fail_line(line_no, "duplicate core in tick");
            seen[static_cast<size_t>(row.core_id)] = true;
            tick.utilization[static_cast<size_t>(row.core_id)] = row.utilization;
        }
    }

    if (!saw_header || trace.ticks.empty()) throw ParseError("empty trace");
    if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw ParseError("last tick is missing cores");
    return trace;
}

std::string emit_trace(const InputTrace& trace) {
    std::string out = kInputHeader;
    out += '\n';
    for (const auto& tick : trace.ticks) {
        for (size_t core = 0; core < tick.utilization.size(); ++core) {
            out += fmt_double(tick.time_s, 3);
            out += ',';
            out += std::to_string(core);
            out += ',';
            out += fmt_double(tick.utilization[core], 6);
            out += '\n';
        }
    }
    return out;
}

InputTrace generate_trace(const WorkloadSpec& spec) {
    if (spec.n_cores < 1) throw ValidationError("workload needs at least one core");
    if (spec.duration_ticks < 1) throw ValidationError("workload needs at least one tick");
    if (spec.period < 2) throw ValidationError("square period must be at least 2");

    InputTrace trace;
    trace.n_cores = spec.n_cores;
    trace.ticks.resize(static_cast<size_t>(spec.duration_ticks));

    std::mt19937_64 rng(spec.seed);
    std::vector<double> walk(static_cast<size_t>(spec.n_cores), 0.5);

    for (int t = 0; t < spec.duration_ticks; ++t) {
        auto& tick = trace.ticks[static_cast<size_t>(t)];
        tick.time_s = static_cast<double>(t);
        tick.utilization.resize(static_cast<size_t>(spec.n_cores));
        for (int core = 0; core < spec.n_cores; ++core) {
            double u = 0;
            switch (spec.pattern) {
                case WorkloadSpec::Pattern::constant:
                    u = spec.u;
                    break;
                case WorkloadSpec::Pattern::square:
                    u = (t % spec.period) < spec.period / 2 ? spec.hi : spec.lo;
                    break;
                case WorkloadSpec::Pattern::phased_ramp: {
                    // Each core ramps 0..1 over the run, phase-shifted so the
                    // active-core count varies tick to tick.
                    if (spec.duration_ticks == 1) {
                        u = 0.0;
                    } else {
                        const int phase = core * spec.duration_ticks / spec.n_cores;
                        const int local = (t + phase) % spec.duration_ticks;
                        u = static_cast<double>(local) / static_cast<double>(spec.duration_ticks - 1);
                    }
                    break;
                }
                case WorkloadSpec::Pattern::random_walk: {
                    double& w = walk[static_cast<size_t>(core)];
                    w += (uniform01(rng) * 2.0 - 1.0) * spec.step;
                    w = std::clamp(w, 0.0, 1.0);
                    u = w;
                    break;
                }
            }
            tick.utilization[static_cast<size_t>(core)] = quantize(std::clamp(u, 0.0, 1.0));
        }
    }
    return trace;
}

std::string emit_output_trace(const std::vector<SimTraceRow>& rows) {
    std::string out = kOutputHeader;
    out += '\n';
    for (const auto& row : rows) {
        out += fmt_double(row.time_s, 3);
        out += ',';
        out += std::to_string(row.core_id);
        out += ',';
        out += fmt_double(row.utilization, 6);
        out += ',';
        out += std::to_string(row.granted_khz);
        out += ',';
        if (row.measured_khz.has_value()) out += std::to_string(*row.measured_khz);
        out += ',';
        out += fmt_double(row.package_watts, 3);
        out += '\n';
    }
    return out;
}

void emit_plot_data(const std::vector<SimTraceRow>& rows, const ProcessorSpec& spec,
                    const std::filesystem::path& out_dir) {
    if (rows.empty()) throw ValidationError("nothing to plot: empty trace");
    std::filesystem::create_directories(out_dir);

    std::vector<std::string> per_core(static_cast<size_t>(spec.n_cores),
                                      "time_s,measured_khz,utilization\n");
    for (const auto& row : rows) {
        auto& text = per_core[static_cast<size_t>(row.core_id)];
        text += fmt_double(row.time_s, 3);
        text += ',';
        if (row.measured_khz.has_value()) text += std::to_string(*row.measured_khz);
        text += ',';
        text += fmt_double(row.utilization, 6);
        text += '\n';
    }
    for (int core = 0; core < spec.n_cores; ++core) {
        std::ofstream f(out_dir / ("core_" + std::to_string(core) + ".csv"), std::ios::binary);
        f << per_core[static_cast<size_t>(core)];
    }
    std::ofstream ref(out_dir / "reference.csv", std::ios::binary);
    ref << "guaranteed_khz\n" << spec.ladder.guaranteed_khz() << "\n";
}

std::string summary_to_json(const SummaryStats& stats, const std::string& governor,
                            const std::string& arbiter) {
    nlohmann::ordered_json j;
    j["n_cores"] = stats.n_cores;
    j["ticks"] = stats.ticks;
    j["governor"] = governor;
    j["arbiter"] = arbiter;
    j["seed"] = stats.rng_seed;
    j["budget_watts"] = stats.budget_watts;
    j["total_core_cycles"] = stats.total_core_cycles;
    j["mean_granted_khz_per_core"] = stats.mean_granted_khz_per_core;
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [watts, count] : stats.watts_histogram) hist[std::to_string(watts)] = count;
    j["package_watts_histogram"] = hist;
    j["budget_violations"] = stats.budget_violations;
    if (stats.performance_delta_pct.has_value())
        j["performance_delta_pct"] = *stats.performance_delta_pct;
    else
        j["performance_delta_pct"] = nullptr;
    return j.dump(2) + "\n";
}

} // namespace turbosim
