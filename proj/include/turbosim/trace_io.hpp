#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "turbosim/sim.hpp"

namespace turbosim {

/// Synthetic workload description, standing in for multithreaded benchmark
/// runs with varying per-core utilization.
struct WorkloadSpec {
    enum class Pattern { constant, square, phased_ramp, random_walk };

    int n_cores = 1;
    int duration_ticks = 1;
    Pattern pattern = Pattern::constant;
    double u = 1.0;          // constant
    int period = 4;          // square
    double hi = 1.0;         // square
    double lo = 0.0;         // square
    double step = 0.1;       // random_walk
    std::uint64_t seed = 0;
};

WorkloadSpec::Pattern pattern_from_name(std::string_view name);

/// Parses the input trace CSV (`time_s,core_id,utilization`). Every
/// malformed line is reported with its 1-based line number. Requires the
/// same core set each tick and strictly increasing tick times.
InputTrace parse_trace(std::string_view text);

/// Canonical bytes for an input trace; parse(emit(t)) == t and
/// emit(parse(s)) is a fixed point.
std::string emit_trace(const InputTrace& trace);

/// Deterministic generation: equal specs give byte-equal traces, and every
/// generated trace parses.
InputTrace generate_trace(const WorkloadSpec& spec);

/// Output trace CSV
/// (`time_s,core_id,utilization,granted_khz,measured_khz,package_watts`);
/// halted measurements render as an empty field.
std::string emit_output_trace(const std::vector<SimTraceRow>& rows);

/// Writes per-core plot series (`core_<id>.csv`: time, measured, utilization)
/// and `reference.csv` holding the guaranteed frequency, the horizontal
/// reference line of frequency-over-time plots.
void emit_plot_data(const std::vector<SimTraceRow>& rows, const ProcessorSpec& spec,
                    const std::filesystem::path& out_dir);

/// summary.json payload for a finished run.
std::string summary_to_json(const SummaryStats& stats, const std::string& governor,
                            const std::string& arbiter);

} // namespace turbosim
