#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "turbosim/governor.hpp"
#include "turbosim/model.hpp"

namespace turbosim {

/// Everything one deterministic simulation run needs.
struct SimConfig {
    ProcessorSpec spec;
    GovernorPolicy policy;
    TurboArbiter arbiter;
    double tick_seconds = 1.0;
    Watts budget_watts = 0;              // 0 = spec.pow_max_watts
    std::uint64_t rng_seed = 0;          // recorded in the summary; the engine itself is deterministic
    double idle_sleep_threshold = 0.0;   // utilization at or below this counts as asleep
    bool turbo_enabled = true;
    int granularity_deciwatts = 1;

    Watts effective_budget() const { return budget_watts > 0 ? budget_watts : spec.pow_max_watts; }
};

/// Fixed-counter pair for one core, CPU_CLK_UNHALTED.{CORE,REF} style:
/// the core counter runs at the granted frequency, the reference counter at
/// the base operating frequency, both only while unhalted.
struct CounterSample {
    std::uint64_t unhalted_core_cycles = 0;
    std::uint64_t unhalted_ref_cycles = 0;
    int base_ratio = 1;
    Khz bus_clock_khz = 133333;
};

struct SimTraceRow {
    double time_s = 0;
    int core_id = 0;
    double utilization = 0;
    Khz granted_khz = 0;                  // 0 while asleep
    std::optional<Khz> measured_khz;      // empty while halted
    Watts package_watts = 0;              // whole-package total for the tick
};

/// Mutable per-run state threaded through advance_tick.
struct SimState {
    std::vector<std::optional<int>> core_level;  // ladder index, nullopt while asleep
    std::vector<FreqRequest> last_request;       // persists across sleep
    std::vector<CounterSample> counters;
    double temperature_c = 50.0;
    std::int64_t ticks_run = 0;

    static SimState initial(const SimConfig& config);
};

/// One parsed input tick: a utilization per core.
struct TickInput {
    double time_s = 0;
    std::vector<double> utilization;
};

struct InputTrace {
    int n_cores = 0;
    std::vector<TickInput> ticks;
};

struct SummaryStats {
    int n_cores = 0;
    std::int64_t ticks = 0;
    std::uint64_t total_core_cycles = 0;
    std::vector<double> mean_granted_khz_per_core;
    std::map<std::int64_t, std::int64_t> watts_histogram;  // floor(package watts) -> tick count
    std::int64_t budget_violations = 0;
    Watts budget_watts = 0;
    std::uint64_t rng_seed = 0;
    std::optional<double> performance_delta_pct;  // set by runs with a reference
};

struct SimRun {
    std::vector<SimTraceRow> rows;
    SummaryStats stats;
};

/// Platform ratio times bus clock. Throws ValidationError for ratio < 1.
Khz base_operating_frequency(int base_ratio, Khz bus_clock_khz);

/// The counter-based frequency estimate between two samples:
/// base frequency * (core-cycle delta / reference-cycle delta), nearest kHz.
/// Throws ValidationError when samples are inconsistent and Error("no
/// reference cycles: core idle") when the core was halted for the whole
/// interval.
Khz measure_frequency(const CounterSample& prev, const CounterSample& curr);

/// Advances one tick: classifies sleepers, runs the governor and arbiter,
/// advances counters by the granted frequencies, and measures them back.
/// Returns one row per core, sorted by core id.
std::vector<SimTraceRow> advance_tick(SimState& state, const SimConfig& config, const TickInput& tick);

/// Replays a whole trace. Tick errors are rethrown with the tick index
/// attached.
SimRun run(const SimConfig& config, const InputTrace& trace);

/// (reference cycles - run cycles) / reference cycles * 100.
double performance_delta_pct(const SummaryStats& reference, const SummaryStats& run);

} // namespace turbosim
