#include "turbosim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "turbosim/errors.hpp"

namespace turbosim {

Khz base_operating_frequency(int base_ratio, Khz bus_clock_khz) {
    if (base_ratio < 1)
        throw ValidationError("invalid platform ratio");
    if (bus_clock_khz <= 0)
        throw ValidationError("bus clock must be positive");
    return static_cast<Khz>(base_ratio) * bus_clock_khz;
}

Khz measure_frequency(const CounterSample& prev, const CounterSample& curr) {
    if (curr.unhalted_core_cycles < prev.unhalted_core_cycles ||
        curr.unhalted_ref_cycles < prev.unhalted_ref_cycles)
        throw ValidationError("counters decreased between samples");
    const std::uint64_t core_delta = curr.unhalted_core_cycles - prev.unhalted_core_cycles;
    const std::uint64_t ref_delta = curr.unhalted_ref_cycles - prev.unhalted_ref_cycles;
    if (ref_delta == 0)
        throw Error("no reference cycles: core idle");
    const Khz base = base_operating_frequency(curr.base_ratio, curr.bus_clock_khz);
    return static_cast<Khz>(std::llround(static_cast<double>(base) * static_cast<double>(core_delta) /
                                         static_cast<double>(ref_delta)));
}

SimState SimState::initial(const SimConfig& config) {
    const auto& ladder = config.spec.ladder;
    SimState state;
    const size_t n = static_cast<size_t>(config.spec.n_cores);
    state.core_level.assign(n, ladder.guaranteed_index);
    state.last_request.assign(n, FreqRequest{false, ladder.guaranteed_index});
    CounterSample counters;
    counters.bus_clock_khz = ladder.bus_clock_khz;
    counters.base_ratio = std::max(
        1, static_cast<int>(std::llround(static_cast<double>(ladder.guaranteed_khz()) /
                                         static_cast<double>(ladder.bus_clock_khz))));
    state.counters.assign(n, counters);
    return state;
}

std::vector<SimTraceRow> advance_tick(SimState& state, const SimConfig& config, const TickInput& tick) {
    const auto& spec = config.spec;
    const size_t n = static_cast<size_t>(spec.n_cores);
    if (tick.utilization.size() != n)
        throw ParseError("trace row out of range: wrong core count");
    for (double u : tick.utilization)
        if (!(u >= 0.0 && u <= 1.0))
            throw ParseError("trace row out of range: utilization outside [0,1]");

    // (1) sleep classification for this interval
    std::vector<int> active_cores;
    for (size_t i = 0; i < n; ++i)
        if (tick.utilization[i] > config.idle_sleep_threshold)
            active_cores.push_back(static_cast<int>(i));

    // (2) governor requests for the active cores
    std::vector<FreqRequest> requests;
    requests.reserve(active_cores.size());
    for (int core : active_cores)
        requests.push_back(ospm_request(config.policy, tick.utilization[static_cast<size_t>(core)],
                                        state.last_request[static_cast<size_t>(core)], spec.ladder,
                                        config.turbo_enabled));

    // (3) arbitration
    std::vector<int> granted;
    if (config.arbiter.kind == ArbiterKind::baseline_hard_limit)
        granted = arbitrate_baseline(config.arbiter, requests, active_cores, spec);
    else
        granted = arbitrate_optimal(config.arbiter, requests, active_cores, spec,
                                    config.effective_budget(), config.granularity_deciwatts);

    Watts package = 0;
    for (int level : granted) package += spec.power.per_core_watts[static_cast<size_t>(level)];

    // (4)-(6) counters, measurement, rows
    std::vector<SimTraceRow> rows(n);
    std::vector<std::optional<int>> new_level(n);
    size_t slot = 0;
    for (size_t i = 0; i < n; ++i) {
        SimTraceRow& row = rows[i];
        row.time_s = tick.time_s;
        row.core_id = static_cast<int>(i);
        row.utilization = tick.utilization[i];
        row.package_watts = package;

        const bool active = slot < active_cores.size() && active_cores[slot] == static_cast<int>(i);
        if (!active) continue;

        const int level = granted[slot];
        const Khz granted_khz = spec.ladder.levels[static_cast<size_t>(level)].freq_khz;
        row.granted_khz = granted_khz;
        new_level[i] = level;
        state.last_request[i] = requests[slot];
        ++slot;

        CounterSample& counters = state.counters[i];
        const CounterSample before = counters;
        const double unhalted_s = tick.utilization[i] * config.tick_seconds;
        const Khz base = base_operating_frequency(counters.base_ratio, counters.bus_clock_khz);
        counters.unhalted_core_cycles +=
            static_cast<std::uint64_t>(std::llround(static_cast<double>(granted_khz) * 1000.0 * unhalted_s));
        counters.unhalted_ref_cycles +=
            static_cast<std::uint64_t>(std::llround(static_cast<double>(base) * 1000.0 * unhalted_s));
        if (counters.unhalted_ref_cycles > before.unhalted_ref_cycles)
            row.measured_khz = measure_frequency(before, counters);
    }
    state.core_level = std::move(new_level);
    state.ticks_run += 1;
    return rows;
}

SimRun run(const SimConfig& config, const InputTrace& trace) {
    if (trace.ticks.empty())
        throw ParseError("empty trace");
    if (trace.n_cores != config.spec.n_cores)
        throw ParseError("trace core count does not match the processor spec");

    const auto violations = validate(config.spec);
    if (!violations.empty())
        throw ValidationError("invalid processor spec: " + violations.front().code);

    SimRun out;
    out.rows.reserve(trace.ticks.size() * static_cast<size_t>(trace.n_cores));
    SimState state = SimState::initial(config);
    std::vector<double> granted_sum(static_cast<size_t>(config.spec.n_cores), 0.0);
    const Watts budget = config.effective_budget();

    auto tick_prefix = [](size_t t) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "tick %zu: ", t);
        return std::string(buf);
    };
    for (size_t t = 0; t < trace.ticks.size(); ++t) {
        std::vector<SimTraceRow> rows;
        try {
            rows = advance_tick(state, config, trace.ticks[t]);
        } catch (const ParseError& e) {
            throw ParseError(tick_prefix(t) + e.what());
        } catch (const InfeasibleError& e) {
            throw InfeasibleError(tick_prefix(t) + e.what());
        } catch (const ValidationError& e) {
            throw ValidationError(tick_prefix(t) + e.what());
        } catch (const Error& e) {
            throw Error(tick_prefix(t) + e.what());
        }
        if (!rows.empty()) {
            const Watts package = rows.front().package_watts;
            out.stats.watts_histogram[static_cast<std::int64_t>(std::floor(package))] += 1;
            if (package > budget + 1e-9) out.stats.budget_violations += 1;
        }
        for (const auto& row : rows) granted_sum[static_cast<size_t>(row.core_id)] += static_cast<double>(row.granted_khz);
        out.rows.insert(out.rows.end(), rows.begin(), rows.end());
    }

    out.stats.n_cores = config.spec.n_cores;
    out.stats.ticks = static_cast<std::int64_t>(trace.ticks.size());
    out.stats.budget_watts = budget;
    out.stats.rng_seed = config.rng_seed;
    for (const auto& counters : state.counters)
        out.stats.total_core_cycles += counters.unhalted_core_cycles;
    out.stats.mean_granted_khz_per_core.resize(granted_sum.size());
    for (size_t i = 0; i < granted_sum.size(); ++i)
        out.stats.mean_granted_khz_per_core[i] = granted_sum[i] / static_cast<double>(trace.ticks.size());
    return out;
}

double performance_delta_pct(const SummaryStats& reference, const SummaryStats& run) {
    if (reference.total_core_cycles == 0) return 0.0;
    const double ref = static_cast<double>(reference.total_core_cycles);
    const double cur = static_cast<double>(run.total_core_cycles);
    return (ref - cur) / ref * 100.0;
}

} // namespace turbosim
