#include "turbosim/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "turbosim/errors.hpp"

namespace turbosim {

namespace {

std::string format_msg(const char* fmt, long long a, long long b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), fmt, a, b);
    return buf;
}

} // namespace

FrequencyLadder FrequencyLadder::from_khz(std::vector<Khz> ascending_khz, int guaranteed_index,
                                          Khz bus_clock_khz) {
    FrequencyLadder ladder;
    ladder.bus_clock_khz = bus_clock_khz;
    ladder.guaranteed_index = guaranteed_index;
    ladder.levels.reserve(ascending_khz.size());
    for (size_t i = 0; i < ascending_khz.size(); ++i) {
        FrequencyLevel level;
        level.index = static_cast<int>(i);
        level.freq_khz = ascending_khz[i];
        level.is_turbo = static_cast<int>(i) > guaranteed_index;
        ladder.levels.push_back(level);
    }
    return ladder;
}

int ProcessorState::active_count() const {
    int n = 0;
    for (const auto& lvl : per_core_level)
        if (lvl.has_value()) ++n;
    return n;
}

Watts derive_power_from_voltage(const FrequencyLevel& level, double k) {
    if (!level.voltage_v.has_value())
        throw ValidationError("voltage unavailable");
    if (k <= 0)
        throw ValidationError("invalid constant");
    const double v = *level.voltage_v;
    return k * v * v * static_cast<double>(level.freq_khz);
}

std::vector<PStateTableEntry> export_pstate_table(const FrequencyLadder& ladder, bool turbo_enabled) {
    std::vector<PStateTableEntry> table;
    const bool has_turbo = turbo_enabled && ladder.turbo_level_count() > 0;
    if (has_turbo) {
        const Khz indicator = ladder.indicator_khz();
        for (const auto& level : ladder.levels)
            if (level.freq_khz == indicator)
                throw ValidationError(format_msg("indicator %lld kHz collides with a real operating frequency", indicator));
        table.push_back({0, indicator, true});
    }
    // Real non-turbo frequencies, highest first. Turbo frequencies are never
    // reported directly.
    for (int i = ladder.guaranteed_index; i >= 0; --i) {
        PStateTableEntry entry;
        entry.pstate_index = static_cast<int>(table.size());
        entry.reported_khz = ladder.levels[static_cast<size_t>(i)].freq_khz;
        entry.turbo_indicator = false;
        table.push_back(entry);
    }
    return table;
}

PStateTableInfo inspect_pstate_table(const std::vector<PStateTableEntry>& table) {
    if (table.empty())
        throw ParseError("empty P-state table");
    PStateTableInfo info;
    size_t first_real = 0;
    if (table.front().turbo_indicator) {
        info.turbo_present = true;
        first_real = 1;
        if (table.size() < 2)
            throw ParseError("P-state table holds only the turbo indicator");
    }
    info.guaranteed_khz = table[first_real].reported_khz;
    info.real_level_count = static_cast<int>(table.size() - first_real);
    // The indicator is recognizable without the flag as well: it sits one
    // indicator-offset above the next entry.
    if (!info.turbo_present && table.size() >= 2 &&
        table[0].reported_khz == table[1].reported_khz + kIndicatorOffsetKhz) {
        info.turbo_present = true;
        info.guaranteed_khz = table[1].reported_khz;
        info.real_level_count = static_cast<int>(table.size() - 1);
    }
    return info;
}

namespace {

// A frequency counts as on-grid when it is within 1% of its nearest positive
// bus-clock multiple. Vendor tables are stepped by the bus clock but rounded
// for presentation, so an exact-multiple test would reject real ladders.
bool on_bus_grid(Khz freq, Khz bus) {
    if (bus <= 0 || freq <= 0) return false;
    const double ratio = static_cast<double>(freq) / static_cast<double>(bus);
    const double k = std::max(1.0, std::round(ratio));
    const double deviation = std::abs(static_cast<double>(freq) - k * static_cast<double>(bus));
    return deviation <= 0.01 * static_cast<double>(freq);
}

void check_ladder(const FrequencyLadder& ladder, std::vector<Violation>& out) {
    if (ladder.levels.empty()) {
        out.push_back({"empty ladder", "ladder has no levels"});
        return;
    }
    if (ladder.bus_clock_khz <= 0)
        out.push_back({"non-positive bus clock", format_msg("bus clock %lld kHz", ladder.bus_clock_khz)});
    if (ladder.guaranteed_index < 0 || ladder.guaranteed_index >= ladder.level_count()) {
        out.push_back({"bad guaranteed index",
                       format_msg("guaranteed index %lld outside 0..%lld", ladder.guaranteed_index,
                                  ladder.level_count() - 1)});
        return;
    }
    for (int i = 0; i < ladder.level_count(); ++i) {
        const auto& level = ladder.levels[static_cast<size_t>(i)];
        if (level.index != i)
            out.push_back({"level index mismatch", format_msg("level %lld carries index %lld", i, level.index)});
        if (level.freq_khz <= 0)
            out.push_back({"non-positive frequency", format_msg("level %lld: %lld kHz", i, level.freq_khz)});
        if (i > 0 && level.freq_khz <= ladder.levels[static_cast<size_t>(i - 1)].freq_khz)
            out.push_back({"non-ascending ladder", format_msg("level %lld does not exceed level %lld", i, i - 1)});
        const bool should_be_turbo = i > ladder.guaranteed_index;
        if (level.is_turbo != should_be_turbo)
            out.push_back({"turbo flag mismatch", format_msg("level %lld turbo flag disagrees with guaranteed index", i)});
        if (ladder.bus_clock_khz > 0 && level.freq_khz > 0 && !on_bus_grid(level.freq_khz, ladder.bus_clock_khz))
            out.push_back({"off-grid frequency",
                           format_msg("level %lld (%lld kHz) is not near a bus-clock multiple", i, level.freq_khz)});
    }
    if (ladder.turbo_level_count() > 0) {
        const Khz indicator = ladder.indicator_khz();
        for (const auto& level : ladder.levels)
            if (level.freq_khz == indicator)
                out.push_back({"indicator collides with real frequency",
                               format_msg("indicator %lld kHz equals a ladder level", indicator)});
    }
}

void check_lookup(const PowerLookupTable& lookup, std::vector<Violation>& out) {
    if (lookup.levels_khz.empty()) {
        out.push_back({"lookup empty levels", "lookup table has no frequency columns"});
        return;
    }
    for (size_t i = 1; i < lookup.levels_khz.size(); ++i)
        if (lookup.levels_khz[i] <= lookup.levels_khz[i - 1])
            out.push_back({"lookup non-ascending levels", "lookup frequencies must ascend"});
    const std::vector<Watts>* prev_row = nullptr;
    for (const auto& [n_active, row] : lookup.rows) {
        if (n_active <= 0)
            out.push_back({"lookup bad core count", format_msg("row for %lld active cores", n_active)});
        if (row.size() != lookup.levels_khz.size()) {
            out.push_back({"lookup row length mismatch",
                           format_msg("row for %lld active cores has %lld entries", n_active,
                                      static_cast<long long>(row.size()))});
            continue;
        }
        for (size_t j = 0; j < row.size(); ++j) {
            if (row[j] <= 0)
                out.push_back({"lookup non-positive watts", format_msg("row %lld has a non-positive entry", n_active)});
            if (j > 0 && row[j] < row[j - 1])
                out.push_back({"lookup non-monotone", format_msg("row %lld decreases with turbo level", n_active)});
            if (prev_row && row[j] < (*prev_row)[j])
                out.push_back({"lookup non-monotone", format_msg("column %lld decreases with active cores", static_cast<long long>(j))});
        }
        prev_row = &row;
    }
}

} // namespace

std::vector<Violation> validate(const ProcessorSpec& spec) {
    std::vector<Violation> out;
    if (spec.n_cores < 1)
        out.push_back({"non-positive core count", format_msg("n_cores = %lld", spec.n_cores)});
    if (spec.pow_max_watts <= 0)
        out.push_back({"non-positive power limit", "Pow_max must be positive"});
    if (spec.t_crit_c <= 0)
        out.push_back({"non-positive critical temperature", "T_crit must be positive"});
    check_ladder(spec.ladder, out);
    if (spec.power.per_core_watts.size() != spec.ladder.levels.size()) {
        out.push_back({"power/ladder length mismatch",
                       format_msg("%lld power entries for %lld ladder levels",
                                  static_cast<long long>(spec.power.per_core_watts.size()),
                                  static_cast<long long>(spec.ladder.levels.size()))});
    } else {
        for (size_t i = 0; i < spec.power.per_core_watts.size(); ++i) {
            if (spec.power.per_core_watts[i] <= 0)
                out.push_back({"non-positive watts", format_msg("level %lld", static_cast<long long>(i))});
            if (i > 0 && spec.power.per_core_watts[i] < spec.power.per_core_watts[i - 1])
                out.push_back({"non-monotone power",
                               format_msg("level %lld consumes less than level %lld", static_cast<long long>(i),
                                          static_cast<long long>(i - 1))});
        }
    }
    if (spec.power.k_proportionality.has_value() && *spec.power.k_proportionality <= 0)
        out.push_back({"invalid constant", "k_proportionality must be positive"});
    if (spec.power.lookup.has_value())
        check_lookup(*spec.power.lookup, out);
    return out;
}

std::vector<Violation> validate_state(const ProcessorSpec& spec, const ProcessorState& state) {
    std::vector<Violation> out;
    if (static_cast<int>(state.per_core_level.size()) != spec.n_cores)
        out.push_back({"state core count mismatch",
                       format_msg("%lld state entries for %lld cores",
                                  static_cast<long long>(state.per_core_level.size()), spec.n_cores)});
    for (size_t i = 0; i < state.per_core_level.size(); ++i) {
        const auto& lvl = state.per_core_level[i];
        if (lvl.has_value() && (*lvl < 0 || *lvl >= spec.ladder.level_count()))
            out.push_back({"bad level index", format_msg("core %lld at level %lld", static_cast<long long>(i), *lvl)});
    }
    if (state.temperature_c >= spec.t_crit_c)
        out.push_back({"temperature above critical",
                       format_msg("recorded temperature reached the critical limit (core count %lld)", spec.n_cores)});
    return out;
}

} // namespace turbosim
