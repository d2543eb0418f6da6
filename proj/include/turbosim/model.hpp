#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace turbosim {

using Khz = std::int64_t;
using Watts = double;

/// The fake P-state a BIOS exports so the OS can ask for a turbo boost
/// without knowing the real turbo frequencies: guaranteed frequency + 1 MHz.
inline constexpr Khz kIndicatorOffsetKhz = 1000;

/// One operating point of a core.
struct FrequencyLevel {
    int index = 0;          // position in the ladder, ascending frequency
    Khz freq_khz = 0;
    bool is_turbo = false;  // above the maximum guaranteed frequency
    std::optional<double> voltage_v;
};

/// Ordered operating points of a homogeneous-core processor.
///
/// Canonical order is ascending frequency. levels[guaranteed_index] is the
/// maximum guaranteed frequency; everything above it is turbo. Levels below
/// the guaranteed frequency exist for OSPM frequency scaling but are never
/// turbo-assignment choices.
struct FrequencyLadder {
    std::vector<FrequencyLevel> levels;
    int guaranteed_index = 0;
    Khz bus_clock_khz = 133333;

    int level_count() const { return static_cast<int>(levels.size()); }
    /// Number of turbo levels above the guaranteed frequency.
    int turbo_level_count() const { return level_count() - guaranteed_index - 1; }
    const FrequencyLevel& guaranteed() const { return levels[static_cast<size_t>(guaranteed_index)]; }
    Khz guaranteed_khz() const { return guaranteed().freq_khz; }
    /// Turbo level by rank: rank 1 is the first level above guaranteed.
    const FrequencyLevel& turbo(int rank) const { return levels[static_cast<size_t>(guaranteed_index + rank)]; }
    Khz indicator_khz() const { return guaranteed_khz() + kIndicatorOffsetKhz; }
    int top_index() const { return level_count() - 1; }

    /// Build a ladder from ascending frequencies; turbo flags derive from
    /// the guaranteed index.
    static FrequencyLadder from_khz(std::vector<Khz> ascending_khz, int guaranteed_index,
                                    Khz bus_clock_khz = 133333);
};

/// One row of the P-state table a BIOS would export to the OS.
struct PStateTableEntry {
    int pstate_index = 0;   // 0 is the highest-frequency entry
    Khz reported_khz = 0;
    bool turbo_indicator = false;
};

/// What an OS-side parser can recover from an exported P-state table.
struct PStateTableInfo {
    bool turbo_present = false;
    Khz guaranteed_khz = 0;
    int real_level_count = 0;
};

/// Total-package power per (active core count, uniform turbo level).
/// Rows keyed by active core count; one watts entry per level in levels_khz.
struct PowerLookupTable {
    std::vector<Khz> levels_khz;             // ascending uniform turbo frequencies
    std::map<int, std::vector<Watts>> rows;  // active cores -> package watts per level
};

/// Per-core power at each ladder level, plus the optional voltage
/// proportionality constant and the optional uniform-frequency lookup table.
/// The per-core watts and the lookup table are separate models of the same
/// hardware and are not derived from one another.
struct PowerModel {
    std::vector<Watts> per_core_watts;            // one entry per ladder level
    std::optional<double> k_proportionality;      // watts per (volt^2 * kHz)
    std::optional<PowerLookupTable> lookup;
};

/// Static description of a processor package.
struct ProcessorSpec {
    std::string name;
    int n_cores = 1;
    Watts pow_max_watts = 0;
    double t_crit_c = 100.0;
    FrequencyLadder ladder;
    PowerModel power;
};

/// Dynamic per-core state: a ladder level index for active cores, nothing
/// for sleeping ones. Temperature is recorded state only; it constrains
/// nothing.
struct ProcessorState {
    std::vector<std::optional<int>> per_core_level;
    double temperature_c = 50.0;

    int active_count() const;
    int sleeping_count() const { return static_cast<int>(per_core_level.size()) - active_count(); }
};

/// A frequency selection for the active cores: each core either stays at the
/// guaranteed frequency (turbo_rank 0) or takes turbo level 1..m.
struct Assignment {
    struct Choice {
        int core_id = 0;
        int turbo_rank = 0;  // 0 = stay at guaranteed
    };
    std::vector<Choice> choices;  // sorted by core_id; active cores only
    Watts total_watts = 0;
    Khz total_freq_khz = 0;
};

/// P = k * V^2 * f for one operating point.
/// Throws ValidationError when the level has no voltage or k <= 0.
Watts derive_power_from_voltage(const FrequencyLevel& level, double k);

/// The P-state table the BIOS would export. With turbo enabled the first
/// entry is the indicator (guaranteed + 1000 kHz); real turbo frequencies
/// never appear. Entries are highest-frequency-first.
std::vector<PStateTableEntry> export_pstate_table(const FrequencyLadder& ladder, bool turbo_enabled);

/// OS-side view of an exported table: detects the indicator and recovers the
/// guaranteed frequency.
PStateTableInfo inspect_pstate_table(const std::vector<PStateTableEntry>& table);

/// One invariant breach found by validate(). code is stable and
/// machine-readable; message carries the specifics.
struct Violation {
    std::string code;
    std::string message;
};

/// Checks every structural invariant of a processor spec. Returns all
/// breaches; an empty result means the spec is well formed.
std::vector<Violation> validate(const ProcessorSpec& spec);

/// State-against-spec checks (level indices in range, temperature below
/// critical).
std::vector<Violation> validate_state(const ProcessorSpec& spec, const ProcessorState& state);

} // namespace turbosim
