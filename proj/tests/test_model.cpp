#include <doctest.h>

#include <random>

#include "turbosim/errors.hpp"
#include "turbosim/model.hpp"

using namespace turbosim;

namespace {

FrequencyLadder i7_ladder() {
    std::vector<Khz> levels;
    for (int k = 12; k <= 26; ++k) levels.push_back(133000 * static_cast<Khz>(k));
    return FrequencyLadder::from_khz(std::move(levels), 12, 133000);  // guaranteed 3192000
}

ProcessorSpec i7_spec() {
    ProcessorSpec spec;
    spec.name = "i7";
    spec.n_cores = 4;
    spec.pow_max_watts = 130.0;
    spec.t_crit_c = 100.0;
    spec.ladder = i7_ladder();
    spec.power.per_core_watts = {6.0, 6.8, 7.6, 8.5, 9.4, 10.4, 11.4, 12.5,
                                 13.7, 15.0, 16.4, 18.0, 19.8, 22.4, 25.5};
    return spec;
}

} // namespace

TEST_CASE("ladder accessors") {
    const FrequencyLadder ladder = i7_ladder();
    CHECK(ladder.level_count() == 15);
    CHECK(ladder.guaranteed_khz() == 3192000);
    CHECK(ladder.turbo_level_count() == 2);
    CHECK(ladder.turbo(1).freq_khz == 3325000);
    CHECK(ladder.turbo(2).freq_khz == 3458000);
    CHECK(ladder.indicator_khz() == 3193000);
    CHECK(ladder.levels.front().is_turbo == false);
    CHECK(ladder.levels.back().is_turbo == true);
    CHECK(ladder.guaranteed().is_turbo == false);
}

TEST_CASE("pstate export with turbo matches the BIOS table shape") {
    const auto table = export_pstate_table(i7_ladder(), true);
    REQUIRE(table.size() == 14);  // indicator + guaranteed..lowest
    CHECK(table[0].reported_khz == 3193000);
    CHECK(table[0].turbo_indicator);
    CHECK(table[0].pstate_index == 0);
    CHECK(table[1].reported_khz == 3192000);
    CHECK_FALSE(table[1].turbo_indicator);
    CHECK(table.back().reported_khz == 1596000);
    for (const auto& entry : table) {
        CHECK(entry.reported_khz != 3325000);
        CHECK(entry.reported_khz != 3458000);
    }
}

TEST_CASE("pstate export without turbo lists real frequencies only") {
    const auto table = export_pstate_table(i7_ladder(), false);
    REQUIRE(table.size() == 13);
    CHECK(table[0].reported_khz == 3192000);
    CHECK_FALSE(table[0].turbo_indicator);
    CHECK(table.back().reported_khz == 1596000);
}

TEST_CASE("pstate export with no turbo levels equals the turbo-off table") {
    auto ladder = FrequencyLadder::from_khz({1596000, 3192000}, 1, 133000);
    const auto on = export_pstate_table(ladder, true);
    const auto off = export_pstate_table(ladder, false);
    REQUIRE(on.size() == off.size());
    for (size_t i = 0; i < on.size(); ++i) {
        CHECK(on[i].reported_khz == off[i].reported_khz);
        CHECK(on[i].turbo_indicator == off[i].turbo_indicator);
    }
}

TEST_CASE("pstate round-trip recovers guaranteed frequency and turbo presence") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 200; ++iter) {
        const Khz bus = 133000;
        const int ratio = 10 + static_cast<int>(rng() % 15);
        const int below = static_cast<int>(rng() % 5);
        const int m = static_cast<int>(rng() % 4);
        std::vector<Khz> levels;
        for (int k = ratio - below; k <= ratio + m; ++k) levels.push_back(bus * k);
        const auto ladder = FrequencyLadder::from_khz(std::move(levels), below, bus);
        const bool turbo = rng() % 2 == 0;

        const auto table = export_pstate_table(ladder, turbo);
        const auto info = inspect_pstate_table(table);
        CHECK(info.guaranteed_khz == ladder.guaranteed_khz());
        CHECK(info.turbo_present == (turbo && ladder.turbo_level_count() > 0));
        CHECK(info.real_level_count == ladder.guaranteed_index + 1);

        // The indicator frequency is never a real operating point.
        if (info.turbo_present)
            for (const auto& level : ladder.levels) CHECK(level.freq_khz != table[0].reported_khz);
    }
}

TEST_CASE("derive_power_from_voltage follows k * V^2 * f") {
    FrequencyLevel level;
    level.freq_khz = 1'000'000;
    level.voltage_v = 1.0;
    CHECK(derive_power_from_voltage(level, 1e-7) == doctest::Approx(0.1));

    level.voltage_v = 0.0;
    CHECK(derive_power_from_voltage(level, 1e-7) == doctest::Approx(0.0));

    level.voltage_v.reset();
    CHECK_THROWS_WITH_AS(derive_power_from_voltage(level, 1e-7), "voltage unavailable", ValidationError);
    level.voltage_v = 1.0;
    CHECK_THROWS_WITH_AS(derive_power_from_voltage(level, 0.0), "invalid constant", ValidationError);
}

TEST_CASE("derive_power_from_voltage is monotone and quadratic in voltage") {
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        FrequencyLevel level;
        level.freq_khz = 100'000 + static_cast<Khz>(rng() % 3'000'000);
        const double v = 0.5 + static_cast<double>(rng() % 1000) / 1000.0;
        const double k = 1e-8 + static_cast<double>(rng() % 100) * 1e-9;

        level.voltage_v = v;
        const double base = derive_power_from_voltage(level, k);
        level.voltage_v = 2.0 * v;
        CHECK(derive_power_from_voltage(level, k) == doctest::Approx(4.0 * base));

        FrequencyLevel faster = level;
        faster.voltage_v = v;
        faster.freq_khz = level.freq_khz * 2;
        CHECK(derive_power_from_voltage(faster, k) == doctest::Approx(2.0 * base));
    }
}

TEST_CASE("validate accepts the well-formed i7-like spec") {
    CHECK(validate(i7_spec()).empty());
}

TEST_CASE("validate reports power/ladder length mismatch") {
    ProcessorSpec spec = i7_spec();
    spec.power.per_core_watts.pop_back();
    const auto violations = validate(spec);
    REQUIRE_FALSE(violations.empty());
    CHECK(violations[0].code == "power/ladder length mismatch");
}

TEST_CASE("validate reports non-monotone power") {
    ProcessorSpec spec = i7_spec();
    spec.power.per_core_watts[13] = 5.0;  // cheaper than every lower level
    bool found = false;
    for (const auto& v : validate(spec))
        if (v.code == "non-monotone power") found = true;
    CHECK(found);
}

TEST_CASE("validate flags structural ladder faults") {
    ProcessorSpec spec = i7_spec();
    spec.ladder.levels[3].freq_khz = spec.ladder.levels[2].freq_khz;  // not ascending
    bool found = false;
    for (const auto& v : validate(spec))
        if (v.code == "non-ascending ladder") found = true;
    CHECK(found);

    spec = i7_spec();
    spec.ladder.guaranteed_index = 99;
    found = false;
    for (const auto& v : validate(spec))
        if (v.code == "bad guaranteed index") found = true;
    CHECK(found);

    spec = i7_spec();
    spec.ladder.levels[5].freq_khz = 2'300'000;  // between grid points, off by >1%
    spec.ladder.levels[5].index = 5;
    found = false;
    for (const auto& v : validate(spec))
        if (v.code == "off-grid frequency" || v.code == "non-ascending ladder") found = true;
    CHECK(found);
}

TEST_CASE("validate checks the lookup table when present") {
    ProcessorSpec spec = i7_spec();
    PowerLookupTable lookup;
    lookup.levels_khz = {3325000, 3458000};
    lookup.rows[1] = {20.0, 25.0};
    lookup.rows[2] = {18.0, 26.0};  // column 0 decreases with more cores
    spec.power.lookup = lookup;
    bool found = false;
    for (const auto& v : validate(spec))
        if (v.code == "lookup non-monotone") found = true;
    CHECK(found);
}

TEST_CASE("validate_state checks levels and temperature") {
    const ProcessorSpec spec = i7_spec();
    ProcessorState state;
    state.per_core_level = {std::optional<int>(12), std::nullopt, std::optional<int>(14), std::optional<int>(0)};
    state.temperature_c = 55.0;
    CHECK(state.active_count() == 3);
    CHECK(state.sleeping_count() == 1);
    CHECK(validate_state(spec, state).empty());

    state.per_core_level[0] = 99;
    state.temperature_c = 150.0;
    const auto violations = validate_state(spec, state);
    bool bad_level = false, hot = false;
    for (const auto& v : violations) {
        if (v.code == "bad level index") bad_level = true;
        if (v.code == "temperature above critical") hot = true;
    }
    CHECK(bad_level);
    CHECK(hot);
}
