#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "turbosim/errors.hpp"
#include "turbosim/trace_io.hpp"

using namespace turbosim;

TEST_CASE("well-formed two-core three-tick file parses") {
    const std::string text =
        "time_s,core_id,utilization\n"
        "0.000,0,1.000000\n"
        "0.000,1,0.500000\n"
        "1.000,0,0.250000\n"
        "1.000,1,0.000000\n"
        "2.000,0,1.000000\n"
        "2.000,1,1.000000\n";
    const InputTrace trace = parse_trace(text);
    CHECK(trace.n_cores == 2);
    REQUIRE(trace.ticks.size() == 3);
    CHECK(trace.ticks[0].utilization[1] == doctest::Approx(0.5));
    CHECK(trace.ticks[1].utilization[0] == doctest::Approx(0.25));
}

TEST_CASE("out-of-range utilization names the offending line") {
    const std::string text =
        "time_s,core_id,utilization\n"
        "0.000,0,1.000000\n"
        "0.000,1,0.500000\n"
        "1.000,0,1.500000\n"
        "1.000,1,0.000000\n";
    try {
        parse_trace(text);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
}

TEST_CASE("header-only and unsorted traces are rejected") {
    CHECK_THROWS_WITH_AS(parse_trace("time_s,core_id,utilization\n"), "empty trace", ParseError);
    CHECK_THROWS_AS(parse_trace(""), ParseError);

    const std::string unsorted =
        "time_s,core_id,utilization\n"
        "1.000,0,1.000000\n"
        "0.000,0,1.000000\n";
    CHECK_THROWS_AS(parse_trace(unsorted), ParseError);

    const std::string missing_core =
        "time_s,core_id,utilization\n"
        "0.000,0,1.000000\n"
        "0.000,1,1.000000\n"
        "1.000,0,1.000000\n"
        "2.000,0,1.000000\n"
        "2.000,1,1.000000\n";
    CHECK_THROWS_AS(parse_trace(missing_core), ParseError);
}

TEST_CASE("generated constant workload covers every core and tick") {
    WorkloadSpec spec;
    spec.n_cores = 4;
    spec.duration_ticks = 10;
    spec.pattern = WorkloadSpec::Pattern::constant;
    spec.u = 1.0;
    const InputTrace trace = generate_trace(spec);
    REQUIRE(trace.ticks.size() == 10);
    int rows = 0;
    for (const auto& tick : trace.ticks)
        for (double u : tick.utilization) {
            CHECK(u == doctest::Approx(1.0));
            ++rows;
        }
    CHECK(rows == 40);
}

TEST_CASE("square wave alternates every half period") {
    WorkloadSpec spec;
    spec.n_cores = 1;
    spec.duration_ticks = 8;
    spec.pattern = WorkloadSpec::Pattern::square;
    spec.period = 4;
    spec.hi = 0.9;
    spec.lo = 0.1;
    const InputTrace trace = generate_trace(spec);
    const std::vector<double> expect{0.9, 0.9, 0.1, 0.1, 0.9, 0.9, 0.1, 0.1};
    for (int t = 0; t < 8; ++t)
        CHECK(trace.ticks[static_cast<size_t>(t)].utilization[0] == doctest::Approx(expect[static_cast<size_t>(t)]));
}

TEST_CASE("equal seeds generate identical random walks") {
    WorkloadSpec spec;
    spec.n_cores = 3;
    spec.duration_ticks = 50;
    spec.pattern = WorkloadSpec::Pattern::random_walk;
    spec.step = 0.2;
    spec.seed = 1234;
    CHECK(emit_trace(generate_trace(spec)) == emit_trace(generate_trace(spec)));
    WorkloadSpec other = spec;
    other.seed = 1235;
    CHECK(emit_trace(generate_trace(spec)) != emit_trace(generate_trace(other)));
}

TEST_CASE("property: emit then parse is the identity on generated traces") {
    std::mt19937_64 rng(51);
    for (int iter = 0; iter < 40; ++iter) {
        WorkloadSpec spec;
        spec.n_cores = 1 + static_cast<int>(rng() % 6);
        spec.duration_ticks = 1 + static_cast<int>(rng() % 30);
        spec.pattern = static_cast<WorkloadSpec::Pattern>(rng() % 4);
        spec.period = 2 + static_cast<int>(rng() % 6);
        spec.step = 0.05 + static_cast<double>(rng() % 40) / 100.0;
        spec.u = static_cast<double>(rng() % 101) / 100.0;
        spec.seed = rng();

        const InputTrace trace = generate_trace(spec);
        const std::string bytes = emit_trace(trace);
        const InputTrace reparsed = parse_trace(bytes);

        REQUIRE(reparsed.n_cores == trace.n_cores);
        REQUIRE(reparsed.ticks.size() == trace.ticks.size());
        for (size_t t = 0; t < trace.ticks.size(); ++t) {
            CHECK(reparsed.ticks[t].time_s == trace.ticks[t].time_s);
            CHECK(reparsed.ticks[t].utilization == trace.ticks[t].utilization);
        }
        CHECK(emit_trace(reparsed) == bytes);
    }
}

TEST_CASE("plot emission writes one series per core plus the reference line") {
    const auto dir = std::filesystem::temp_directory_path() / "turbosim_plot_test";
    std::filesystem::remove_all(dir);

    ProcessorSpec spec;
    spec.n_cores = 3;
    spec.pow_max_watts = 100.0;
    spec.ladder = FrequencyLadder::from_khz({3192000, 3325000}, 0, 133000);
    spec.power.per_core_watts = {19.8, 22.4};

    std::vector<SimTraceRow> rows;
    for (int t = 0; t < 3; ++t)
        for (int core = 0; core < 3; ++core) {
            SimTraceRow row;
            row.time_s = t;
            row.core_id = core;
            row.utilization = core == 2 ? 0.0 : 1.0;
            row.granted_khz = core == 2 ? 0 : 3325000;
            if (core != 2) row.measured_khz = 3325000;
            rows.push_back(row);
        }
    emit_plot_data(rows, spec, dir);

    for (int core = 0; core < 3; ++core)
        CHECK(std::filesystem::exists(dir / ("core_" + std::to_string(core) + ".csv")));
    std::ifstream ref(dir / "reference.csv");
    std::string header, value;
    std::getline(ref, header);
    std::getline(ref, value);
    CHECK(header == "guaranteed_khz");
    CHECK(value == "3192000");

    // The halted core keeps its utilization column; the measured field stays empty.
    std::ifstream halted(dir / "core_2.csv");
    std::string line;
    std::getline(halted, line);  // header
    std::getline(halted, line);
    CHECK(line == "0.000,,0.000000");
    std::filesystem::remove_all(dir);
}

TEST_CASE("output trace renders halted measurements as empty fields") {
    SimTraceRow active;
    active.time_s = 0.0;
    active.core_id = 0;
    active.utilization = 1.0;
    active.granted_khz = 3325000;
    active.measured_khz = 3325000;
    active.package_watts = 22.4;
    SimTraceRow asleep;
    asleep.time_s = 0.0;
    asleep.core_id = 1;
    asleep.package_watts = 22.4;

    const std::string text = emit_output_trace({active, asleep});
    CHECK(text ==
          "time_s,core_id,utilization,granted_khz,measured_khz,package_watts\n"
          "0.000,0,1.000000,3325000,3325000,22.400\n"
          "0.000,1,0.000000,0,,22.400\n");
}
