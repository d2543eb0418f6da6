#include <doctest.h>

#include <numeric>
#include <random>

#include "support/instance_gen.hpp"
#include "turbosim/errors.hpp"
#include "turbosim/governor.hpp"
#include "turbosim/solver.hpp"

using namespace turbosim;

namespace {

ProcessorSpec i7_spec() {
    std::vector<Khz> levels;
    for (int k = 12; k <= 26; ++k) levels.push_back(133000 * static_cast<Khz>(k));
    ProcessorSpec spec;
    spec.name = "i7";
    spec.n_cores = 4;
    spec.pow_max_watts = 130.0;
    spec.ladder = FrequencyLadder::from_khz(std::move(levels), 12, 133000);
    spec.power.per_core_watts = {6.0, 6.8, 7.6, 8.5, 9.4, 10.4, 11.4, 12.5,
                                 13.7, 15.0, 16.4, 18.0, 19.8, 22.4, 25.5};
    return spec;
}

ProcessorSpec modified_bios_spec() {
    std::vector<Khz> levels;
    for (int k = 12; k <= 26; ++k) levels.push_back(133000 * static_cast<Khz>(k));
    ProcessorSpec spec;
    spec.name = "modified";
    spec.n_cores = 4;
    spec.pow_max_watts = 78.0;
    spec.ladder = FrequencyLadder::from_khz(std::move(levels), 10, 133000);  // guaranteed 2926000
    spec.power.per_core_watts = {6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.5, 14.0,
                                 15.5, 17.5, 20.0, 22.0, 24.0, 26.0, 40.0};
    return spec;
}

TurboArbiter baseline_default() {
    return {ArbiterKind::baseline_hard_limit, TurboArbiter::default_bin_table(), 0};
}

} // namespace

TEST_CASE("userspace requests its target level regardless of utilization") {
    const auto spec = i7_spec();
    GovernorPolicy policy{GovernorKind::userspace, 3192000, 0.8, 0.2};
    for (double u : {0.0, 0.3, 1.0}) {
        const auto req = ospm_request(policy, u, {false, 0}, spec.ladder, true);
        CHECK_FALSE(req.indicator);
        CHECK(req.ladder_index == 12);
    }
    // A target at the exported indicator frequency asks for turbo.
    policy.userspace_target_khz = 3193000;
    const auto boost = ospm_request(policy, 0.0, {false, 0}, spec.ladder, true);
    CHECK(boost.indicator);
    // With turbo disabled the same target falls back to the guaranteed level.
    const auto capped = ospm_request(policy, 0.0, {false, 0}, spec.ladder, false);
    CHECK_FALSE(capped.indicator);
    CHECK(capped.ladder_index == 12);
}

TEST_CASE("ondemand saturated utilization requests the top exported entry") {
    const auto spec = i7_spec();
    GovernorPolicy policy;  // ondemand defaults
    const auto req = ospm_request(policy, 1.0, {false, 5}, spec.ladder, true);
    CHECK(req.indicator);
    const auto no_turbo = ospm_request(policy, 1.0, {false, 5}, spec.ladder, false);
    CHECK_FALSE(no_turbo.indicator);
    CHECK(no_turbo.ladder_index == 12);
}

TEST_CASE("ondemand idle at the minimum stays at the minimum") {
    const auto spec = i7_spec();
    GovernorPolicy policy;
    const auto req = ospm_request(policy, 0.0, {false, 0}, spec.ladder, true);
    CHECK_FALSE(req.indicator);
    CHECK(req.ladder_index == 0);

    // Stepping down walks one real level at a time, indicator first.
    const auto from_boost = ospm_request(policy, 0.0, {true, 12}, spec.ladder, true);
    CHECK_FALSE(from_boost.indicator);
    CHECK(from_boost.ladder_index == 12);
    const auto mid = ospm_request(policy, 0.1, {false, 7}, spec.ladder, true);
    CHECK(mid.ladder_index == 6);
}

TEST_CASE("ondemand holds between thresholds") {
    const auto spec = i7_spec();
    GovernorPolicy policy;
    const FreqRequest prev{false, 9};
    CHECK(ospm_request(policy, 0.5, prev, spec.ladder, true) == prev);
}

TEST_CASE("baseline grants follow the bin table") {
    const auto spec = i7_spec();
    const auto arbiter = baseline_default();

    // Single active core boosts two bins: 3.458 GHz on this ladder.
    auto granted = arbitrate_baseline(arbiter, {{true, 12}}, {0}, spec);
    CHECK(granted == std::vector<int>{14});

    // Three active cores all requesting turbo land one bin up.
    granted = arbitrate_baseline(arbiter, {{true, 12}, {true, 12}, {true, 12}}, {0, 1, 2}, spec);
    CHECK(granted == std::vector<int>{13, 13, 13});

    // Non-turbo requests pass through untouched.
    granted = arbitrate_baseline(arbiter, {{true, 12}, {false, 4}}, {0, 1}, spec);
    CHECK(granted == std::vector<int>{13, 4});
}

TEST_CASE("baseline clamps to the BIOS frequency cap") {
    const auto spec = modified_bios_spec();
    TurboArbiter arbiter{ArbiterKind::baseline_hard_limit, {{1, 4}, {2, 3}, {3, 3}, {4, 2}}, 3192000};
    // Bin table would allow 2926000 + 3 bins = 3325000; the cap holds it at 3192000.
    const auto granted =
        arbitrate_baseline(arbiter, {{true, 10}, {true, 10}, {true, 10}}, {0, 1, 2}, spec);
    for (int level : granted) CHECK(spec.ladder.levels[static_cast<size_t>(level)].freq_khz == 3192000);
}

TEST_CASE("baseline grant never rises with the active-core count") {
    const auto spec = i7_spec();
    const auto arbiter = baseline_default();
    Khz prev = std::numeric_limits<Khz>::max();
    for (int n_active = 1; n_active <= 4; ++n_active) {
        std::vector<int> cores(static_cast<size_t>(n_active));
        std::iota(cores.begin(), cores.end(), 0);
        std::vector<FreqRequest> requests(cores.size(), {true, 12});
        const auto granted = arbitrate_baseline(arbiter, requests, cores, spec);
        const Khz khz = spec.ladder.levels[static_cast<size_t>(granted[0])].freq_khz;
        CHECK(khz <= prev);
        prev = khz;
    }
}

TEST_CASE("optimal arbitration with no boost requests grants verbatim") {
    const auto spec = i7_spec();
    TurboArbiter arbiter{ArbiterKind::optimal_mckp, {}, 0};
    const auto granted =
        arbitrate_optimal(arbiter, {{false, 3}, {false, 12}}, {0, 2}, spec, 130.0);
    CHECK(granted == std::vector<int>{3, 12});
}

TEST_CASE("optimal arbitration realizes the frequency the hard limits leave behind") {
    // Three saturated cores on the modified-BIOS ladder: the baseline stops at
    // 3.192 GHz, yet 3 x 3.325 GHz fits the 78 W budget.
    const auto spec = modified_bios_spec();
    const std::vector<int> cores{0, 1, 2};
    const std::vector<FreqRequest> requests(3, {true, 10});

    TurboArbiter baseline{ArbiterKind::baseline_hard_limit, {{1, 4}, {2, 3}, {3, 3}, {4, 2}}, 3192000};
    const auto hard = arbitrate_baseline(baseline, requests, cores, spec);
    for (int level : hard) CHECK(spec.ladder.levels[static_cast<size_t>(level)].freq_khz == 3192000);

    TurboArbiter optimal{ArbiterKind::optimal_mckp, {}, 0};
    const auto best = arbitrate_optimal(optimal, requests, cores, spec, 78.0);
    for (int level : best) CHECK(spec.ladder.levels[static_cast<size_t>(level)].freq_khz == 3325000);

    // Cross-check against the enumeration oracle.
    const auto oracle = solve_brute_force(SolveRequest(spec, cores, 78.0));
    CHECK(oracle.objective_khz == 3 * 3325000);

    Watts total = 0;
    for (int level : best) total += spec.power.per_core_watts[static_cast<size_t>(level)];
    CHECK(total <= 78.0 + 1e-9);
}

TEST_CASE("optimal arbitration denies all boosts when the budget sits at the floor") {
    const auto spec = i7_spec();
    TurboArbiter arbiter{ArbiterKind::optimal_mckp, {}, 0};
    const std::vector<FreqRequest> requests(4, {true, 12});
    const auto granted = arbitrate_optimal(arbiter, requests, {0, 1, 2, 3}, spec, 4 * 19.8);
    CHECK(granted == std::vector<int>{12, 12, 12, 12});
}

TEST_CASE("optimal arbitration propagates floor infeasibility") {
    const auto spec = i7_spec();
    TurboArbiter arbiter{ArbiterKind::optimal_mckp, {}, 0};
    CHECK_THROWS_AS(arbitrate_optimal(arbiter, {{true, 12}}, {0}, spec, 1.0), InfeasibleError);
    CHECK_THROWS_AS(
        arbitrate_optimal(arbiter, {{true, 12}, {false, 12}}, {0, 1}, spec, 20.0),
        InfeasibleError);  // verbatim grant reserves 19.8 W, floor cannot fit
}

TEST_CASE("property: optimal total grant dominates affordable baseline grants") {
    std::mt19937_64 rng(48);
    int checked = 0;
    for (int iter = 0; iter < 400; ++iter) {
        const auto inst = testgen::random_instance(rng, 6, 4, 0.0);
        const auto& spec = inst.spec;
        const int n_active = static_cast<int>(inst.active_cores.size());
        std::vector<FreqRequest> requests;
        for (int i = 0; i < n_active; ++i)
            requests.push_back(rng() % 4 == 0 ? FreqRequest{false, spec.ladder.guaranteed_index}
                                              : FreqRequest{true, spec.ladder.guaranteed_index});

        TurboArbiter baseline{ArbiterKind::baseline_hard_limit, TurboArbiter::default_bin_table(), 0};
        const auto hard = arbitrate_baseline(baseline, requests, inst.active_cores, spec);
        Watts hard_watts = 0;
        for (int level : hard) hard_watts += spec.power.per_core_watts[static_cast<size_t>(level)];
        if (hard_watts > inst.budget_watts) continue;  // baseline busts the budget: no dominance claim

        for (ArbiterKind kind : {ArbiterKind::optimal_mckp, ArbiterKind::greedy_mckp}) {
            if (kind == ArbiterKind::greedy_mckp && iter % 2) continue;
            TurboArbiter arbiter{kind, {}, 0};
            const auto granted =
                arbitrate_optimal(arbiter, requests, inst.active_cores, spec, inst.budget_watts);
            Khz hard_sum = 0, opt_sum = 0;
            Watts opt_watts = 0;
            for (size_t i = 0; i < granted.size(); ++i) {
                hard_sum += spec.ladder.levels[static_cast<size_t>(hard[i])].freq_khz;
                opt_sum += spec.ladder.levels[static_cast<size_t>(granted[i])].freq_khz;
                opt_watts += spec.power.per_core_watts[static_cast<size_t>(granted[i])];
            }
            if (kind == ArbiterKind::optimal_mckp) CHECK(opt_sum >= hard_sum);
            CHECK(opt_watts <= inst.budget_watts + 1e-9);
            ++checked;
        }
    }
    CHECK(checked > 100);
}
