#include "turbosim/governor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "turbosim/errors.hpp"
#include "turbosim/solver.hpp"

namespace turbosim {

FreqRequest resolve_userspace_target(const FrequencyLadder& ladder, Khz target_khz, bool turbo_enabled) {
    if (turbo_enabled && ladder.turbo_level_count() > 0 && target_khz == ladder.indicator_khz())
        return {true, ladder.guaranteed_index};
    int best = ladder.guaranteed_index;
    Khz best_dist = std::numeric_limits<Khz>::max();
    for (int i = 0; i <= ladder.guaranteed_index; ++i) {
        const Khz dist = std::abs(ladder.levels[static_cast<size_t>(i)].freq_khz - target_khz);
        if (dist < best_dist) {
            best_dist = dist;
            best = i;
        }
    }
    return {false, best};
}

FreqRequest ospm_request(const GovernorPolicy& policy, double utilization, FreqRequest previous,
                         const FrequencyLadder& ladder, bool turbo_enabled) {
    if (policy.kind == GovernorKind::userspace)
        return resolve_userspace_target(ladder, policy.userspace_target_khz, turbo_enabled);

    const bool indicator_exported = turbo_enabled && ladder.turbo_level_count() > 0;
    if (utilization >= policy.up_threshold) {
        // Top of the exported table: the indicator when turbo is on.
        if (indicator_exported) return {true, ladder.guaranteed_index};
        return {false, ladder.guaranteed_index};
    }
    if (utilization <= policy.down_threshold) {
        if (previous.indicator) return {false, ladder.guaranteed_index};
        return {false, std::max(0, previous.ladder_index - 1)};
    }
    return previous;
}

namespace {

int bins_for_active_count(const TurboArbiter& arbiter, int n_active) {
    const auto it = arbiter.bin_table.find(n_active);
    if (it != arbiter.bin_table.end()) return std::max(0, it->second);
    // Beyond the table the firmware still allows a single bin.
    return arbiter.bin_table.empty() ? 0 : 1;
}

int cap_ladder_index(const FrequencyLadder& ladder, int index, Khz cap_khz) {
    if (cap_khz <= 0) return index;
    while (index > ladder.guaranteed_index &&
           ladder.levels[static_cast<size_t>(index)].freq_khz > cap_khz)
        --index;
    return index;
}

} // namespace

std::vector<int> arbitrate_baseline(const TurboArbiter& arbiter, const std::vector<FreqRequest>& requests,
                                    const std::vector<int>& active_cores, const ProcessorSpec& spec) {
    if (requests.size() != active_cores.size())
        throw ValidationError("one request per active core required");
    const auto& ladder = spec.ladder;
    const int n_active = static_cast<int>(active_cores.size());
    const int bins = bins_for_active_count(arbiter, n_active);
    const int turbo_index = cap_ladder_index(
        ladder, std::min(ladder.guaranteed_index + bins, ladder.top_index()), arbiter.bios_cap_khz);

    std::vector<int> granted(requests.size());
    for (size_t i = 0; i < requests.size(); ++i)
        granted[i] = requests[i].indicator ? turbo_index : requests[i].ladder_index;
    return granted;
}

std::vector<int> arbitrate_optimal(const TurboArbiter& arbiter, const std::vector<FreqRequest>& requests,
                                   const std::vector<int>& active_cores, const ProcessorSpec& spec,
                                   Watts budget_watts, int granularity_deciwatts) {
    if (requests.size() != active_cores.size())
        throw ValidationError("one request per active core required");

    std::vector<int> granted(requests.size(), 0);
    std::vector<int> boost_cores;
    Watts reserved = 0;
    for (size_t i = 0; i < requests.size(); ++i) {
        if (requests[i].indicator) {
            boost_cores.push_back(active_cores[i]);
        } else {
            granted[i] = requests[i].ladder_index;
            reserved += spec.power.per_core_watts[static_cast<size_t>(requests[i].ladder_index)];
        }
    }
    if (boost_cores.empty()) return granted;
    if (budget_watts - reserved <= 0)
        throw InfeasibleError("infeasible: guaranteed floor exceeds budget");

    SolveRequest solve_req(spec, boost_cores, budget_watts - reserved, granularity_deciwatts);
    const SolveResult result = arbiter.kind == ArbiterKind::greedy_mckp ? solve_greedy(solve_req)
                                                                        : solve_exact_dp(solve_req);
    size_t choice_pos = 0;
    for (size_t i = 0; i < requests.size(); ++i) {
        if (!requests[i].indicator) continue;
        const int rank = result.assignment.choices[choice_pos++].turbo_rank;
        granted[i] = spec.ladder.guaranteed_index + rank;
    }
    return granted;
}

} // namespace turbosim
