#pragma once

#include <map>
#include <vector>

#include "turbosim/model.hpp"

namespace turbosim {

enum class GovernorKind { ondemand, userspace };

/// OSPM frequency-request policy for one simulated system.
struct GovernorPolicy {
    GovernorKind kind = GovernorKind::ondemand;
    Khz userspace_target_khz = 0;  // userspace only
    double up_threshold = 0.80;    // ondemand: request the top P-state at or above this
    double down_threshold = 0.20;  // ondemand: step one level down at or below this
};

enum class ArbiterKind { baseline_hard_limit, optimal_mckp, greedy_mckp };

/// Decides which turbo requests are honoured each tick.
///
/// The baseline reproduces the observed firmware behaviour: a fixed
/// bins-above-guaranteed limit per active-core count, clamped by the
/// BIOS-configured top frequency, blind to utilization and to the power
/// model. The MCKP kinds solve the budgeted assignment instead.
struct TurboArbiter {
    ArbiterKind kind = ArbiterKind::baseline_hard_limit;
    std::map<int, int> bin_table;  // active cores -> max turbo bins above guaranteed
    Khz bios_cap_khz = 0;          // 0 = no cap

    static std::map<int, int> default_bin_table() { return {{1, 2}, {2, 1}, {3, 1}, {4, 1}}; }
};

/// What OSPM writes to a core's frequency register. The OS sees only the
/// exported P-state table, so a request is either a real level at or below
/// the guaranteed frequency or the turbo indicator.
struct FreqRequest {
    bool indicator = false;
    int ladder_index = 0;  // meaningful when !indicator; always <= guaranteed index

    friend bool operator==(const FreqRequest&, const FreqRequest&) = default;
};

/// Maps a userspace target frequency onto the request space: the indicator
/// when the target is the exported indicator frequency, otherwise the
/// nearest real level at or below the guaranteed frequency.
FreqRequest resolve_userspace_target(const FrequencyLadder& ladder, Khz target_khz, bool turbo_enabled);

/// One governor decision. utilization must be in [0,1]; previous is what the
/// governor last requested for this core.
FreqRequest ospm_request(const GovernorPolicy& policy, double utilization, FreqRequest previous,
                         const FrequencyLadder& ladder, bool turbo_enabled);

/// Hard-limit turbo arbitration. requests and the returned granted ladder
/// levels run parallel to active_cores. n_a is active_cores.size();
/// utilization plays no part.
std::vector<int> arbitrate_baseline(const TurboArbiter& arbiter, const std::vector<FreqRequest>& requests,
                                    const std::vector<int>& active_cores, const ProcessorSpec& spec);

/// Budget-aware arbitration: non-turbo requests are granted verbatim and
/// their power is reserved first; indicator requests form the knapsack
/// classes, solved exactly or greedily per arbiter.kind. Throws
/// InfeasibleError when the guaranteed floor cannot fit the budget.
std::vector<int> arbitrate_optimal(const TurboArbiter& arbiter, const std::vector<FreqRequest>& requests,
                                   const std::vector<int>& active_cores, const ProcessorSpec& spec,
                                   Watts budget_watts, int granularity_deciwatts = 1);

} // namespace turbosim
