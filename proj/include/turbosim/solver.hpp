#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "turbosim/model.hpp"

namespace turbosim {

/// Inputs to one frequency-assignment solve. Each listed core is active and
/// must at least run at the guaranteed frequency; everything else sleeps and
/// draws no power.
struct SolveRequest {
    const ProcessorSpec& spec;
    std::vector<int> active_cores;      // sorted, unique, within 0..n_cores-1
    Watts budget_watts;                 // defaults to spec.pow_max_watts
    int granularity_deciwatts = 1;      // DP budget resolution

    SolveRequest(const ProcessorSpec& s, std::vector<int> cores)
        : spec(s), active_cores(std::move(cores)), budget_watts(s.pow_max_watts) {}
    SolveRequest(const ProcessorSpec& s, std::vector<int> cores, Watts budget,
                 int granularity = 1)
        : spec(s), active_cores(std::move(cores)), budget_watts(budget),
          granularity_deciwatts(granularity) {}
};

enum class SolveMethod { exact_dp, brute_force, greedy, lookup };

struct SolveResult {
    Assignment assignment;
    Khz objective_khz = 0;   // total frequency over active cores
    SolveMethod method = SolveMethod::exact_dp;
    bool optimal = false;
};

/// The integer instance every per-core solver works on. Watts become integer
/// deciwatts by round-half-up, then budget units of `granularity_deciwatts`
/// deciwatts each; the granularity must divide each discretized power
/// exactly, while the budget floors to whole units. Choices are expressed
/// relative to the all-cores-at-guaranteed floor.
struct DiscreteInstance {
    struct Item {
        int turbo_rank;                // 1..m
        std::int64_t delta_cost_units; // power above the guaranteed level
        std::int64_t delta_value_khz;  // frequency above the guaranteed level
    };
    int n_active = 0;
    Khz guaranteed_khz = 0;
    std::int64_t floor_cost_units = 0; // n_active * units(p_0)
    std::int64_t budget_units = 0;
    std::vector<Item> items;           // identical for every core; ascending rank
};

/// Round-half-up conversion to integer deciwatts.
std::int64_t to_deciwatts(Watts w);

/// Builds the discretized instance. Throws ValidationError on a malformed
/// request (bad cores, bad budget, granularity not dividing a power).
DiscreteInstance discretize(const SolveRequest& req);

/// Exact solve by dynamic programming over (cores remaining, budget units).
/// Ties break toward lower total power, then the lexicographically smallest
/// choice vector by core id. Throws InfeasibleError when even the guaranteed
/// floor exceeds the budget.
SolveResult solve_exact_dp(const SolveRequest& req);

/// Exhaustive enumeration of all (m+1)^n_a choice vectors with the same tie
/// rule as the DP. Independent of the DP code path; used as its oracle.
/// Throws GuardError when the instance exceeds the size guard.
SolveResult solve_brute_force(const SolveRequest& req);

/// Approximation: per-core dominance filtering to the efficiency frontier,
/// then marginal upgrades in best delta-frequency-per-delta-power order until
/// nothing affordable remains. Never exceeds the budget.
SolveResult solve_greedy(const SolveRequest& req);

struct LookupChoice {
    int level_index = 0;   // position in PowerLookupTable::levels_khz
    Khz freq_khz = 0;
    Watts table_watts = 0;
};

/// All-cores-at-one-frequency solve by table lookup: the highest level whose
/// package watts fit the budget for this active-core count, or nullopt when
/// none fits. Throws Error when the table has no row for n_active.
std::optional<LookupChoice> solve_lookup_uniform(const PowerLookupTable& table, int n_active,
                                                 Watts budget_watts);

/// Decision variant: is there an assignment with total frequency >= target
/// within the budget? Returns a minimum-power witness when one exists.
/// Same floor infeasibility behaviour as the exact solver.
std::optional<Assignment> subset_sum_feasible(const SolveRequest& req, Khz target_khz);

} // namespace turbosim
