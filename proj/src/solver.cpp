#include "turbosim/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "turbosim/errors.hpp"
#include "turbosim/kernels.hpp"

namespace turbosim {

namespace {

constexpr std::int64_t kOracleGuard = 10'000'000;

const char* kInfeasibleMsg = "infeasible: guaranteed floor exceeds budget";

std::string fmt(const char* f, long long a, long long b = 0) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), f, a, b);
    return buf;
}

void check_request(const SolveRequest& req) {
    const auto& spec = req.spec;
    if (req.budget_watts <= 0)
        throw ValidationError("budget must be positive");
    if (req.granularity_deciwatts <= 0)
        throw ValidationError("granularity must be positive");
    int prev = -1;
    for (int core : req.active_cores) {
        if (core < 0 || core >= spec.n_cores)
            throw ValidationError(fmt("active core %lld outside 0..%lld", core, spec.n_cores - 1));
        if (core <= prev)
            throw ValidationError("active cores must be sorted and unique");
        prev = core;
    }
}

Khz level_khz(const ProcessorSpec& spec, int rank) {
    return spec.ladder.levels[static_cast<size_t>(spec.ladder.guaranteed_index + rank)].freq_khz;
}

Watts level_watts(const ProcessorSpec& spec, int rank) {
    return spec.power.per_core_watts[static_cast<size_t>(spec.ladder.guaranteed_index + rank)];
}

Assignment build_assignment(const SolveRequest& req, const std::vector<int>& ranks) {
    Assignment a;
    a.choices.reserve(ranks.size());
    for (size_t i = 0; i < ranks.size(); ++i) {
        a.choices.push_back({req.active_cores[i], ranks[i]});
        a.total_watts += level_watts(req.spec, ranks[i]);
        a.total_freq_khz += level_khz(req.spec, ranks[i]);
    }
    return a;
}

// Suffix DP table over (cores remaining, budget units). value/cost are the
// final rows for all n_active cores; choice_rows[r] holds, for every
// capacity, the decision of the first core when r cores remain.
struct DpTable {
    std::vector<std::int64_t> value;
    std::vector<std::int64_t> cost;
    std::vector<std::vector<std::uint16_t>> choice_rows; // index 1..n_active
    std::int64_t capacity = 0;                           // usable delta budget
};

DpTable run_dp(const DiscreteInstance& inst) {
    DpTable table;
    // Spending more than every core fully upgraded is pointless; capping the
    // row keeps huge budgets cheap.
    std::int64_t max_delta = 0;
    for (const auto& item : inst.items) max_delta = std::max(max_delta, item.delta_cost_units);
    const std::int64_t spare = inst.budget_units - inst.floor_cost_units;
    table.capacity = std::min(spare, max_delta * inst.n_active);
    if (static_cast<std::int64_t>(inst.n_active + 1) * (table.capacity + 1) > 400'000'000)
        throw GuardError("exact DP table too large; raise the granularity");
    const size_t row = static_cast<size_t>(table.capacity) + 1;

    table.value.assign(row, 0);
    table.cost.assign(row, 0);
    std::vector<std::int64_t> next_value(row), next_cost(row), choice(row);
    table.choice_rows.resize(static_cast<size_t>(inst.n_active) + 1);

    for (int remaining = 1; remaining <= inst.n_active; ++remaining) {
        // Choice 0: this core stays at the guaranteed frequency.
        std::copy(table.value.begin(), table.value.end(), next_value.begin());
        std::copy(table.cost.begin(), table.cost.end(), next_cost.begin());
        std::fill(choice.begin(), choice.end(), 0);
        for (const auto& item : inst.items) {
            if (item.delta_cost_units > table.capacity) continue;
            kernels::relax_shift(table.value.data(), table.cost.data(), item.delta_value_khz,
                                 item.delta_cost_units, item.turbo_rank,
                                 static_cast<size_t>(item.delta_cost_units), next_value.data(),
                                 next_cost.data(), choice.data(), row);
        }
        table.value.swap(next_value);
        table.cost.swap(next_cost);
        auto& stored = table.choice_rows[static_cast<size_t>(remaining)];
        stored.resize(row);
        for (size_t w = 0; w < row; ++w) stored[w] = static_cast<std::uint16_t>(choice[w]);
    }
    return table;
}

std::vector<int> reconstruct(const DiscreteInstance& inst, const DpTable& table, std::int64_t start_w) {
    std::vector<int> ranks(static_cast<size_t>(inst.n_active), 0);
    std::int64_t w = start_w;
    for (int i = 0; i < inst.n_active; ++i) {
        const int remaining = inst.n_active - i;
        const int rank = table.choice_rows[static_cast<size_t>(remaining)][static_cast<size_t>(w)];
        ranks[static_cast<size_t>(i)] = rank;
        if (rank > 0) w -= inst.items[static_cast<size_t>(rank - 1)].delta_cost_units;
    }
    return ranks;
}

} // namespace

std::int64_t to_deciwatts(Watts w) {
    return std::llround(w * 10.0);
}

DiscreteInstance discretize(const SolveRequest& req) {
    check_request(req);
    if (req.spec.ladder.turbo_level_count() > std::numeric_limits<std::uint16_t>::max() - 1)
        throw ValidationError("too many turbo levels");

    DiscreteInstance inst;
    inst.n_active = static_cast<int>(req.active_cores.size());
    inst.guaranteed_khz = req.spec.ladder.guaranteed_khz();

    const std::int64_t g = req.granularity_deciwatts;
    auto to_units = [&](Watts w, const char* what) {
        const std::int64_t dw = to_deciwatts(w);
        if (dw % g != 0)
            throw ValidationError(std::string(what) + ": " + fmt("%lld deciwatts not divisible by granularity %lld", dw, g));
        return dw / g;
    };

    const std::int64_t p0_units = to_units(level_watts(req.spec, 0), "guaranteed-level power");
    inst.floor_cost_units = p0_units * inst.n_active;
    inst.budget_units = to_deciwatts(req.budget_watts) / g;

    const int m = req.spec.ladder.turbo_level_count();
    inst.items.reserve(static_cast<size_t>(m));
    for (int rank = 1; rank <= m; ++rank) {
        DiscreteInstance::Item item;
        item.turbo_rank = rank;
        item.delta_cost_units = to_units(level_watts(req.spec, rank), "turbo-level power") - p0_units;
        item.delta_value_khz = level_khz(req.spec, rank) - inst.guaranteed_khz;
        if (item.delta_cost_units < 0)
            throw ValidationError("turbo level cheaper than guaranteed level");
        inst.items.push_back(item);
    }
    return inst;
}

SolveResult solve_exact_dp(const SolveRequest& req) {
    const DiscreteInstance inst = discretize(req);
    SolveResult result;
    result.method = SolveMethod::exact_dp;
    result.optimal = true;
    if (inst.n_active == 0) return result;
    if (inst.floor_cost_units > inst.budget_units)
        throw InfeasibleError(kInfeasibleMsg);

    const DpTable table = run_dp(inst);
    const std::vector<int> ranks = reconstruct(inst, table, table.capacity);
    result.assignment = build_assignment(req, ranks);
    result.objective_khz = result.assignment.total_freq_khz;
    return result;
}

SolveResult solve_brute_force(const SolveRequest& req) {
    const DiscreteInstance inst = discretize(req);
    SolveResult result;
    result.method = SolveMethod::brute_force;
    result.optimal = true;
    if (inst.n_active == 0) return result;
    if (inst.floor_cost_units > inst.budget_units)
        throw InfeasibleError(kInfeasibleMsg);

    const int m = static_cast<int>(inst.items.size());
    std::int64_t combos = 1;
    for (int i = 0; i < inst.n_active; ++i) {
        combos *= m + 1;
        if (combos > kOracleGuard)
            throw GuardError("oracle size guard exceeded");
    }

    const size_t n = static_cast<size_t>(inst.n_active);
    std::vector<int> ranks(n, 0);
    std::vector<int> best;
    std::int64_t best_value = -1, best_cost = 0;
    std::int64_t cur_value = 0, cur_cost = 0;
    const std::int64_t spare = inst.budget_units - inst.floor_cost_units;

    // Odometer over choice vectors in lexicographic order (last core fastest);
    // strict improvement keeps the lexicographically smallest optimum.
    auto item_cost = [&](int rank) { return rank == 0 ? 0 : inst.items[static_cast<size_t>(rank - 1)].delta_cost_units; };
    auto item_value = [&](int rank) { return rank == 0 ? 0 : inst.items[static_cast<size_t>(rank - 1)].delta_value_khz; };
    while (true) {
        if (cur_cost <= spare &&
            (cur_value > best_value || (cur_value == best_value && cur_cost < best_cost))) {
            best_value = cur_value;
            best_cost = cur_cost;
            best = ranks;
        }
        size_t pos = n;
        while (pos > 0) {
            --pos;
            cur_value -= item_value(ranks[pos]);
            cur_cost -= item_cost(ranks[pos]);
            if (ranks[pos] < m) {
                ++ranks[pos];
                cur_value += item_value(ranks[pos]);
                cur_cost += item_cost(ranks[pos]);
                break;
            }
            ranks[pos] = 0;
        }
        if (pos == 0 && ranks[0] == 0) break;
    }

    result.assignment = build_assignment(req, best);
    result.objective_khz = result.assignment.total_freq_khz;
    return result;
}

SolveResult solve_greedy(const SolveRequest& req) {
    const DiscreteInstance inst = discretize(req);
    SolveResult result;
    result.method = SolveMethod::greedy;
    result.optimal = false;
    if (inst.n_active == 0) return result;
    if (inst.floor_cost_units > inst.budget_units)
        throw InfeasibleError(kInfeasibleMsg);

    // Dominance filter: keep the efficiency frontier of (delta cost, delta
    // value) points, including the stay-at-guaranteed origin. Points off the
    // upper convex hull can never improve the best-ratio upgrade sequence.
    struct Point {
        std::int64_t cost, value;
        int rank;
    };
    std::vector<Point> hull{{0, 0, 0}};
    for (const auto& item : inst.items) {
        Point p{item.delta_cost_units, item.delta_value_khz, item.turbo_rank};
        while (!hull.empty() && hull.back().cost == p.cost && hull.back().value <= p.value)
            hull.pop_back();
        if (!hull.empty() && hull.back().value >= p.value) continue; // dominated
        while (hull.size() >= 2) {
            const Point& a = hull[hull.size() - 2];
            const Point& b = hull.back();
            // Drop b when the a->p slope is at least the a->b slope.
            using Wide = __int128;
            if (Wide(p.value - a.value) * Wide(b.cost - a.cost) >=
                Wide(b.value - a.value) * Wide(p.cost - a.cost))
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    const size_t steps = hull.size() - 1;
    const size_t n = static_cast<size_t>(inst.n_active);
    std::vector<size_t> position(n, 0); // index into hull per core
    std::vector<bool> stuck(n, false);
    std::int64_t remaining = inst.budget_units - inst.floor_cost_units;

    // Hull increments have non-increasing value/cost ratio, so walking them
    // in order and sweeping cores by id applies the best affordable upgrade
    // first and is deterministic. A core that cannot afford a step can never
    // afford any later (cumulatively costlier) point, so it stays stuck.
    for (size_t step = 0; step < steps; ++step) {
        const std::int64_t inc_cost = hull[step + 1].cost - hull[step].cost;
        for (size_t core = 0; core < n; ++core) {
            if (stuck[core] || position[core] != step) continue;
            if (inc_cost <= remaining) {
                remaining -= inc_cost;
                position[core] = step + 1;
            } else {
                stuck[core] = true;
            }
        }
    }

    std::vector<int> ranks(n, 0);
    for (size_t core = 0; core < n; ++core) ranks[core] = hull[position[core]].rank;
    result.assignment = build_assignment(req, ranks);
    result.objective_khz = result.assignment.total_freq_khz;
    return result;
}

std::optional<LookupChoice> solve_lookup_uniform(const PowerLookupTable& table, int n_active,
                                                 Watts budget_watts) {
    const auto it = table.rows.find(n_active);
    if (it == table.rows.end())
        throw Error(fmt("no table row for active-core count %lld", n_active));
    const auto& row = it->second;
    for (int j = static_cast<int>(row.size()) - 1; j >= 0; --j) {
        if (row[static_cast<size_t>(j)] <= budget_watts) {
            LookupChoice choice;
            choice.level_index = j;
            choice.freq_khz = table.levels_khz[static_cast<size_t>(j)];
            choice.table_watts = row[static_cast<size_t>(j)];
            return choice;
        }
    }
    return std::nullopt;
}

std::optional<Assignment> subset_sum_feasible(const SolveRequest& req, Khz target_khz) {
    if (target_khz < 0)
        throw ValidationError("target frequency must be non-negative");
    const DiscreteInstance inst = discretize(req);
    if (inst.n_active == 0)
        return target_khz == 0 ? std::optional<Assignment>(Assignment{}) : std::nullopt;
    if (inst.floor_cost_units > inst.budget_units)
        throw InfeasibleError(kInfeasibleMsg);

    const std::int64_t floor_khz = inst.guaranteed_khz * inst.n_active;
    if (target_khz <= floor_khz) {
        std::vector<int> ranks(static_cast<size_t>(inst.n_active), 0);
        return build_assignment(req, ranks);
    }

    const std::int64_t needed_delta = target_khz - floor_khz;
    const DpTable table = run_dp(inst);
    // table.value is non-decreasing in capacity; the first capacity reaching
    // the target gives the minimum-power witness.
    const auto it = std::lower_bound(table.value.begin(), table.value.end(), needed_delta);
    if (it == table.value.end())
        return std::nullopt;
    const std::int64_t w = it - table.value.begin();
    return build_assignment(req, reconstruct(inst, table, w));
}

} // namespace turbosim
