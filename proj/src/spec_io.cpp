#include "turbosim/spec_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "turbosim/errors.hpp"

namespace turbosim {

namespace {

using nlohmann::json;

GovernorPolicy parse_governor(const json& j) {
    GovernorPolicy policy;
    const std::string kind = j.value("kind", "ondemand");
    if (kind == "ondemand")
        policy.kind = GovernorKind::ondemand;
    else if (kind == "userspace")
        policy.kind = GovernorKind::userspace;
    else
        throw ParseError("unknown governor kind: " + kind);
    policy.userspace_target_khz = j.value("userspace_target_khz", Khz{0});
    policy.up_threshold = j.value("up_threshold", 0.80);
    policy.down_threshold = j.value("down_threshold", 0.20);
    if (!(policy.down_threshold > 0 && policy.down_threshold < policy.up_threshold &&
          policy.up_threshold <= 1.0))
        throw ParseError("governor thresholds must satisfy 0 < down < up <= 1");
    return policy;
}

TurboArbiter parse_arbiter(const json& j) {
    TurboArbiter arbiter;
    const std::string kind = j.value("kind", "baseline_hard_limit");
    if (kind == "baseline_hard_limit" || kind == "baseline")
        arbiter.kind = ArbiterKind::baseline_hard_limit;
    else if (kind == "optimal_mckp" || kind == "optimal")
        arbiter.kind = ArbiterKind::optimal_mckp;
    else if (kind == "greedy_mckp" || kind == "greedy")
        arbiter.kind = ArbiterKind::greedy_mckp;
    else
        throw ParseError("unknown arbiter kind: " + kind);
    if (j.contains("bin_table")) {
        int prev_bins = -1;
        int prev_n = 0;
        std::map<int, int> table;
        for (const auto& [key, value] : j.at("bin_table").items())
            table[std::stoi(key)] = value.get<int>();
        for (const auto& [n_active, bins] : table) {
            if (n_active < 1 || bins < 0)
                throw ParseError("bin_table entries must map core counts >= 1 to bins >= 0");
            if (prev_bins >= 0 && bins > prev_bins)
                throw ParseError("bin_table must be non-increasing in the active-core count");
            prev_bins = bins;
            prev_n = n_active;
        }
        (void)prev_n;
        arbiter.bin_table = std::move(table);
    } else {
        arbiter.bin_table = TurboArbiter::default_bin_table();
    }
    arbiter.bios_cap_khz = j.value("bios_cap_khz", Khz{0});
    return arbiter;
}

} // namespace

LoadedSpec parse_processor_spec(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("spec file is not valid JSON: ") + e.what());
    }

    try {
        LoadedSpec loaded;
        ProcessorSpec& spec = loaded.spec;
        spec.name = j.value("name", "unnamed");
        spec.n_cores = j.at("n_cores").get<int>();
        spec.pow_max_watts = j.at("pow_max_watts").get<double>();
        spec.t_crit_c = j.value("t_crit_c", 100.0);

        const json& ladder = j.at("ladder");
        std::vector<Khz> levels = ladder.at("levels_khz").get<std::vector<Khz>>();
        const Khz guaranteed = ladder.at("guaranteed_khz").get<Khz>();
        const auto it = std::find(levels.begin(), levels.end(), guaranteed);
        if (it == levels.end())
            throw ParseError("guaranteed_khz is not one of levels_khz");
        const int guaranteed_index = static_cast<int>(it - levels.begin());
        spec.ladder = FrequencyLadder::from_khz(std::move(levels), guaranteed_index,
                                                ladder.value("bus_clock_khz", Khz{133333}));
        if (ladder.contains("voltages_v")) {
            const auto volts = ladder.at("voltages_v").get<std::vector<double>>();
            if (volts.size() != spec.ladder.levels.size())
                throw ParseError("voltages_v length must match levels_khz");
            for (size_t i = 0; i < volts.size(); ++i) spec.ladder.levels[i].voltage_v = volts[i];
        }

        const json& power = j.at("power");
        spec.power.per_core_watts = power.at("per_core_watts").get<std::vector<double>>();
        if (power.contains("k_proportionality") && !power.at("k_proportionality").is_null())
            spec.power.k_proportionality = power.at("k_proportionality").get<double>();
        if (power.contains("lookup") && !power.at("lookup").is_null()) {
            PowerLookupTable table;
            const json& lookup = power.at("lookup");
            table.levels_khz = lookup.at("levels_khz").get<std::vector<Khz>>();
            for (const auto& [key, row] : lookup.at("rows").items())
                table.rows[std::stoi(key)] = row.get<std::vector<double>>();
            spec.power.lookup = std::move(table);
        }

        if (j.contains("defaults")) {
            const json& defaults = j.at("defaults");
            if (defaults.contains("governor")) loaded.defaults.governor = parse_governor(defaults.at("governor"));
            if (defaults.contains("arbiter")) loaded.defaults.arbiter = parse_arbiter(defaults.at("arbiter"));
            if (defaults.contains("budget_watts"))
                loaded.defaults.budget_watts = defaults.at("budget_watts").get<double>();
        }
        return loaded;
    } catch (const json::exception& e) {
        throw ParseError(std::string("spec file field error: ") + e.what());
    } catch (const std::invalid_argument&) {
        throw ParseError("spec file: table keys must be integers");
    }
}

LoadedSpec load_processor_spec(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ParseError("cannot open spec file: " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    LoadedSpec loaded = parse_processor_spec(buf.str());
    const auto violations = validate(loaded.spec);
    if (!violations.empty()) {
        std::string msg = "spec file fails validation:";
        for (const auto& v : violations) msg += "\n  [" + v.code + "] " + v.message;
        throw ValidationError(msg);
    }
    return loaded;
}

} // namespace turbosim
