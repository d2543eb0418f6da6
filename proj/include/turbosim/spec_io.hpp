#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "turbosim/governor.hpp"
#include "turbosim/model.hpp"

namespace turbosim {

/// Simulation defaults a spec file may embed; command-line flags override
/// every field.
struct SimDefaults {
    std::optional<GovernorPolicy> governor;
    std::optional<TurboArbiter> arbiter;
    std::optional<Watts> budget_watts;
};

struct LoadedSpec {
    ProcessorSpec spec;
    SimDefaults defaults;
};

/// Parses a processor spec JSON document (see docs/processor_spec.schema.json).
/// Throws ParseError on malformed input; does not run validate().
LoadedSpec parse_processor_spec(std::string_view json_text);

/// Reads and parses a spec file, then validates it. Throws ParseError or
/// ValidationError listing the first violation.
LoadedSpec load_processor_spec(const std::filesystem::path& path);

} // namespace turbosim
