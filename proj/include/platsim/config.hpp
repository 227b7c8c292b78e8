#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "platsim/model.hpp"

namespace platsim {

/// A parsed scenario file: the base design plus the cross product of any sweeps.
struct ScenarioGrid {
    ScenarioConfig base;
    std::vector<ScenarioConfig> scenarios;  // expanded, deterministic order
    std::string digest_hex;                 // FNV-1a 64 of the normalized grid
};

/// Parse and validate a scenario file (strict: unknown keys are rejected).
/// `seed_override` / `replicates_override` replace the base values before
/// expansion, as the CLI flags do.
ScenarioGrid parse_config_text(const std::string& text,
                               const std::optional<std::uint64_t>& seed_override = {},
                               const std::optional<int>& replicates_override = {});

/// Canonical JSON for one scenario (stable key order; parses back to an equal config).
std::string serialize_scenario(const ScenarioConfig& config);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace platsim
