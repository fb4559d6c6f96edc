#pragma once

#include <optional>
#include <string>

#include "swemed1/parameters.hpp"
#include "swemed1/solver.hpp"

namespace swemed1 {

struct SimulationConfig {
    std::optional<std::string> preset;
    Parameters parameters;
    RunSettings run;
    std::string output_dir = "output";

    bool operator==(const SimulationConfig&) const = default;
};

/// Relaxation experiment: x in [-1, 2], epsilon = 15, nu = 10, snapshots at 0, 1, 5, 10, 30, 60, 100.
SimulationConfig paper_relaxation_preset();

/**
 * Parses and validates a JSON configuration.
 *
 * With "preset" the remaining keys override the preset. Without it every
 * section must be present. Unknown keys, malformed JSON and out-of-range
 * values throw ValidationError with a message naming the key.
 */
SimulationConfig parse_config(const std::string& text);

/// Canonical JSON text; parse_config(to_json(c)) == c.
std::string to_json(const SimulationConfig& c);

/// Worker count for the solver: the configured value (0 = all cores),
/// capped by SWEMED1_THREADS when that is set.
int effective_threads(int configured);

}  // namespace swemed1
