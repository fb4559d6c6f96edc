#pragma once

#include <string>
#include <vector>

#include "swemed1/parameters.hpp"

namespace swemed1 {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;  ///< worst observed error or the failing case
};

/**
 * Structural checks of the model at the given parameters: rest manifolds,
 * source block structure, weak hyperbolicity, fast-slow decomposition,
 * rest spectrum and the Legendre projection constants. Sample states come
 * from a fixed seed, so the output is reproducible.
 */
std::vector<CheckResult> run_builtin_checks(const Parameters& p);

}  // namespace swemed1
