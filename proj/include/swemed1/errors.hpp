#pragma once

#include <stdexcept>
#include <string>

namespace swemed1 {

/// Invalid input: out-of-range parameter, inadmissible state, bad config.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical procedure failed: non-convergence, singular matrix, loss of admissibility.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace swemed1
