#pragma once

#include <random>

#include "swemed1/parameters.hpp"
#include "swemed1/state.hpp"

namespace swemed1::testing {

/// Fixed-seed generator so every run draws the same sample states.
class Sampler {
public:
    explicit Sampler(unsigned long long seed = 20240917ULL) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

    /// Lower bound excluded: (lo, hi].
    double open_closed(double lo, double hi) { return hi - uniform(0.0, hi - lo); }

    State rest_state() { return State::from_primitive(open_closed(0.1, 5.0), 0.0, 0.0, 0.0, uniform(-1.0, 1.0)); }

    State suspended_state() {
        return State::from_primitive(open_closed(0.1, 5.0), 0.0, 0.0, open_closed(0.0, 0.1), uniform(-1.0, 1.0));
    }

    State generic_state() {
        return State::from_primitive(open_closed(0.1, 5.0), uniform(-1.0, 1.0), uniform(-0.5, 0.5),
                                     uniform(0.0, 0.1), uniform(-1.0, 1.0));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace swemed1::testing
