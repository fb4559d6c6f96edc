#pragma once

#include <cstddef>

#include "swemed1/linalg.hpp"
#include "swemed1/parameters.hpp"

namespace swemed1 {

using linalg::Matrix5;
using linalg::Vector5;

/// Component index of the conservative vector W = (h, hu_m, h alpha_1, hc_m, h_b).
enum Var : std::size_t { kH = 0, kHu = 1, kHa = 2, kHc = 3, kHb = 4 };

/// Primitive view of a cell state.
struct Primitive {
    double h = 0.0;
    double u_m = 0.0;
    double alpha_1 = 0.0;
    double c_m = 0.0;
    double h_b = 0.0;

    /// Bottom velocity u(zeta = 0) = u_m + alpha_1.
    double u_b() const { return u_m + alpha_1; }
};

/// One cell's conservative state.
struct State {
    Vector5 w{};

    double h() const { return w[kH]; }
    double hu() const { return w[kHu]; }
    double ha() const { return w[kHa]; }
    double hc() const { return w[kHc]; }
    double h_b() const { return w[kHb]; }

    Primitive primitive() const {
        const double h = w[kH];
        return {h, w[kHu] / h, w[kHa] / h, w[kHc] / h, w[kHb]};
    }

    static State from_primitive(const Primitive& q) {
        return State{{q.h, q.h * q.u_m, q.h * q.alpha_1, q.h * q.c_m, q.h_b}};
    }
    static State from_primitive(double h, double u_m, double alpha_1, double c_m, double h_b) {
        return from_primitive(Primitive{h, u_m, alpha_1, c_m, h_b});
    }

    bool operator==(const State&) const = default;
};

/// Throws ValidationError unless h >= h_min, 0 <= c_m < 1 and all entries are finite.
void check_admissible(const State& s, const Parameters& p);

}  // namespace swemed1
