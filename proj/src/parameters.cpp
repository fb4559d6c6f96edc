#include "swemed1/parameters.hpp"

#include <cmath>
#include <string>

#include "swemed1/errors.hpp"
#include "swemed1/state.hpp"

namespace swemed1 {

namespace {

void require(bool ok, const char* field, const char* rule) {
    if (!ok) throw ValidationError(std::string("parameter '") + field + "' must satisfy " + rule);
}

}  // namespace

void Parameters::validate() const {
    const auto finite = [](double v) { return std::isfinite(v); };
    require(finite(g) && g > 0.0, "g", "g > 0");
    require(finite(rho_w) && rho_w > 0.0, "rho_w", "rho_w > 0");
    require(finite(rho_s) && rho_s > rho_w, "rho_s", "rho_s > rho_w");
    require(finite(d_s) && d_s > 0.0, "d_s", "d_s > 0");
    require(finite(D_sg) && D_sg > 0.0, "D_sg", "D_sg > 0");
    require(finite(nu_w) && nu_w > 0.0, "nu_w", "nu_w > 0");
    require(finite(epsilon) && epsilon >= 0.0, "epsilon", "epsilon >= 0");
    require(finite(nu) && nu >= 0.0, "nu", "nu >= 0");
    require(finite(psi) && psi >= 0.0 && psi < 1.0, "psi", "0 <= psi < 1");
    require(finite(theta_c) && theta_c >= 0.0, "theta_c", "theta_c >= 0");
    require(finite(c_D) && c_D >= 0.0, "c_D", "c_D >= 0");
    require(finite(delta) && delta > 0.0 && delta <= 1.0, "delta", "0 < delta <= 1");
    require(finite(h_min) && h_min > 0.0, "h_min", "h_min > 0");
    if (mu) require(std::isfinite(*mu) && *mu >= 0.0, "mu", "mu >= 0");
}

void check_admissible(const State& s, const Parameters& p) {
    for (double v : s.w) {
        if (!std::isfinite(v)) throw ValidationError("state has a non-finite component");
    }
    if (s.h() < p.h_min) {
        throw ValidationError("state has h = " + std::to_string(s.h()) + " below h_min");
    }
    const double c = s.hc() / s.h();
    if (c < 0.0 || c >= 1.0) {
        throw ValidationError("state has c_m = " + std::to_string(c) + " outside [0, 1)");
    }
}

}  // namespace swemed1
