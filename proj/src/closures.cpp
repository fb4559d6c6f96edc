#include "swemed1/closures.hpp"

#include <cmath>

namespace swemed1 {

ClosureBundle make_closures(const Parameters& p) {
    ClosureBundle cb;
    cb.omega_0 = settling_velocity(p);
    cb.R_p = particle_reynolds(p);
    if (cb.R_p > 2.36) {
        cb.gamma_1 = 1.0;
        cb.gamma_2 = 0.6;
    } else {
        cb.gamma_1 = 0.586;
        cb.gamma_2 = 1.23;
    }
    cb.S_b = bradford_factor(p);
    cb.Q = characteristic_discharge(p);
    cb.z_scale = cb.gamma_1 * std::sqrt(p.c_D) * std::pow(cb.R_p, cb.gamma_2) / cb.omega_0;
    return cb;
}

double mixture_density(double c_m, const Parameters& p) {
    return p.rho_w + c_m * (p.rho_s - p.rho_w);
}

double shields_parameter(double u_b, double rho, const Parameters& p) {
    return rho * p.epsilon * std::abs(u_b) * std::abs(u_b) / (p.g * (p.rho_s - p.rho_w) * p.d_s);
}

double mpm_capacity(double theta, const Parameters& p) {
    const double excess = theta - p.theta_c;
    if (excess <= 0.0) return 0.0;
    return 8.0 * excess * std::sqrt(excess);
}

double characteristic_discharge(const Parameters& p) {
    return std::sqrt((p.rho_s / p.rho_w - 1.0) * p.g * p.d_s * p.d_s * p.d_s);
}

double bedload_discharge(double u_b, double rho, const Parameters& p) {
    if (u_b == 0.0) return 0.0;
    const double phi = mpm_capacity(shields_parameter(u_b, rho, p), p);
    return std::copysign(characteristic_discharge(p) * phi, u_b);
}

double settling_velocity(const Parameters& p) {
    const double a = 13.95 * p.nu_w / p.d_s;
    const double b = 1.09 * p.rho_w * (p.rho_s / p.rho_w - 1.0) * p.g * p.d_s;
    // sqrt(a^2 + b) - a, rewritten to avoid cancellation when b << a^2
    return b / (std::sqrt(a * a + b) + a);
}

double particle_reynolds(const Parameters& p) {
    return std::sqrt((p.rho_s - p.rho_w) * p.g * p.d_s) * p.d_s / p.nu_w;
}

double bradford_factor(const Parameters& p) {
    return 0.4 * std::pow(p.d_s / p.D_sg, 1.64) + 1.64;
}

double entrainment_coefficient(double u_b, const Parameters& /*p*/, const ClosureBundle& cb) {
    const double z = cb.z_scale * std::abs(u_b);
    const double z2 = z * z;
    const double z5 = z2 * z2 * z;
    return 1.3e-7 * z5 / (1.0 + 4.3e-7 * z5);
}

ExchangeRates exchange_rates(const Primitive& q, const Parameters& p, const ClosureBundle& cb) {
    ExchangeRates r;
    r.E = cb.omega_0 * (1.0 - p.psi) * entrainment_coefficient(q.u_b(), p, cb);
    r.D = cb.omega_0 * cb.S_b * q.c_m;
    r.F_b = (r.E - r.D) / (1.0 - p.psi);
    return r;
}

}  // namespace swemed1
