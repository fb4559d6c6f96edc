/**
 * @file closures.hpp
 * @brief Empirical sediment closures: density, Shields stress, bedload,
 *        settling, entrainment and deposition.
 */
#pragma once

#include "swemed1/parameters.hpp"
#include "swemed1/state.hpp"

namespace swemed1 {

/// State-independent closure constants, computed once per Parameters.
struct ClosureBundle {
    double omega_0 = 0.0;  ///< settling velocity [m/s]
    double R_p = 0.0;      ///< particle Reynolds number [-]
    double gamma_1 = 0.0;  ///< entrainment prefactor [-]
    double gamma_2 = 0.0;  ///< entrainment Reynolds exponent [-]
    double S_b = 0.0;      ///< near-bed concentration factor [-]
    double Q = 0.0;        ///< characteristic bedload discharge [m^2/s]

    /// Z = z_scale * |u_b|, i.e. gamma_1 sqrt(c_D) R_p^gamma_2 / omega_0.
    double z_scale = 0.0;
};

ClosureBundle make_closures(const Parameters& p);

/// rho_w + c_m (rho_s - rho_w).
double mixture_density(double c_m, const Parameters& p);

/// Shields number rho eps u_b^2 / (g (rho_s - rho_w) d_s); always >= 0.
double shields_parameter(double u_b, double rho, const Parameters& p);

/// Meyer-Peter-Muller transport capacity 8 (theta - theta_c)_+^{3/2}.
double mpm_capacity(double theta, const Parameters& p);

/// sqrt((rho_s/rho_w - 1) g d_s^3).
double characteristic_discharge(const Parameters& p);

/// Q_b = sgn(u_b) Q Phi(theta), with sgn(0) = 0.
double bedload_discharge(double u_b, double rho, const Parameters& p);

/**
 * Settling velocity, evaluated as printed in the model definition:
 * sqrt((13.95 nu_w/d_s)^2 + 1.09 rho_w (rho_s/rho_w - 1) g d_s) - 13.95 nu_w/d_s.
 *
 * The rho_w factor inside the root makes the result dimensionally odd; it is
 * kept deliberately so results match the published closure.
 */
double settling_velocity(const Parameters& p);

/// sqrt((rho_s - rho_w) g d_s) d_s / nu_w.
double particle_reynolds(const Parameters& p);

/// 0.4 (d_s/D_sg)^1.64 + 1.64.
double bradford_factor(const Parameters& p);

/// Garcia-Parker entrainment coefficient, in [0, 1.3/4.3).
double entrainment_coefficient(double u_b, const Parameters& p, const ClosureBundle& cb);

struct ExchangeRates {
    double E = 0.0;    ///< entrainment rate
    double D = 0.0;    ///< deposition rate
    double F_b = 0.0;  ///< net bed exchange (E - D)/(1 - psi)
};

ExchangeRates exchange_rates(const Primitive& q, const Parameters& p, const ClosureBundle& cb);

}  // namespace swemed1
