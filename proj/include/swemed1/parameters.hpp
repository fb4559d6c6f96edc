#pragma once

#include <optional>
#include <string>

namespace swemed1 {

/**
 * Physical and empirical constants of the model.
 *
 * Defaults are the relaxation-experiment friction values (epsilon = 15,
 * nu = 10) together with standard quartz-sand sediment constants.
 */
struct Parameters {
    double g = 9.81;          ///< gravity [m/s^2]
    double rho_w = 1000.0;    ///< water density [kg/m^3]
    double rho_s = 2650.0;    ///< sediment density [kg/m^3]
    double d_s = 1e-3;        ///< grain diameter [m]
    double D_sg = 1e-3;       ///< geometric mean grain size of the suspension [m]
    double nu_w = 1e-6;       ///< kinematic viscosity of water [m^2/s]
    double epsilon = 15.0;    ///< bottom friction coefficient [-]
    double nu = 10.0;         ///< moment relaxation viscosity [m^2/s]
    double psi = 0.4;         ///< bed porosity [-]
    double theta_c = 0.047;   ///< critical Shields number [-]
    double c_D = 0.01;        ///< bed drag coefficient [-]
    double delta = 1.0;       ///< fast-slow scale parameter [-]
    double h_min = 1e-8;      ///< dry-state floor [m]

    /// Linear friction coefficient of the fast source. When unset the fast
    /// source uses epsilon * |u_b| evaluated at the current state.
    std::optional<double> mu;

    /// Throws ValidationError naming the first offending field.
    void validate() const;

    bool operator==(const Parameters&) const = default;
};

}  // namespace swemed1
