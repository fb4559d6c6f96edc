/**
 * @file model.hpp
 * @brief Quasilinear balance law dW/dt + A(W) dW/dx = S(W) for the
 *        first-moment shallow water Exner moment model with entrainment
 *        and deposition.
 */
#pragma once

#include <array>

#include "swemed1/closures.hpp"
#include "swemed1/parameters.hpp"
#include "swemed1/state.hpp"

namespace swemed1 {

/// Which source is evaluated: the complete one, or one half of the fast-slow split.
enum class SourceMode { Full, Fast, Slow };

/// Derivatives of Q_b/(1 - psi) with respect to (h, hu_m | h alpha_1, hc_m).
struct BedloadGradient {
    double delta_h = 0.0;
    double delta_q = 0.0;
    double delta_c = 0.0;
};

/**
 * Model equations with the closure constants cached.
 *
 * The checked entry points reject h < h_min; the `_unchecked` variants are
 * meant for finite differencing and Newton iterations where intermediate
 * iterates may briefly leave the admissible set.
 */
class Model {
public:
    explicit Model(const Parameters& p);

    const Parameters& parameters() const { return p_; }
    const ClosureBundle& closures() const { return cb_; }

    Vector5 source(const State& s, SourceMode mode) const;
    Vector5 source_unchecked(const Vector5& w, SourceMode mode) const;

    /// S_fast + delta * S_slow.
    Vector5 split_source(const State& s, double delta) const;

    Matrix5 transport_matrix(const State& s) const;
    Matrix5 transport_matrix_unchecked(const Vector5& w) const;

    BedloadGradient bedload_gradient(const Vector5& w) const;

    /// Exner flux Q_b/(1 - psi) of a conservative state.
    double bed_flux(const Vector5& w) const;

    /// Linear friction coefficient used by the fast source at this state.
    double fast_friction(double u_b) const;

private:
    Parameters p_;
    ClosureBundle cb_;
};

Vector5 source_vector(const State& s, const Parameters& p, SourceMode mode);
Matrix5 transport_matrix(const State& s, const Parameters& p);

/// Reconstructed velocity u_m + alpha_1 (1 - 2 zeta), zeta in [0, 1].
double velocity_profile(double u_m, double alpha_1, double zeta);

/// Projection constants of the scaled linear Legendre polynomial 1 - 2 zeta.
struct LegendreConstants {
    double A111 = 0.0;
    double B111 = 0.0;
    double C11 = 0.0;
    double G11 = 0.0;
    double H11 = 0.0;
    double K1 = 0.0;
};

/// Evaluates the six projection integrals by Gauss-Legendre quadrature on [0, 1].
LegendreConstants legendre_constants();

}  // namespace swemed1
