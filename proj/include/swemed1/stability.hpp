/**
 * @file stability.hpp
 * @brief Equilibrium classification and structural stability checks:
 *        block condition on the source Jacobian, transport symmetrizability,
 *        dissipation compatibility, and Fourier spectral scans.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "swemed1/linalg.hpp"
#include "swemed1/model.hpp"
#include "swemed1/parameters.hpp"
#include "swemed1/state.hpp"

namespace swemed1 {

using linalg::Complex;

enum class EquilibriumKind { FullySettledRest, SuspendedRestFast, NotEquilibrium };

struct EquilibriumClass {
    EquilibriumKind kind = EquilibriumKind::NotEquilibrium;
    double full_residual = 0.0;  ///< max-norm of the full source
    double fast_residual = 0.0;  ///< max-norm of the fast source
};

/// Membership thresholds for the two rest manifolds.
struct ManifoldTolerance {
    double velocity = 1e-12;       ///< |u_m|, |alpha_1| bound
    double concentration = 1e-12;  ///< c_m bound separating settled from suspended
};

bool on_settled_rest_manifold(const State& s, const ManifoldTolerance& tol = {});
bool on_suspended_rest_manifold(const State& s, const ManifoldTolerance& tol = {});

EquilibriumClass classify_equilibrium(const State& s, const Parameters& p, double tol = 1e-12);

/// Fixed-friction parameters for fast-manifold analysis: mu itself if configured,
/// otherwise epsilon times a unit reference velocity.
Parameters with_analysis_friction(const Parameters& p);

// ---------------------------------------------------------------------------
// variable orderings

/**
 * Reordering between W = (h, hu_m, h alpha_1, hc_m, h_b) and
 * Y = (h, hc_m, h_b, hu_m, h alpha_1). Y[i] = W[perm[i]].
 */
struct VariableOrdering {
    std::array<std::size_t, 5> perm{0, 3, 4, 1, 2};

    Vector5 to_y(const Vector5& w) const;
    Vector5 to_w(const Vector5& y) const;
    /// Matrix in Y coordinates: m_Y(i, j) = m_W(perm[i], perm[j]).
    Matrix5 to_y(const Matrix5& m) const;
    Matrix5 to_w(const Matrix5& m) const;
    /// True if perm is a bijection on {0..4} and to_w(to_y(.)) is the identity.
    bool is_valid() const;
};

/// Source-adapted change of variables Y = P W for the fully-settled manifold.
Matrix5 source_adapted_transform(const Parameters& p);
Matrix5 source_adapted_transform_inverse(const Parameters& p);

// ---------------------------------------------------------------------------
// source Jacobian

enum class JacobianMethod { Analytic, FiniteDifference };

/**
 * Source Jacobian S_W. Analytic forms exist only on the rest manifolds:
 * Full mode on the fully-settled manifold, Fast mode on the suspended one.
 * Requesting Analytic elsewhere throws ValidationError.
 */
Matrix5 source_jacobian(const State& s, const Parameters& p, SourceMode mode, JacobianMethod method);

// ---------------------------------------------------------------------------
// Yong conditions

struct ConditionIResult {
    bool holds = false;
    linalg::Mat<double, 2> block;  ///< T-hat (settled) or B (suspended)
    double block_determinant = 0.0;
    double zero_block_residual = 0.0;  ///< max entry outside the invertible block
    int source_rank = 0;               ///< structure-free cross check
    int block_dim = 2;
    Matrix5 transformed;  ///< P S_W P^-1 or the Y-ordered Jacobian
};

ConditionIResult yong_condition_I(const Matrix5& source_jac, const State& s,
                                  const EquilibriumClass& manifold, const Parameters& p,
                                  double tol = 1e-12);

enum class HyperbolicityClass { StrictlyHyperbolic, Hyperbolic, WeaklyHyperbolic, NonHyperbolic };

/// Jordan-chain evidence that a real eigenvalue is defective.
struct DeficiencyWitness {
    double lambda = 0.0;
    int algebraic = 0;
    int geometric = 0;
    std::vector<Vector5> eigenvectors;  ///< orthonormal basis of ker(A - lambda I)
    Vector5 generalized{};              ///< v with (A - lambda I) v != 0 in ker (A - lambda I)^2
    Vector5 chain_image{};              ///< (A - lambda I) v, an eigenvector
};

struct ConditionIIResult {
    bool holds = false;
    HyperbolicityClass cls = HyperbolicityClass::NonHyperbolic;
    std::vector<Complex> eigenvalues;
    std::vector<linalg::EigenCluster> clusters;
    std::vector<int> geometric;  ///< per real cluster, same order as clusters
    std::optional<Matrix5> symmetrizer;
    std::optional<DeficiencyWitness> witness;
};

/// Symmetrizer weights: Omega = diag(weights). Identity unless overridden.
ConditionIIResult yong_condition_II(const Matrix5& a, double tol = 1e-9,
                                    const Vector5& weights = {1.0, 1.0, 1.0, 1.0, 1.0});

enum class ConditionIIIStatus { Holds, Fails, NotApplicable };

struct ConditionIIIResult {
    ConditionIIIStatus status = ConditionIIIStatus::NotApplicable;
    double max_eigenvalue = 0.0;
};

/**
 * Dissipation compatibility: largest eigenvalue of
 * A0 S_W + S_W^T A0 + P^T diag(0, I_r) P must be <= tol.
 * Without a symmetrizer the check is not applicable.
 */
template <std::size_t N>
ConditionIIIResult yong_condition_III(const std::optional<linalg::Mat<double, N>>& a0,
                                      const linalg::Mat<double, N>& source_jac,
                                      const linalg::Mat<double, N>& p, std::size_t r,
                                      double tol = 1e-10) {
    ConditionIIIResult out;
    if (!a0) return out;
    linalg::Mat<double, N> d;
    for (std::size_t i = N - std::min(r, N); i < N; ++i) d(i, i) = 1.0;
    const auto m = (*a0) * source_jac + source_jac.transpose() * (*a0) + p.transpose() * d * p;
    const auto sym = 0.5 * (m + m.transpose());
    const auto eigs = linalg::symmetric_eigs(sym);
    out.max_eigenvalue = eigs[N - 1];
    out.status = out.max_eigenvalue <= tol ? ConditionIIIStatus::Holds : ConditionIIIStatus::Fails;
    return out;
}

// ---------------------------------------------------------------------------
// spectral scan

struct SpectralPoint {
    double xi = 0.0;
    std::vector<Complex> eigenvalues;
    double max_real = 0.0;
    /// Multiset distance to the closed-form rest spectrum, when applicable.
    std::optional<double> closed_form_error;
};

struct SpectralScan {
    std::vector<SpectralPoint> points;
    double max_real = 0.0;
    bool closed_form_available = false;
};

/// Closed-form spectrum {0, -omega_0 S_b/h, -12 nu/h^2, +-i sqrt(gh) xi} at settled rest.
std::vector<Complex> rest_spectrum(double h, double xi, const Parameters& p);

/// Smallest over pairings of the largest pairwise distance between two multisets.
double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

SpectralScan spectral_scan(const State& s, const Parameters& p, const std::vector<double>& xi_values);

// ---------------------------------------------------------------------------
// reports

struct FastManifoldChecks {
    double beta = 0.0;
    Matrix5 transport_y;            ///< A in Y ordering
    double structure_residual = 0;  ///< max deviation from the closed-form A^Y
    std::array<double, 6> char_poly{};
    double char_poly_residual = 0;  ///< max deviation from lambda^5 - gh lambda^3
    std::vector<Vector5> kernel;    ///< orthonormal basis of ker A^Y
    double kernel_residual = 0;     ///< distance of the closed-form kernel vectors from span(kernel)
};

struct StabilityReport {
    EquilibriumClass equilibrium;
    State state;
    std::optional<ConditionIResult> condition_I;
    ConditionIIResult condition_II;
    ConditionIIIResult condition_III;
    std::optional<SpectralScan> spectral;
    std::optional<FastManifoldChecks> fast;
    std::vector<std::string> notes;
};

/// Analysis at a point of the fully-settled rest manifold (or any state, numerically).
StabilityReport stability_report(const State& s, const Parameters& p,
                                 const std::vector<double>& xi_values);

/// Analysis of the suspended rest manifold; throws ValidationError off the manifold.
StabilityReport fast_manifold_report(const State& s, const Parameters& p);

std::string to_string(EquilibriumKind k);
std::string to_string(HyperbolicityClass c);
std::string to_string(ConditionIIIStatus s);

}  // namespace swemed1
