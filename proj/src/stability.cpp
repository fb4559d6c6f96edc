#include "swemed1/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "swemed1/errors.hpp"

namespace swemed1 {

namespace {

double max_abs_except_block(const Matrix5& m, std::size_t first) {
    double r = 0.0;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j)
            if (i < first || j < first) r = std::max(r, std::abs(m(i, j)));
    return r;
}

linalg::Mat<double, 2> trailing_block(const Matrix5& m) {
    return linalg::Mat<double, 2>{{m(3, 3), m(3, 4)}, {m(4, 3), m(4, 4)}};
}

Vector5 normalized(Vector5 v) {
    const double n = linalg::norm2(v);
    if (n > 0.0)
        for (auto& x : v) x /= n;
    return v;
}

}  // namespace

bool on_settled_rest_manifold(const State& s, const ManifoldTolerance& tol) {
    const Primitive q = s.primitive();
    return std::abs(q.u_m) <= tol.velocity && std::abs(q.alpha_1) <= tol.velocity &&
           std::abs(q.c_m) <= tol.concentration;
}

bool on_suspended_rest_manifold(const State& s, const ManifoldTolerance& tol) {
    const Primitive q = s.primitive();
    return std::abs(q.u_m) <= tol.velocity && std::abs(q.alpha_1) <= tol.velocity &&
           q.c_m > tol.concentration;
}

EquilibriumClass classify_equilibrium(const State& s, const Parameters& p, double tol) {
    const Model model(p);
    EquilibriumClass out;
    out.full_residual = linalg::max_abs(model.source(s, SourceMode::Full));
    out.fast_residual = linalg::max_abs(model.source(s, SourceMode::Fast));
    if (out.full_residual <= tol) {
        out.kind = EquilibriumKind::FullySettledRest;
    } else if (out.fast_residual <= tol && s.primitive().c_m > tol) {
        out.kind = EquilibriumKind::SuspendedRestFast;
    }
    return out;
}

Parameters with_analysis_friction(const Parameters& p) {
    Parameters q = p;
    if (!q.mu) q.mu = p.epsilon * 1.0;  // epsilon |u_b| at a unit reference velocity
    return q;
}

// ---------------------------------------------------------------------------

Vector5 VariableOrdering::to_y(const Vector5& w) const {
    Vector5 y{};
    for (std::size_t i = 0; i < 5; ++i) y[i] = w[perm[i]];
    return y;
}

Vector5 VariableOrdering::to_w(const Vector5& y) const {
    Vector5 w{};
    for (std::size_t i = 0; i < 5; ++i) w[perm[i]] = y[i];
    return w;
}

Matrix5 VariableOrdering::to_y(const Matrix5& m) const { return linalg::permute(m, perm); }

Matrix5 VariableOrdering::to_w(const Matrix5& m) const {
    Matrix5 out;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) out(perm[i], perm[j]) = m(i, j);
    return out;
}

bool VariableOrdering::is_valid() const {
    std::array<bool, 5> seen{};
    for (std::size_t k : perm) {
        if (k >= 5 || seen[k]) return false;
        seen[k] = true;
    }
    const Vector5 probe{1.0, 2.0, 3.0, 4.0, 5.0};
    return to_w(to_y(probe)) == probe && to_y(to_w(probe)) == probe;
}

Matrix5 source_adapted_transform(const Parameters& p) {
    const double k = 1.0 / (1.0 - p.psi);
    return Matrix5{{1, 0, 0, -k, 0},  //
                   {0, 1, 0, 0, 0},
                   {0, 0, 0, k, 1},
                   {0, 0, 1, 0, 0},
                   {0, 0, 0, 1, 0}};
}

Matrix5 source_adapted_transform_inverse(const Parameters& p) {
    const double k = 1.0 / (1.0 - p.psi);
    return Matrix5{{1, 0, 0, 0, k},  //
                   {0, 1, 0, 0, 0},
                   {0, 0, 0, 1, 0},
                   {0, 0, 0, 0, 1},
                   {0, 0, 1, 0, -k}};
}

// ---------------------------------------------------------------------------

Matrix5 source_jacobian(const State& s, const Parameters& p, SourceMode mode, JacobianMethod method) {
    check_admissible(s, p);
    if (mode == SourceMode::Slow) throw ValidationError("source_jacobian: slow mode is not supported");
    // The fast source is analysed with a fixed linear friction coefficient.
    const Parameters pa = mode == SourceMode::Fast ? with_analysis_friction(p) : p;
    const Model model(pa);

    if (method == JacobianMethod::FiniteDifference) {
        return linalg::fd_jacobian(
            [&](const Vector5& w) { return model.source_unchecked(w, mode); }, s.w, 1e-7);
    }

    const double h = s.h();
    const double nu_term = 12.0 * pa.nu / (h * h);
    Matrix5 j;
    if (mode == SourceMode::Full) {
        if (!on_settled_rest_manifold(s)) {
            throw ValidationError("source_jacobian: analytic full Jacobian requires a fully-settled rest state");
        }
        const double dep = model.closures().omega_0 * model.closures().S_b / h;
        j(0, 3) = -dep / (1.0 - pa.psi);
        j(2, 2) = -nu_term;
        j(3, 3) = -dep;
        j(4, 3) = dep / (1.0 - pa.psi);
        return j;
    }
    if (!on_suspended_rest_manifold(s)) {
        throw ValidationError("source_jacobian: analytic fast Jacobian requires a suspended rest state");
    }
    const double mu_h = *pa.mu / h;
    j(1, 1) = -mu_h;
    j(1, 2) = -mu_h;
    j(2, 1) = -3.0 * mu_h;
    j(2, 2) = -(3.0 * mu_h + nu_term);
    return j;
}

// ---------------------------------------------------------------------------

ConditionIResult yong_condition_I(const Matrix5& source_jac, const State& /*s*/,
                                  const EquilibriumClass& manifold, const Parameters& p, double tol) {
    ConditionIResult out;
    switch (manifold.kind) {
        case EquilibriumKind::FullySettledRest:
            out.transformed = source_adapted_transform(p) * source_jac * source_adapted_transform_inverse(p);
            break;
        case EquilibriumKind::SuspendedRestFast:
            out.transformed = VariableOrdering{}.to_y(source_jac);
            break;
        case EquilibriumKind::NotEquilibrium:
            throw ValidationError("yong_condition_I: state is not on an equilibrium manifold");
    }
    const double scale = std::max(1.0, linalg::max_abs(source_jac));
    out.block = trailing_block(out.transformed);
    out.block_determinant = out.block(0, 0) * out.block(1, 1) - out.block(0, 1) * out.block(1, 0);
    out.zero_block_residual = max_abs_except_block(out.transformed, 3);
    out.source_rank = linalg::rank(source_jac);
    const bool block_invertible = linalg::max_abs(out.block) > 0.0 && linalg::rank(out.block) == 2;
    out.holds = out.zero_block_residual <= tol * scale && block_invertible &&
                out.source_rank == out.block_dim;
    return out;
}

// ---------------------------------------------------------------------------

ConditionIIResult yong_condition_II(const Matrix5& a, double tol, const Vector5& weights) {
    ConditionIIResult out;
    const double norm_a = linalg::frobenius_norm(a);
    out.eigenvalues = linalg::eigenvalues(a);
    out.clusters = linalg::cluster_eigenvalues(out.eigenvalues, linalg::kClusterTolerance * (1.0 + norm_a));

    const double imag_tol = tol * std::max(1.0, norm_a);
    for (const auto& c : out.clusters) {
        if (std::abs(c.center.imag()) > imag_tol) {
            out.cls = HyperbolicityClass::NonHyperbolic;
            return out;
        }
    }

    bool defective = false;
    bool all_simple = true;
    for (const auto& c : out.clusters) {
        const Matrix5 shifted = a - c.center.real() * Matrix5::identity();
        const auto kernel = linalg::nullspace(shifted);
        out.geometric.push_back(static_cast<int>(kernel.size()));
        if (c.algebraic > 1) all_simple = false;
        if (static_cast<int>(kernel.size()) < c.algebraic && !defective) {
            defective = true;
            DeficiencyWitness w;
            w.lambda = c.center.real();
            w.algebraic = c.algebraic;
            w.geometric = static_cast<int>(kernel.size());
            w.eigenvectors = kernel;
            // Pick the direction of ker(N^2) farthest from ker(N); N maps it onto an eigenvector.
            double best = -1.0;
            for (const auto& v : linalg::nullspace(shifted * shifted)) {
                Vector5 r = v;
                for (const auto& k : kernel) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < 5; ++i) dot += k[i] * v[i];
                    for (std::size_t i = 0; i < 5; ++i) r[i] -= dot * k[i];
                }
                const double n = linalg::norm2(r);
                if (n > best) {
                    best = n;
                    w.generalized = normalized(r);
                }
            }
            w.chain_image = shifted * w.generalized;
            out.witness = w;
        }
    }

    if (defective) {
        out.cls = HyperbolicityClass::WeaklyHyperbolic;
        out.holds = false;
        return out;
    }
    out.cls = all_simple ? HyperbolicityClass::StrictlyHyperbolic : HyperbolicityClass::Hyperbolic;

    // Rows of L are left eigenvectors, cluster by cluster.
    Matrix5 l;
    std::size_t row = 0;
    for (const auto& c : out.clusters) {
        const Matrix5 shifted_t = a.transpose() - c.center.real() * Matrix5::identity();
        for (const auto& v : linalg::nullspace(shifted_t)) {
            if (row == 5) break;
            for (std::size_t j = 0; j < 5; ++j) l(row, j) = v[j];
            ++row;
        }
    }
    if (row != 5) return out;

    const Matrix5 a0 = l.transpose() * Matrix5::diagonal(weights) * l;
    const auto eigs = linalg::symmetric_eigs(0.5 * (a0 + a0.transpose()));
    const double norm_a0 = linalg::frobenius_norm(a0);
    const bool spd = eigs[0] > tol * norm_a0;
    const bool symmetric = linalg::max_abs(a0 - a0.transpose()) <= tol * norm_a0;
    const bool commutes =
        linalg::max_abs(a0 * a - a.transpose() * a0) <= tol * (1.0 + norm_a0) * (1.0 + norm_a);
    if (spd && symmetric && commutes) {
        out.symmetrizer = a0;
        out.holds = true;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Complex> rest_spectrum(double h, double xi, const Parameters& p) {
    const ClosureBundle cb = make_closures(p);
    const double wave = std::sqrt(p.g * h) * xi;
    return {Complex(0.0, 0.0), Complex(-cb.omega_0 * cb.S_b / h, 0.0),
            Complex(-12.0 * p.nu / (h * h), 0.0), Complex(0.0, wave), Complex(0.0, -wave)};
}

double multiset_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    if (a.size() != b.size()) throw ValidationError("multiset_distance: size mismatch");
    std::vector<std::size_t> idx(b.size());
    std::iota(idx.begin(), idx.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double worst = 0.0;
        for (std::size_t i = 0; i < a.size() && worst < best; ++i)
            worst = std::max(worst, std::abs(a[i] - b[idx[i]]));
        best = std::min(best, worst);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return best;
}

SpectralScan spectral_scan(const State& s, const Parameters& p, const std::vector<double>& xi_values) {
    check_admissible(s, p);
    SpectralScan out;
    out.closed_form_available = on_settled_rest_manifold(s);
    const Matrix5 sw = source_jacobian(s, p, SourceMode::Full,
                                       out.closed_form_available ? JacobianMethod::Analytic
                                                                 : JacobianMethod::FiniteDifference);
    const Matrix5 a = transport_matrix(s, p);
    out.max_real = -std::numeric_limits<double>::infinity();
    for (double xi : xi_values) {
        linalg::CMatrix5 m;
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 5; ++j) m(i, j) = Complex(sw(i, j), -xi * a(i, j));
        SpectralPoint pt;
        pt.xi = xi;
        pt.eigenvalues = linalg::eigenvalues(m);
        pt.max_real = -std::numeric_limits<double>::infinity();
        for (const auto& z : pt.eigenvalues) pt.max_real = std::max(pt.max_real, z.real());
        if (out.closed_form_available) {
            pt.closed_form_error = multiset_distance(pt.eigenvalues, rest_spectrum(s.h(), xi, p));
        }
        out.max_real = std::max(out.max_real, pt.max_real);
        out.points.push_back(std::move(pt));
    }
    return out;
}

// ---------------------------------------------------------------------------

StabilityReport stability_report(const State& s, const Parameters& p, const std::vector<double>& xi_values) {
    check_admissible(s, p);
    const EquilibriumClass eq = classify_equilibrium(s, p);
    if (eq.kind == EquilibriumKind::SuspendedRestFast) {
        StabilityReport r = fast_manifold_report(s, p);
        r.spectral = spectral_scan(s, p, xi_values);
        return r;
    }

    StabilityReport r;
    r.state = s;
    r.equilibrium = eq;
    const Matrix5 a = transport_matrix(s, p);
    r.condition_II = yong_condition_II(a);
    if (eq.kind == EquilibriumKind::FullySettledRest) {
        const Matrix5 sw = source_jacobian(s, p, SourceMode::Full, JacobianMethod::Analytic);
        r.condition_I = yong_condition_I(sw, s, eq, p);
        if (r.condition_II.symmetrizer) {
            r.condition_III =
                yong_condition_III<5>(r.condition_II.symmetrizer, sw, source_adapted_transform(p), 2);
        }
    } else {
        r.notes.push_back("state is not an equilibrium; block condition not evaluated");
    }
    if (!r.condition_II.holds) {
        r.notes.push_back("no positive definite symmetrizer; dissipation compatibility not applicable");
    }
    r.spectral = spectral_scan(s, p, xi_values);
    return r;
}

StabilityReport fast_manifold_report(const State& s, const Parameters& p) {
    check_admissible(s, p);
    if (!on_suspended_rest_manifold(s)) {
        throw ValidationError("fast_manifold_report: state is not a suspended rest state (u_m = alpha_1 = 0, c_m > 0)");
    }
    StabilityReport r;
    r.state = s;
    r.equilibrium = classify_equilibrium(s, p);

    const Primitive q = s.primitive();
    const double gh = p.g * q.h;
    const VariableOrdering ord;
    FastManifoldChecks f;
    f.beta = gh * (p.rho_s - p.rho_w) / (2.0 * mixture_density(q.c_m, p));
    f.transport_y = ord.to_y(transport_matrix(s, p));

    const double c = q.c_m;
    const double b = f.beta;
    const Matrix5 expected{{0, 0, 0, 1, 0},
                           {0, 0, 0, c, 0},
                           {0, 0, 0, 0, 0},
                           {gh - c * b, b, gh, 0, 0},
                           {-c * b, b, 0, 0, 0}};
    f.structure_residual = linalg::max_abs(f.transport_y - expected);

    f.char_poly = linalg::char_poly(f.transport_y);
    const std::array<double, 6> target{1.0, 0.0, -gh, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < 6; ++k)
        f.char_poly_residual = std::max(f.char_poly_residual, std::abs(f.char_poly[k] - target[k]));

    f.kernel = linalg::nullspace(f.transport_y);
    const Vector5 k1 = normalized({1.0, c, -1.0, 0.0, 0.0});
    const Vector5 k2{0.0, 0.0, 0.0, 0.0, 1.0};
    f.kernel_residual = std::max(linalg::distance_to_span(k1, f.kernel), linalg::distance_to_span(k2, f.kernel));
    r.notes.push_back("kernel of A^Y contains (1, c_m, -1, 0, 0); (1, 0, -1, 0, 0) belongs to it only when c_m = 0");

    const Matrix5 sw = source_jacobian(s, p, SourceMode::Fast, JacobianMethod::Analytic);
    EquilibriumClass fast_class = r.equilibrium;
    fast_class.kind = EquilibriumKind::SuspendedRestFast;
    r.condition_I = yong_condition_I(sw, s, fast_class, p);
    if (!p.mu) r.notes.push_back("mu not configured; fast block uses mu = epsilon * 1 m/s");

    r.condition_II = yong_condition_II(f.transport_y);
    if (r.condition_II.symmetrizer) {
        r.condition_III = yong_condition_III<5>(r.condition_II.symmetrizer, ord.to_y(sw), Matrix5::identity(), 2);
    } else {
        r.notes.push_back("no positive definite symmetrizer; dissipation compatibility not applicable");
    }
    r.fast = f;
    return r;
}

std::string to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::FullySettledRest: return "fully_settled_rest";
        case EquilibriumKind::SuspendedRestFast: return "suspended_rest_fast";
        case EquilibriumKind::NotEquilibrium: return "not_equilibrium";
    }
    return "unknown";
}

std::string to_string(HyperbolicityClass c) {
    switch (c) {
        case HyperbolicityClass::StrictlyHyperbolic: return "strictly_hyperbolic";
        case HyperbolicityClass::Hyperbolic: return "hyperbolic";
        case HyperbolicityClass::WeaklyHyperbolic: return "weakly_hyperbolic";
        case HyperbolicityClass::NonHyperbolic: return "non_hyperbolic";
    }
    return "unknown";
}

std::string to_string(ConditionIIIStatus s) {
    switch (s) {
        case ConditionIIIStatus::Holds: return "holds";
        case ConditionIIIStatus::Fails: return "fails";
        case ConditionIIIStatus::NotApplicable: return "not_applicable";
    }
    return "unknown";
}

}  // namespace swemed1
