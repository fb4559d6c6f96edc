#include "swemed1/model.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "swemed1/errors.hpp"

namespace swemed1 {

Model::Model(const Parameters& p) : p_(p), cb_(make_closures(p)) {}

double Model::fast_friction(double u_b) const {
    return p_.mu ? *p_.mu : p_.epsilon * std::abs(u_b);
}

Vector5 Model::source(const State& s, SourceMode mode) const {
    if (!(s.h() >= p_.h_min)) throw ValidationError("source: h below h_min");
    return source_unchecked(s.w, mode);
}

Vector5 Model::source_unchecked(const Vector5& w, SourceMode mode) const {
    const double h = w[kH];
    const Primitive q{h, w[kHu] / h, w[kHa] / h, w[kHc] / h, w[kHb]};
    const double u_b = q.u_b();
    const double a = q.alpha_1;
    const ExchangeRates r = exchange_rates(q, p_, cb_);
    const double porosity = 1.0 - p_.psi;

    switch (mode) {
        case SourceMode::Full: {
            const double friction = p_.epsilon * std::abs(u_b) * u_b;
            const double f = r.F_b;
            return {f, -friction + f * u_b, -3.0 * (friction + 4.0 * p_.nu / h * a) + 2.0 * f * a,
                    r.E - r.D, -f};
        }
        case SourceMode::Fast: {
            const double mu = fast_friction(u_b);
            const double ef = r.E / porosity;
            return {ef, -mu * u_b + ef * u_b, -3.0 * (mu * u_b + 4.0 * p_.nu / h * a) + 2.0 * ef * a,
                    r.E, -ef};
        }
        case SourceMode::Slow: {
            const double df = r.D / porosity;
            return {-df, -df * u_b, -2.0 * df * a, -r.D, df};
        }
    }
    return {};
}

Vector5 Model::split_source(const State& s, double delta) const {
    Vector5 fast = source(s, SourceMode::Fast);
    const Vector5 slow = source_unchecked(s.w, SourceMode::Slow);
    for (std::size_t i = 0; i < 5; ++i) fast[i] += delta * slow[i];
    return fast;
}

BedloadGradient Model::bedload_gradient(const Vector5& w) const {
    const double h = w[kH];
    const double u_b = (w[kHu] + w[kHa]) / h;
    const double c = w[kHc] / h;
    const double rho = mixture_density(c, p_);
    const double excess = shields_parameter(u_b, rho, p_) - p_.theta_c;
    if (excess <= 0.0) return {};
    const double drho = p_.rho_s - p_.rho_w;
    BedloadGradient d;
    d.delta_q = 24.0 * cb_.Q / (1.0 - p_.psi) * rho * p_.epsilon / (p_.g * drho * p_.d_s) *
                std::sqrt(excess) * std::abs(u_b) / h;
    d.delta_h = -u_b * (1.0 + c * drho / (2.0 * rho)) * d.delta_q;
    d.delta_c = u_b * (drho / (2.0 * rho)) * d.delta_q;
    return d;
}

double Model::bed_flux(const Vector5& w) const {
    const double h = w[kH];
    const double u_b = (w[kHu] + w[kHa]) / h;
    if (u_b == 0.0) return 0.0;
    const double rho = mixture_density(w[kHc] / h, p_);
    const double phi = mpm_capacity(shields_parameter(u_b, rho, p_), p_);
    return std::copysign(cb_.Q * phi, u_b) / (1.0 - p_.psi);
}

Matrix5 Model::transport_matrix(const State& s) const {
    if (!(s.h() >= p_.h_min)) throw ValidationError("transport_matrix: h below h_min");
    return transport_matrix_unchecked(s.w);
}

Matrix5 Model::transport_matrix_unchecked(const Vector5& w) const {
    const double h = w[kH];
    const double u = w[kHu] / h;
    const double a = w[kHa] / h;
    const double c = w[kHc] / h;
    const double rho = mixture_density(c, p_);
    const double gh = p_.g * h;
    const double beta = gh * (p_.rho_s - p_.rho_w) / (2.0 * rho);
    const BedloadGradient d = bedload_gradient(w);

    Matrix5 m;
    m(0, 1) = 1.0;

    m(1, 0) = gh - u * u - a * a / 3.0 - c * beta;
    m(1, 1) = 2.0 * u;
    m(1, 2) = 2.0 * a / 3.0;
    m(1, 3) = beta;
    m(1, 4) = gh;

    m(2, 0) = -2.0 * a * u - c * beta;
    m(2, 1) = 2.0 * a;
    m(2, 2) = u;
    m(2, 3) = beta;

    m(3, 0) = -c * u;
    m(3, 1) = c;
    m(3, 3) = u;

    m(4, 0) = d.delta_h;
    m(4, 1) = d.delta_q;
    m(4, 2) = d.delta_q;
    m(4, 3) = d.delta_c;
    return m;
}

Vector5 source_vector(const State& s, const Parameters& p, SourceMode mode) {
    return Model(p).source(s, mode);
}

Matrix5 transport_matrix(const State& s, const Parameters& p) {
    return Model(p).transport_matrix(s);
}

double velocity_profile(double u_m, double alpha_1, double zeta) {
    if (!(zeta >= 0.0 && zeta <= 1.0)) {
        throw ValidationError("velocity_profile: zeta must lie in [0, 1]");
    }
    return u_m + alpha_1 * (1.0 - 2.0 * zeta);
}

namespace {

constexpr int kGaussPoints = 8;

struct GaussRule {
    std::array<double, kGaussPoints> x{};
    std::array<double, kGaussPoints> w{};
};

/// Gauss-Legendre nodes/weights on [0, 1] by Newton iteration on P_n.
GaussRule gauss_legendre_unit() {
    GaussRule rule;
    constexpr int n = kGaussPoints;
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            dp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z_prev = z;
            z = z_prev - p1 / dp;
            if (std::abs(z - z_prev) < 1e-15) break;
        }
        rule.x[i] = 0.5 * (1.0 - z);
        rule.w[i] = 1.0 / ((1.0 - z * z) * dp * dp);  // 2/((1-z^2)P'^2) scaled by 1/2
    }
    return rule;
}

template <typename F>
double integrate(const GaussRule& rule, double a, double b, F&& f) {
    double s = 0.0;
    for (int i = 0; i < kGaussPoints; ++i) s += rule.w[i] * f(a + (b - a) * rule.x[i]);
    return (b - a) * s;
}

double phi1(double z) { return 1.0 - 2.0 * z; }
double dphi1(double /*z*/) { return -2.0; }

}  // namespace

LegendreConstants legendre_constants() {
    const GaussRule rule = gauss_legendre_unit();
    LegendreConstants k;
    k.A111 = 3.0 * integrate(rule, 0.0, 1.0, [](double z) { return phi1(z) * phi1(z) * phi1(z); });
    k.B111 = 3.0 * integrate(rule, 0.0, 1.0, [&](double z) {
                 const double inner = integrate(rule, 0.0, z, phi1);
                 return dphi1(z) * inner * phi1(z);
             });
    k.C11 = integrate(rule, 0.0, 1.0, [](double z) { return dphi1(z) * dphi1(z); });
    k.G11 = 3.0 * integrate(rule, 0.0, 1.0, [](double z) { return phi1(z) * dphi1(z); });
    k.H11 = 3.0 * integrate(rule, 0.0, 1.0, [](double z) { return z * phi1(z) * dphi1(z); });
    k.K1 = integrate(rule, 0.0, 1.0, [](double z) { return z * phi1(z); });
    return k;
}

}  // namespace swemed1
