#include "swemed1/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "swemed1/errors.hpp"
#include "swemed1/model.hpp"
#include "swemed1/stability.hpp"

namespace swemed1 {

namespace {

class Draw {
public:
    explicit Draw(unsigned long long seed) : rng_(seed) {}
    double operator()(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    double open_closed(double lo, double hi) { return hi - (*this)(0.0, hi - lo); }

private:
    std::mt19937_64 rng_;
};

std::string sci(double v) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << v;
    return os.str();
}

CheckResult settled_rest_is_equilibrium(const Parameters& p) {
    Draw d(1);
    double worst = 0.0, smallest_off = 1e300;
    for (int k = 0; k < 100; ++k) {
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, 0, d(-1.0, 1.0));
        worst = std::max(worst, linalg::max_abs(source_vector(s, p, SourceMode::Full)));
        const State off = State::from_primitive(d.open_closed(0.1, 5.0), d(0.01, 1.0), d(-0.5, 0.5),
                                                d(0.0, 0.1), d(-1.0, 1.0));
        smallest_off = std::min(smallest_off, linalg::max_abs(source_vector(off, p, SourceMode::Full)));
    }
    return {"settled rest is an equilibrium manifold", worst <= 1e-14 && smallest_off > 0.0,
            "max |S| on manifold " + sci(worst) + ", min |S| off manifold " + sci(smallest_off)};
}

CheckResult settled_rest_block(const Parameters& base) {
    Draw d(2);
    Parameters p = base;
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < 20; ++k) {
        p.nu = d(0.1, 20.0);
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, 0, d(-1.0, 1.0));
        const double h = s.h();
        const Matrix5 sw = source_jacobian(s, p, SourceMode::Full, JacobianMethod::Analytic);
        const auto r = yong_condition_I(sw, s, classify_equilibrium(s, p), p);
        const double w0sb = Model(p).closures().omega_0 * Model(p).closures().S_b;
        const double e = std::max({std::abs(r.block(0, 0) + 12.0 * p.nu / (h * h)), std::abs(r.block(1, 1) + w0sb / h),
                                   std::abs(r.block(0, 1)), std::abs(r.block(1, 0)), r.zero_block_residual});
        worst = std::max(worst, e);
        ok = ok && r.holds && e <= 1e-12;
    }
    return {"source block at settled rest", ok, "max entry error " + sci(worst)};
}

CheckResult settled_rest_weakly_hyperbolic(const Parameters& p) {
    Draw d(3);
    double poly_err = 0.0;
    bool ok = true;
    for (int k = 0; k < 50; ++k) {
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, 0, d(-1.0, 1.0));
        const Matrix5 a = transport_matrix(s, p);
        const auto cp = linalg::char_poly(a);
        const double gh = p.g * s.h();
        const std::array<double, 6> expected{1.0, 0.0, -gh, 0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < 6; ++i) poly_err = std::max(poly_err, std::abs(cp[i] - expected[i]));
        const auto r = yong_condition_II(a);
        ok = ok && !r.holds && r.cls == HyperbolicityClass::WeaklyHyperbolic && r.witness &&
             r.witness->algebraic == 3 && r.witness->geometric == 2;
    }
    ok = ok && poly_err <= 1e-10;
    return {"transport at settled rest is weakly hyperbolic", ok, "char poly error " + sci(poly_err)};
}

CheckResult fast_slow_split(const Parameters& base) {
    Draw d(4);
    Parameters p = base;
    p.mu.reset();
    p.delta = 1.0;
    double split_err = 0.0, fast_rest = 0.0, slow_err = 0.0;
    const Model m(p);
    const double w0sb = m.closures().omega_0 * m.closures().S_b;
    for (int k = 0; k < 100; ++k) {
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), d(-1.0, 1.0), d(-0.5, 0.5), d(0.0, 0.1),
                                              d(-1.0, 1.0));
        const Vector5 full = m.source(s, SourceMode::Full);
        const Vector5 split = m.split_source(s, 1.0);
        for (std::size_t i = 0; i < 5; ++i)
            split_err = std::max(split_err, std::abs(full[i] - split[i]) / std::max(1.0, std::abs(full[i])));

        const State r = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, d.open_closed(0.0, 0.1), d(-1.0, 1.0));
        fast_rest = std::max(fast_rest, linalg::max_abs(m.source(r, SourceMode::Fast)));
        const Vector5 slow = m.source(r, SourceMode::Slow);
        slow_err = std::max(slow_err, std::abs(slow[kHc] + w0sb * r.primitive().c_m));
    }
    const bool ok = split_err <= 1e-14 && fast_rest <= 1e-14 && slow_err <= 1e-14;
    return {"fast plus slow source equals the full source", ok,
            "split " + sci(split_err) + ", fast at suspended rest " + sci(fast_rest) + ", slow deposition " +
                sci(slow_err)};
}

CheckResult suspended_rest_structure(const Parameters& p) {
    Draw d(5);
    bool ok = true;
    double worst = 0.0;
    const double mu = with_analysis_friction(p).mu.value();
    for (int k = 0; k < 50; ++k) {
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, d.open_closed(0.0, 0.1), d(-1.0, 1.0));
        const auto r = fast_manifold_report(s, p);
        if (!r.condition_I || !r.fast) {
            ok = false;
            continue;
        }
        const double h = s.h();
        const double det = 12.0 * mu * p.nu / (h * h * h);
        const double det_err = std::abs(r.condition_I->block_determinant - det) / std::max(1.0, det);
        worst = std::max({worst, det_err, r.fast->char_poly_residual, r.fast->kernel_residual});
        ok = ok && r.condition_I->holds && !r.condition_II.holds &&
             r.condition_II.cls == HyperbolicityClass::WeaklyHyperbolic && r.condition_II.witness &&
             r.condition_II.witness->algebraic == 3 && r.condition_II.witness->geometric == 2 && det_err <= 1e-12 &&
             r.fast->char_poly_residual <= 1e-10 && r.fast->kernel_residual <= 1e-10;
    }
    return {"suspended rest: invertible fast block, weakly hyperbolic transport", ok, "max residual " + sci(worst)};
}

CheckResult rest_spectrum_check(const Parameters& base) {
    Draw d(6);
    Parameters p = base;
    double worst = 0.0, max_re = -1e300;
    for (int k = 0; k < 50; ++k) {
        p.nu = d(0.1, 20.0);
        const State s = State::from_primitive(d.open_closed(0.1, 5.0), 0, 0, 0, d(-1.0, 1.0));
        const double xi = d(0.0, 10.0);
        const auto scan = spectral_scan(s, p, {xi});
        const auto& pt = scan.points.front();
        worst = std::max(worst, multiset_distance(pt.eigenvalues, rest_spectrum(s.h(), xi, p)));
        max_re = std::max(max_re, pt.max_real);
    }
    return {"rest spectrum of S_W - i xi A matches the closed form", worst <= 1e-8 && max_re <= 1e-10,
            "multiset distance " + sci(worst) + ", max Re " + sci(max_re)};
}

CheckResult legendre_check() {
    const LegendreConstants k = legendre_constants();
    const double e = std::max({std::abs(k.A111), std::abs(k.B111), std::abs(k.C11 - 4.0), std::abs(k.G11),
                               std::abs(k.H11 - 1.0), std::abs(k.K1 + 1.0 / 6.0)});
    return {"Legendre projection constants", e <= 1e-12, "max error " + sci(e)};
}

}  // namespace

std::vector<CheckResult> run_builtin_checks(const Parameters& p) {
    p.validate();
    using Check = CheckResult (*)(const Parameters&);
    const std::vector<std::pair<const char*, Check>> checks{
        {"settled rest is an equilibrium manifold", settled_rest_is_equilibrium},
        {"source block at settled rest", settled_rest_block},
        {"transport at settled rest is weakly hyperbolic", settled_rest_weakly_hyperbolic},
        {"fast plus slow source equals the full source", fast_slow_split},
        {"suspended rest: invertible fast block, weakly hyperbolic transport", suspended_rest_structure},
        {"rest spectrum of S_W - i xi A matches the closed form", rest_spectrum_check},
    };
    std::vector<CheckResult> out;
    for (const auto& [name, check] : checks) {
        try {
            out.push_back(check(p));
        } catch (const std::exception& e) {
            out.push_back({name, false, e.what()});
        }
    }
    out.push_back(legendre_check());
    return out;
}

}  // namespace swemed1
