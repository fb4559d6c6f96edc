#include <doctest.h>

#include <cmath>

#include "swemed1/errors.hpp"
#include "swemed1/stability.hpp"
#include "test_support.hpp"

using namespace swemed1;

namespace {

double omega0_sb(const Parameters& p) {
    const ClosureBundle cb = make_closures(p);
    return cb.omega_0 * cb.S_b;
}

// omega_0 * S_b at the default constants, evaluated independently at 30 digits.
constexpr double kOmega0Sb = 8.54038700465284411017;

}  // namespace

TEST_CASE("equilibrium classification") {
    const Parameters p;
    CHECK(classify_equilibrium(State::from_primitive(1, 0, 0, 0, 0), p).kind == EquilibriumKind::FullySettledRest);
    const auto susp = classify_equilibrium(State::from_primitive(1, 0, 0, 0.01, 0), p);
    CHECK(susp.kind == EquilibriumKind::SuspendedRestFast);
    CHECK(susp.full_residual > 0.0);
    CHECK(susp.fast_residual == 0.0);
    CHECK(classify_equilibrium(State::from_primitive(1, 0.1, 0, 0, 0), p).kind == EquilibriumKind::NotEquilibrium);
}

TEST_CASE("variable ordering is an involutive bijection") {
    const VariableOrdering ord;
    CHECK(ord.is_valid());
    const Vector5 y{1, 2, 3, 4, 5};
    CHECK(ord.to_y(ord.to_w(y)) == y);
    const Vector5 w{10, 20, 30, 40, 50};
    CHECK(ord.to_y(w) == Vector5{10, 40, 50, 20, 30});
    for (std::size_t i = 0; i < 5; ++i) CHECK(ord.perm[ord.perm[i]] == i);
    VariableOrdering broken;
    broken.perm = {0, 0, 1, 2, 3};
    CHECK_FALSE(broken.is_valid());

    testing::Sampler s;
    Matrix5 m;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) m(i, j) = s.uniform(-1, 1);
    CHECK(ord.to_w(ord.to_y(m)) == m);
    // the matrix map agrees with the vector map: (M w)_Y = M_Y w_Y
    const Vector5 lhs = ord.to_y(m * w);
    const Vector5 rhs = ord.to_y(m) * ord.to_y(w);
    for (std::size_t i = 0; i < 5; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]));
}

TEST_CASE("source-adapted transform and its inverse") {
    const Parameters p;
    const Matrix5 prod = source_adapted_transform(p) * source_adapted_transform_inverse(p);
    CHECK(linalg::max_abs(prod - Matrix5::identity()) < 1e-15);
    const Vector5 w{1.2, 0.3, -0.1, 0.06, 0.4};
    const Vector5 y = source_adapted_transform(p) * w;
    CHECK(y[0] == doctest::Approx(1.2 - 0.06 / 0.6));
    CHECK(y[2] == doctest::Approx(0.4 + 0.06 / 0.6));
    CHECK(y[4] == doctest::Approx(0.06));
}

TEST_CASE("analytic source Jacobian at settled rest") {
    const Parameters p;
    const State s = State::from_primitive(1.0, 0, 0, 0, 0.3);
    const Matrix5 j = source_jacobian(s, p, SourceMode::Full, JacobianMethod::Analytic);
    CHECK(j(2, 2) == doctest::Approx(-120.0));
    CHECK(j(3, 3) == doctest::Approx(-kOmega0Sb).epsilon(1e-14));
    CHECK(j(0, 3) == doctest::Approx(-kOmega0Sb / 0.6).epsilon(1e-14));
    CHECK(j(4, 3) == doctest::Approx(kOmega0Sb / 0.6).epsilon(1e-14));
    int nonzero = 0;
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = 0; b < 5; ++b) nonzero += j(a, b) != 0.0;
    CHECK(nonzero == 4);
    CHECK(linalg::rank(j) == 2);

    CHECK_THROWS_AS(source_jacobian(State::from_primitive(1, 0.2, 0, 0, 0), p, SourceMode::Full,
                                    JacobianMethod::Analytic),
                    ValidationError);
    CHECK_THROWS_AS(source_jacobian(s, p, SourceMode::Fast, JacobianMethod::Analytic), ValidationError);
}

TEST_CASE("finite-difference Jacobians match the analytic ones") {
    Parameters p;
    testing::Sampler s;
    for (int i = 0; i < 20; ++i) {
        p.nu = s.uniform(0.1, 20.0);
        const State rest = s.rest_state();
        const Matrix5 an = source_jacobian(rest, p, SourceMode::Full, JacobianMethod::Analytic);
        const Matrix5 fd = source_jacobian(rest, p, SourceMode::Full, JacobianMethod::FiniteDifference);
        CHECK(linalg::max_abs(fd - an) <= 1e-6 * linalg::max_abs(an));

        const State susp = s.suspended_state();
        const Matrix5 an_f = source_jacobian(susp, p, SourceMode::Fast, JacobianMethod::Analytic);
        const Matrix5 fd_f = source_jacobian(susp, p, SourceMode::Fast, JacobianMethod::FiniteDifference);
        CHECK(linalg::max_abs(fd_f - an_f) <= 1e-6 * linalg::max_abs(an_f));
    }
}

TEST_CASE("block condition at settled rest") {
    Parameters p;
    testing::Sampler s;
    for (int i = 0; i < 20; ++i) {
        p.nu = s.uniform(0.1, 20.0);
        const State st = s.rest_state();
        const double h = st.h();
        const Matrix5 sw = source_jacobian(st, p, SourceMode::Full, JacobianMethod::Analytic);
        const auto r = yong_condition_I(sw, st, classify_equilibrium(st, p), p);
        CHECK(r.holds);
        CHECK(r.zero_block_residual <= 1e-12);
        CHECK(std::abs(r.block(0, 0) + 12.0 * p.nu / (h * h)) <= 1e-12 * std::max(1.0, 12.0 * p.nu / (h * h)));
        CHECK(std::abs(r.block(1, 1) + omega0_sb(p) / h) <= 1e-12 * std::max(1.0, omega0_sb(p) / h));
        CHECK(r.block(0, 1) == 0.0);
        CHECK(r.block(1, 0) == 0.0);
        CHECK(r.source_rank == 2);
    }
}

TEST_CASE("block condition on the suspended manifold") {
    Parameters p;
    p.mu = 2.5;
    const State st = State::from_primitive(2.0, 0, 0, 0.05, 0.1);
    const Matrix5 sw = source_jacobian(st, p, SourceMode::Fast, JacobianMethod::Analytic);
    const auto r = yong_condition_I(sw, st, classify_equilibrium(st, p), p);
    CHECK(r.holds);
    const double mu = 2.5, h = 2.0, nu = p.nu;
    CHECK(r.block(0, 0) == doctest::Approx(-mu / h));
    CHECK(r.block(0, 1) == doctest::Approx(-mu / h));
    CHECK(r.block(1, 0) == doctest::Approx(-3 * mu / h));
    CHECK(r.block(1, 1) == doctest::Approx(-(3 * mu / h + 12 * nu / (h * h))));
    CHECK(r.block_determinant == doctest::Approx(12 * mu * nu / (h * h * h)));
    CHECK(r.source_rank == 2);

    const State off = State::from_primitive(1, 0.3, 0, 0, 0);
    CHECK_THROWS_AS(yong_condition_I(sw, off, classify_equilibrium(off, p), p), ValidationError);
}

TEST_CASE("settled rest transport is weakly hyperbolic") {
    const Parameters p;
    testing::Sampler s;
    for (int i = 0; i < 10; ++i) {
        const State st = s.rest_state();
        const Matrix5 a = transport_matrix(st, p);
        const auto r = yong_condition_II(a);
        CHECK_FALSE(r.holds);
        CHECK(r.cls == HyperbolicityClass::WeaklyHyperbolic);
        REQUIRE(r.witness);
        CHECK(std::abs(r.witness->lambda) < 1e-12);
        CHECK(r.witness->algebraic == 3);
        CHECK(r.witness->geometric == 2);
        // Jordan chain: A v != 0 but A^2 v = 0 for the generalized vector
        const Vector5 img = a * r.witness->generalized;
        CHECK(linalg::norm2(img) > 1e-3);
        CHECK(linalg::max_abs(a * img) < 1e-10 * (1.0 + linalg::frobenius_norm(a)));
        CHECK_FALSE(r.symmetrizer);
    }
}

TEST_CASE("hyperbolicity classes on simple matrices") {
    const auto strict = yong_condition_II(Matrix5::diagonal({1, 2, 3, 4, 5}));
    CHECK(strict.cls == HyperbolicityClass::StrictlyHyperbolic);
    CHECK(strict.holds);
    REQUIRE(strict.symmetrizer);
    CHECK(linalg::max_abs(*strict.symmetrizer - Matrix5::identity()) < 1e-12);

    const auto repeated = yong_condition_II(Matrix5::diagonal({1, 1, 2, 3, 4}));
    CHECK(repeated.cls == HyperbolicityClass::Hyperbolic);
    CHECK(repeated.holds);

    Matrix5 rot = Matrix5::diagonal({0, 0, 1, 2, 3});
    rot(0, 1) = -1.0;
    rot(1, 0) = 1.0;
    CHECK(yong_condition_II(rot).cls == HyperbolicityClass::NonHyperbolic);

    // non-symmetric but diagonalizable: symmetrizer must still satisfy A0 A = A^T A0
    Matrix5 a = Matrix5::diagonal({-1, 0.5, 2, 3, 4});
    a(0, 1) = 3.0;
    a(2, 4) = -1.5;
    const auto r = yong_condition_II(a, 1e-9, {1.0, 2.0, 0.5, 1.0, 3.0});
    REQUIRE(r.symmetrizer);
    const Matrix5& a0 = *r.symmetrizer;
    CHECK(linalg::max_abs(a0 * a - a.transpose() * a0) < 1e-10);
    CHECK(linalg::symmetric_eigs(a0)[0] > 0.0);
}

TEST_CASE("dissipation compatibility") {
    using M1 = linalg::Mat<double, 1>;
    const auto holds = yong_condition_III<1>(M1{{1.0}}, M1{{-1.0}}, M1{{1.0}}, 1);
    CHECK(holds.status == ConditionIIIStatus::Holds);
    const auto fails = yong_condition_III<1>(M1{{1.0}}, M1{{0.0}}, M1{{1.0}}, 1);
    CHECK(fails.status == ConditionIIIStatus::Fails);
    const auto na = yong_condition_III<5>(std::nullopt, Matrix5{}, Matrix5::identity(), 2);
    CHECK(na.status == ConditionIIIStatus::NotApplicable);
}

TEST_CASE("spectral scan at settled rest matches the closed form") {
    Parameters p;
    testing::Sampler s;
    for (int i = 0; i < 50; ++i) {
        p.nu = s.uniform(0.1, 20.0);
        const State st = s.rest_state();
        const double xi = s.uniform(-10.0, 10.0);
        const auto scan = spectral_scan(st, p, {xi});
        REQUIRE(scan.points.size() == 1);
        REQUIRE(scan.points[0].closed_form_error);
        CHECK(*scan.points[0].closed_form_error <= 1e-8);
        CHECK(scan.max_real <= 1e-10);
    }

    const auto zero = spectral_scan(State::from_primitive(1.0, 0, 0, 0, 0), Parameters{}, {0.0, 1.0});
    CHECK(*zero.points[0].closed_form_error <= 1e-8);
    int purely_imaginary = 0;
    for (const auto& z : zero.points[1].eigenvalues)
        purely_imaginary += std::abs(std::abs(z.imag()) - std::sqrt(9.81)) < 1e-8 && std::abs(z.real()) < 1e-10;
    CHECK(purely_imaginary == 2);
}

TEST_CASE("multiset distance is permutation invariant") {
    const std::vector<Complex> a{{1, 0}, {0, 2}, {-3, 0}};
    const std::vector<Complex> b{{-3, 0}, {1, 1e-9}, {0, 2}};
    CHECK(multiset_distance(a, b) == doctest::Approx(1e-9));
    CHECK_THROWS_AS(multiset_distance(a, {{1, 0}}), ValidationError);
}

TEST_CASE("fast manifold report") {
    const Parameters p;
    testing::Sampler s;
    for (int i = 0; i < 20; ++i) {
        const State st = s.suspended_state();
        const double gh = p.g * st.h();
        const auto r = fast_manifold_report(st, p);
        REQUIRE(r.fast);
        CHECK(r.fast->structure_residual < 1e-12 * gh);
        CHECK(r.fast->char_poly_residual < 1e-10);
        CHECK(r.fast->kernel.size() == 2);
        CHECK(r.fast->kernel_residual < 1e-10);
        REQUIRE(r.condition_I);
        CHECK(r.condition_I->holds);
        CHECK_FALSE(r.condition_II.holds);
        CHECK(r.condition_II.cls == HyperbolicityClass::WeaklyHyperbolic);
        REQUIRE(r.condition_II.witness);
        CHECK(r.condition_II.witness->algebraic == 3);
        CHECK(r.condition_II.witness->geometric == 2);
        CHECK(r.condition_III.status == ConditionIIIStatus::NotApplicable);
    }
    const auto r = fast_manifold_report(State::from_primitive(1.0, 0, 0, 0.01, 0), p);
    CHECK(r.fast->beta == doctest::Approx(9.81 * 1650.0 / (2.0 * 1016.5)).epsilon(1e-14));
    CHECK(r.condition_I->block_determinant ==
          doctest::Approx(12.0 * 15.0 * 10.0 / 1.0));  // mu = epsilon * 1 m/s

    CHECK_THROWS_AS(fast_manifold_report(State::from_primitive(1, 0, 0, 0, 0), p), ValidationError);
}

TEST_CASE("full stability report at settled rest") {
    const Parameters p;
    const auto r = stability_report(State::from_primitive(1.0, 0, 0, 0, 0), p, {0, 0.5, 1, 2, 10});
    CHECK(r.equilibrium.kind == EquilibriumKind::FullySettledRest);
    REQUIRE(r.condition_I);
    CHECK(r.condition_I->holds);
    CHECK(r.condition_II.cls == HyperbolicityClass::WeaklyHyperbolic);
    CHECK(r.condition_III.status == ConditionIIIStatus::NotApplicable);
    REQUIRE(r.spectral);
    CHECK(r.spectral->max_real <= 1e-10);
}
