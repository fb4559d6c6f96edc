#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "swemed1/errors.hpp"
#include "swemed1/linalg.hpp"
#include "test_support.hpp"

using namespace swemed1;
using namespace swemed1::linalg;

namespace {

Matrix5 rest_transport(double gh, double beta) {
    return Matrix5{{0, 1, 0, 0, 0},
                   {gh, 0, 0, beta, gh},
                   {0, 0, 0, beta, 0},
                   {0, 0, 0, 0, 0},
                   {0, 0, 0, 0, 0}};
}

Matrix5 random_matrix(testing::Sampler& s) {
    Matrix5 m;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) m(i, j) = s.uniform(-2.0, 2.0);
    return m;
}

bool sorted_real_close(std::vector<Complex> ev, std::vector<double> expected, double tol) {
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < ev.size(); ++i) {
        if (std::abs(ev[i].real() - expected[i]) > tol || std::abs(ev[i].imag()) > tol) return false;
    }
    return true;
}

double smallest_singular(const Matrix5& m) {
    const auto d = svd(m);
    return *std::min_element(d.sigma.begin(), d.sigma.end());
}

}  // namespace

TEST_CASE("eigenvalues of identity and diagonal matrices") {
    CHECK(sorted_real_close(eigenvalues(Matrix5::identity()), {1, 1, 1, 1, 1}, 1e-14));
    const Matrix5 d = Matrix5::diagonal({3.0, -1.0, 0.5, 7.0, 2.0});
    CHECK(sorted_real_close(eigenvalues(d), {3.0, -1.0, 0.5, 7.0, 2.0}, 1e-14));
}

TEST_CASE("rest transport matrix has spectrum {0,0,0,+-sqrt(gh)}") {
    const double gh = 9.81;
    const Matrix5 a = rest_transport(gh, gh * 1650.0 / 2000.0);
    const double c = std::sqrt(9.81);
    CHECK(sorted_real_close(eigenvalues(a), {0.0, 0.0, 0.0, c, -c}, 1e-7));

    const auto p = char_poly(a);
    const std::array<double, 6> expected{1.0, 0.0, -gh, 0.0, 0.0, 0.0};
    for (std::size_t k = 0; k < 6; ++k) CHECK(p[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("char_poly of the zero matrix is lambda^5") {
    const auto p = char_poly(Matrix5{});
    CHECK(p == std::array<double, 6>{1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("real and complex QR agree and satisfy backward-error bounds") {
    testing::Sampler s(7);
    for (int trial = 0; trial < 25; ++trial) {
        const Matrix5 m = random_matrix(s);
        const auto ev_real = eigenvalues(m);
        const auto ev_cplx = eigenvalues(to_complex(m));
        REQUIRE(ev_real.size() == 5);
        REQUIRE(ev_cplx.size() == 5);

        const auto coeffs = char_poly(m);
        const double norm = frobenius_norm(m);
        for (const Complex& z : ev_real) {
            // every real-QR root has a complex-QR partner
            double nearest = 1e300;
            for (const Complex& w : ev_cplx) nearest = std::min(nearest, std::abs(z - w));
            CHECK(nearest < 1e-9 * (1.0 + norm));
            CHECK(std::abs(poly_eval(coeffs, z)) < 1e-9 * std::pow(1.0 + norm, 5));
        }
        // sigma_min(m - lambda I) is the backward error of a real pair
        if (std::all_of(ev_real.begin(), ev_real.end(), [](Complex z) { return z.imag() == 0.0; })) {
            for (const Complex& z : ev_real)
                CHECK(smallest_singular(m - z.real() * Matrix5::identity()) < 1e-10 * (1.0 + norm));
        }
    }
}

TEST_CASE("nullspace of the rest transport matrix") {
    const Matrix5 a = rest_transport(2.0, 0.7);
    const auto basis = nullspace(a);
    REQUIRE(basis.size() == 2);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK(distance_to_span(Vector5{inv_sqrt2, 0, 0, 0, -inv_sqrt2}, basis) < 1e-12);
    CHECK(distance_to_span(Vector5{0, 0, 1, 0, 0}, basis) < 1e-12);
    for (const auto& v : basis) CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rank(a) == 3);
}

TEST_CASE("rank plus nullity equals dimension") {
    testing::Sampler s(11);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix5 m = random_matrix(s);
        const int drop = trial % 4;
        for (int k = 0; k < drop; ++k)
            for (std::size_t j = 0; j < 5; ++j) m(static_cast<std::size_t>(4 - k), j) = m(0, j) * (k + 2.0);
        CHECK(rank(m) + static_cast<int>(nullspace(m).size()) == 5);
        CHECK(rank(m) == 5 - drop);
    }
}

TEST_CASE("inverse and singular failure") {
    const double k = 1.0 / 0.6;
    const Matrix5 p{{1, 0, 0, -k, 0}, {0, 1, 0, 0, 0}, {0, 0, 0, k, 1}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}};
    CHECK(max_abs(p * inverse(p) - Matrix5::identity()) < 1e-14);
    CHECK_THROWS_AS(inverse(Matrix5{}), NumericalError);
}

TEST_CASE("fd_jacobian reproduces a linear map") {
    testing::Sampler s(3);
    const Matrix5 m = random_matrix(s);
    const Vector5 w{0.3, -1.0, 2.0, 0.0, 5.0};
    const Matrix5 j = fd_jacobian([&](const Vector5& x) { return m * x; }, w);
    CHECK(max_abs(j - m) < 1e-9);
}

TEST_CASE("symmetric_eigs is sorted and exact on a known matrix") {
    Mat<double, 3> m{{2, 1, 0}, {1, 2, 0}, {0, 0, -4}};
    const auto e = symmetric_eigs(m);
    CHECK(e[0] == doctest::Approx(-4.0));
    CHECK(e[1] == doctest::Approx(1.0));
    CHECK(e[2] == doctest::Approx(3.0));
}

TEST_CASE("clustering groups a defective eigenvalue") {
    const std::vector<Complex> ev{{1e-9, 2e-9}, {1e-9, -2e-9}, {-2e-9, 0}, {3, 0}, {-3, 0}};
    const auto cl = cluster_eigenvalues(ev, 1e-7);
    REQUIRE(cl.size() == 3);
    CHECK(cl[1].algebraic == 3);
    CHECK(std::abs(cl[1].center) < 1e-15);
}

TEST_CASE("complex QR on a shifted rotation") {
    // [[0,-1],[1,0]] + 2i I has eigenvalues 3i and i
    CMatrix<2> m{{Complex(0, 2), Complex(-1, 0)}, {Complex(1, 0), Complex(0, 2)}};
    auto ev = eigenvalues(m);
    std::sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    CHECK(std::abs(ev[0] - Complex(0, 1)) < 1e-14);
    CHECK(std::abs(ev[1] - Complex(0, 3)) < 1e-14);
}
