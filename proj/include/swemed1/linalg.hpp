/**
 * @file linalg.hpp
 * @brief Small dense real/complex matrix kernel.
 *
 * Everything here works on fixed-size square matrices (N <= 8). The
 * routines are O(N^3) and allocation free, which is all the transport,
 * Jacobian and spectral work of a five-equation system needs.
 *
 * Provided:
 *  - Mat<T, N> with the usual arithmetic
 *  - eigenvalues of real (Francis double shift) and complex (single shift
 *    Wilkinson) Hessenberg QR iterations
 *  - characteristic polynomial via the Faddeev-LeVerrier recursion
 *  - one-sided Jacobi SVD, rank, orthonormal null space, inverse
 *  - cyclic Jacobi for symmetric eigenvalues
 *  - central-difference Jacobians
 */
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <type_traits>
#include <vector>

#include "swemed1/errors.hpp"

namespace swemed1::linalg {

using Complex = std::complex<double>;

/// Singular values below kRankTolerance * sigma_max count as zero.
inline constexpr double kRankTolerance = 1e-9;
/// Eigenvalues within kClusterTolerance * (1 + ||m||) form one cluster.
inline constexpr double kClusterTolerance = 1e-7;

template <typename T, std::size_t N>
using Vec = std::array<T, N>;

template <typename T, std::size_t N>
class Mat {
    static_assert(N >= 1 && N <= 8, "Mat supports 1x1 up to 8x8");

public:
    static constexpr std::size_t size = N;
    using value_type = T;

    constexpr Mat() { data_.fill(T{}); }

    constexpr Mat(std::initializer_list<std::initializer_list<T>> rows) {
        data_.fill(T{});
        std::size_t i = 0;
        for (const auto& row : rows) {
            std::size_t j = 0;
            for (const auto& v : row) {
                if (i < N && j < N) data_[i * N + j] = v;
                ++j;
            }
            ++i;
        }
    }

    static constexpr Mat identity() {
        Mat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = T{1};
        return m;
    }

    static constexpr Mat diagonal(const Vec<T, N>& d) {
        Mat m;
        for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
        return m;
    }

    constexpr T& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
    constexpr const T& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

    constexpr Mat transpose() const {
        Mat t;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = 0; j < N; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat& operator+=(const Mat& o) {
        for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Mat& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
    friend Mat operator*(Mat a, T s) { return a *= s; }
    friend Mat operator*(T s, Mat a) { return a *= s; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat c;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t k = 0; k < N; ++k) {
                const T aik = a(i, k);
                if (aik == T{}) continue;
                for (std::size_t j = 0; j < N; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec<T, N> operator*(const Mat& a, const Vec<T, N>& x) {
        Vec<T, N> y{};
        for (std::size_t i = 0; i < N; ++i) {
            T s{};
            for (std::size_t j = 0; j < N; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    friend bool operator==(const Mat&, const Mat&) = default;

private:
    std::array<T, N * N> data_;
};

using Matrix5 = Mat<double, 5>;
using Vector5 = Vec<double, 5>;
template <std::size_t N>
using CMatrix = Mat<Complex, N>;
using CMatrix5 = CMatrix<5>;

// ---------------------------------------------------------------------------
// norms and helpers

template <typename T, std::size_t N>
double frobenius_norm(const Mat<T, N>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) s += std::norm(m(i, j));
    return std::sqrt(s);
}

template <typename T, std::size_t N>
double max_abs(const Mat<T, N>& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) s = std::max(s, std::abs(m(i, j)));
    return s;
}

template <typename T, std::size_t N>
double norm2(const Vec<T, N>& v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

template <typename T, std::size_t N>
double max_abs(const Vec<T, N>& v) {
    double s = 0.0;
    for (const auto& x : v) s = std::max(s, std::abs(x));
    return s;
}

template <std::size_t N>
CMatrix<N> to_complex(const Mat<double, N>& m) {
    CMatrix<N> c;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) c(i, j) = m(i, j);
    return c;
}

/// Conjugation by a permutation: result(i,j) = m(perm[i], perm[j]).
template <typename T, std::size_t N>
Mat<T, N> permute(const Mat<T, N>& m, const std::array<std::size_t, N>& perm) {
    Mat<T, N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r(i, j) = m(perm[i], perm[j]);
    return r;
}

// ---------------------------------------------------------------------------
// characteristic polynomial

/**
 * Faddeev-LeVerrier recursion. Returns the N+1 coefficients of
 * det(lambda I - m) in descending powers; the leading one is exactly 1.
 */
template <typename T, std::size_t N>
std::array<T, N + 1> char_poly(const Mat<T, N>& m) {
    std::array<T, N + 1> c{};
    c[0] = T{1};
    Mat<T, N> mk;  // M_0 = 0
    for (std::size_t k = 1; k <= N; ++k) {
        mk = m * mk;
        for (std::size_t i = 0; i < N; ++i) mk(i, i) += c[k - 1];
        const Mat<T, N> amk = m * mk;
        T tr{};
        for (std::size_t i = 0; i < N; ++i) tr += amk(i, i);
        c[k] = -tr / static_cast<double>(k);
    }
    return c;
}

/// Horner evaluation of descending coefficients.
template <typename T, std::size_t K>
Complex poly_eval(const std::array<T, K>& coeffs, Complex z) {
    Complex v{0.0, 0.0};
    for (const auto& c : coeffs) v = v * z + Complex(c);
    return v;
}

// ---------------------------------------------------------------------------
// eigenvalues

namespace detail {

template <typename T>
T conj_if(const T& x) {
    if constexpr (std::is_same_v<T, Complex>) {
        return std::conj(x);
    } else {
        return x;
    }
}

template <typename T, std::size_t N>
void balance(Mat<T, N>& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    bool done = false;
    int sweeps = 0;
    while (!done && sweeps++ < 100) {
        done = true;
        for (std::size_t i = 0; i < N; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < N; ++j) {
                if (j == i) continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                const double ginv = 1.0 / f;
                for (std::size_t j = 0; j < N; ++j) a(i, j) *= ginv;
                for (std::size_t j = 0; j < N; ++j) a(j, i) *= f;
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
template <typename T, std::size_t N>
void hessenberg(Mat<T, N>& a) {
    if constexpr (N >= 3) {
        for (std::size_t k = 0; k + 2 < N; ++k) {
            double xnorm = 0.0;
            for (std::size_t i = k + 1; i < N; ++i) xnorm += std::norm(a(i, k));
            xnorm = std::sqrt(xnorm);
            if (xnorm == 0.0) continue;
            const T x0 = a(k + 1, k);
            T phase{1};
            if (std::abs(x0) != 0.0) phase = x0 / std::abs(x0);
            const T alpha = -phase * xnorm;
            std::array<T, N> v{};
            for (std::size_t i = k + 1; i < N; ++i) v[i] = a(i, k);
            v[k + 1] -= alpha;
            double vnorm = 0.0;
            for (std::size_t i = k + 1; i < N; ++i) vnorm += std::norm(v[i]);
            if (vnorm == 0.0) continue;
            // a <- (I - 2 v v^H / |v|^2) a
            for (std::size_t j = 0; j < N; ++j) {
                T s{};
                for (std::size_t i = k + 1; i < N; ++i) s += conj_if(v[i]) * a(i, j);
                s *= 2.0 / vnorm;
                for (std::size_t i = k + 1; i < N; ++i) a(i, j) -= v[i] * s;
            }
            // a <- a (I - 2 v v^H / |v|^2)
            for (std::size_t i = 0; i < N; ++i) {
                T s{};
                for (std::size_t j = k + 1; j < N; ++j) s += a(i, j) * v[j];
                s *= 2.0 / vnorm;
                for (std::size_t j = k + 1; j < N; ++j) a(i, j) -= s * conj_if(v[j]);
            }
            for (std::size_t i = k + 2; i < N; ++i) a(i, k) = T{};
        }
    }
}

/// Francis double-shift QR on a real upper Hessenberg matrix.
template <std::size_t N>
std::vector<Complex> hqr(Mat<double, N> a, int max_iter_per_root) {
    std::vector<Complex> wr(N);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const int n = static_cast<int>(N);
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    int nn = n - 1;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, w = 0, x = 0, y = 0, z = 0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l > 0; --l) {
                s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(a(l, l - 1)) <= eps * s) {
                    a(l, l - 1) = 0.0;
                    break;
                }
            }
            x = a(nn, nn);
            if (l == nn) {
                wr[nn--] = x + t;
            } else {
                y = a(nn - 1, nn - 1);
                w = a(nn, nn - 1) * a(nn - 1, nn);
                if (l == nn - 1) {
                    p = 0.5 * (y - x);
                    q = p * p + w;
                    z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + std::copysign(z, p);
                        wr[nn - 1] = wr[nn] = x + z;
                        if (z != 0.0) wr[nn] = x - w / z;
                    } else {
                        wr[nn] = Complex(x + p, -z);
                        wr[nn - 1] = std::conj(wr[nn]);
                    }
                    nn -= 2;
                } else {
                    if (its == max_iter_per_root) {
                        throw NumericalError("eigenvalues: real QR iteration did not converge");
                    }
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) a(i, i) -= x;
                        s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    for (; m >= l; --m) {
                        z = a(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / a(m + 1, m) + a(m, m + 1);
                        q = a(m + 1, m + 1) - z - r - s;
                        r = a(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) +
                                                        std::abs(a(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        a(i + 2, i) = 0.0;
                        if (i != m) a(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = a(k, k - 1);
                            q = a(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = a(k + 2, k - 1);
                            if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        if ((s = std::copysign(std::sqrt(p * p + q * q + r * r), p)) != 0.0) {
                            if (k == m) {
                                if (l != m) a(k, k - 1) = -a(k, k - 1);
                            } else {
                                a(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                p = a(k, j) + q * a(k + 1, j);
                                if (k + 1 != nn) {
                                    p += r * a(k + 2, j);
                                    a(k + 2, j) -= p * z;
                                }
                                a(k + 1, j) -= p * y;
                                a(k, j) -= p * x;
                            }
                            const int mmin = nn < k + 3 ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                p = x * a(i, k) + y * a(i, k + 1);
                                if (k + 1 != nn) {
                                    p += z * a(i, k + 2);
                                    a(i, k + 2) -= p * r;
                                }
                                a(i, k + 1) -= p * q;
                                a(i, k) -= p;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return wr;
}

/// Single-shift (Wilkinson) QR with Givens rotations on a complex Hessenberg matrix.
template <std::size_t N>
std::vector<Complex> complex_qr(CMatrix<N> h, int max_iter_per_root) {
    std::vector<Complex> ev(N);
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const double hnorm = std::max(frobenius_norm(h), std::numeric_limits<double>::min());
    int hi = static_cast<int>(N) - 1;
    int its = 0;
    std::array<Complex, N> cs{}, sn{};
    while (hi >= 0) {
        if (hi == 0) {
            ev[0] = h(0, 0);
            break;
        }
        int l = hi;
        for (; l > 0; --l) {
            double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
            if (s == 0.0) s = hnorm;
            if (std::abs(h(l, l - 1)) <= eps * s) {
                h(l, l - 1) = 0.0;
                break;
            }
        }
        if (l == hi) {
            ev[hi] = h(hi, hi);
            --hi;
            its = 0;
            continue;
        }
        if (its == max_iter_per_root) {
            throw NumericalError("eigenvalues: complex QR iteration did not converge");
        }
        ++its;
        Complex mu;
        const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi), c = h(hi, hi - 1), d = h(hi, hi);
        if (its % 10 == 0) {
            mu = d + 0.75 * std::abs(c);
        } else {
            const Complex half = 0.5 * (a - d);
            const Complex disc = std::sqrt(half * half + b * c);
            const Complex m1 = d + half + disc;  // (a+d)/2 + disc
            const Complex m2 = d + half - disc;
            mu = std::abs(m1 - d) < std::abs(m2 - d) ? m1 : m2;
        }
        for (int i = l; i <= hi; ++i) h(i, i) -= mu;
        for (int k = l; k < hi; ++k) {
            const Complex x = h(k, k), y = h(k + 1, k);
            const double rr = std::hypot(std::abs(x), std::abs(y));
            Complex cc{1.0, 0.0}, ss{0.0, 0.0};
            if (rr != 0.0) {
                cc = x / rr;
                ss = y / rr;
            }
            cs[k] = cc;
            sn[k] = ss;
            for (int j = k; j <= hi; ++j) {
                const Complex u = h(k, j), v = h(k + 1, j);
                h(k, j) = std::conj(cc) * u + std::conj(ss) * v;
                h(k + 1, j) = -ss * u + cc * v;
            }
        }
        for (int k = l; k < hi; ++k) {
            const Complex cc = cs[k], ss = sn[k];
            const int rmax = std::min(k + 2, hi);
            for (int i = l; i <= rmax; ++i) {
                const Complex u = h(i, k), v = h(i, k + 1);
                h(i, k) = u * cc + v * ss;
                h(i, k + 1) = -u * std::conj(ss) + v * std::conj(cc);
            }
        }
        for (int i = l; i <= hi; ++i) h(i, i) += mu;
    }
    return ev;
}

}  // namespace detail

namespace detail {

template <std::size_t N>
Mat<double, N - 1> drop_row_col(const Mat<double, N>& m, std::size_t k) {
    Mat<double, N - 1> r;
    for (std::size_t i = 0, ri = 0; i < N; ++i) {
        if (i == k) continue;
        for (std::size_t j = 0, rj = 0; j < N; ++j) {
            if (j == k) continue;
            r(ri, rj++) = m(i, j);
        }
        ++ri;
    }
    return r;
}

/// Row or column k has no off-diagonal entries, so m(k, k) splits off exactly.
template <std::size_t N>
bool isolated(const Mat<double, N>& m, std::size_t k) {
    bool row = true, col = true;
    for (std::size_t j = 0; j < N; ++j) {
        if (j == k) continue;
        row = row && m(k, j) == 0.0;
        col = col && m(j, k) == 0.0;
    }
    return row || col;
}

}  // namespace detail

/// Eigenvalues of a real matrix (balanced Hessenberg + Francis QR).
/// Isolated diagonal entries are split off first; a repeated zero eigenvalue
/// otherwise makes QR converge only linearly.
template <std::size_t N>
std::vector<Complex> eigenvalues(Mat<double, N> m, int max_iter_per_root = 60) {
    if constexpr (N == 1) {
        return {Complex(m(0, 0), 0.0)};
    } else {
        for (std::size_t k = 0; k < N; ++k) {
            if (!detail::isolated(m, k)) continue;
            auto rest = eigenvalues(detail::drop_row_col(m, k), max_iter_per_root);
            rest.emplace_back(m(k, k), 0.0);
            return rest;
        }
    }
    detail::balance(m);
    detail::hessenberg(m);
    return detail::hqr(m, max_iter_per_root);
}

/// Eigenvalues of a complex matrix (balanced Hessenberg + shifted complex QR).
template <std::size_t N>
std::vector<Complex> eigenvalues(CMatrix<N> m, int max_iter_per_root = 60) {
    detail::balance(m);
    detail::hessenberg(m);
    return detail::complex_qr(m, max_iter_per_root);
}

/// Largest eigenvalue modulus of a real matrix.
template <std::size_t N>
double spectral_radius(const Mat<double, N>& m) {
    double r = 0.0;
    for (const auto& l : eigenvalues(m)) r = std::max(r, std::abs(l));
    return r;
}

/// Eigenvalue group: members lie within the clustering tolerance of each other.
struct EigenCluster {
    Complex center;  ///< arithmetic mean of the members
    int algebraic = 0;
};

/**
 * Single-linkage grouping of eigenvalues. The cluster mean is a far better
 * estimate of a defective eigenvalue than any single member.
 */
inline std::vector<EigenCluster> cluster_eigenvalues(const std::vector<Complex>& ev, double tol) {
    const std::size_t n = ev.size();
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(ev[i] - ev[j]) <= tol) parent[find(i)] = find(j);
    std::vector<EigenCluster> out;
    std::vector<std::size_t> roots;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = find(i);
        auto it = std::find(roots.begin(), roots.end(), r);
        if (it == roots.end()) {
            roots.push_back(r);
            out.push_back({ev[i], 1});
        } else {
            auto& c = out[static_cast<std::size_t>(it - roots.begin())];
            c.center += ev[i];
            ++c.algebraic;
        }
    }
    for (auto& c : out) c.center /= static_cast<double>(c.algebraic);
    std::sort(out.begin(), out.end(), [](const EigenCluster& a, const EigenCluster& b) {
        return a.center.real() != b.center.real() ? a.center.real() < b.center.real()
                                                  : a.center.imag() < b.center.imag();
    });
    return out;
}

// ---------------------------------------------------------------------------
// SVD, rank, null space

template <std::size_t N>
struct Svd {
    Vec<double, N> sigma{};    ///< unsorted singular values
    Mat<double, N> v;          ///< right singular vectors as columns
};

/// One-sided Jacobi (Hestenes) SVD of a real square matrix.
template <std::size_t N>
Svd<N> svd(const Mat<double, N>& a) {
    Mat<double, N> u = a;
    Mat<double, N> v = Mat<double, N>::identity();
    constexpr double eps = std::numeric_limits<double>::epsilon();
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < N; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < N; ++i) {
                    const double up = u(i, p), uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                    const double vp = v(i, p), vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }
    Svd<N> out;
    out.v = v;
    for (std::size_t j = 0; j < N; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < N; ++i) s += u(i, j) * u(i, j);
        out.sigma[j] = std::sqrt(s);
    }
    return out;
}

/// Number of singular values above tol * sigma_max.
template <std::size_t N>
int rank(const Mat<double, N>& m, double tol = kRankTolerance) {
    const auto d = svd(m);
    const double smax = *std::max_element(d.sigma.begin(), d.sigma.end());
    if (smax == 0.0) return 0;
    return static_cast<int>(
        std::count_if(d.sigma.begin(), d.sigma.end(), [&](double s) { return s > tol * smax; }));
}

/// Orthonormal basis of the (numerical) null space.
template <std::size_t N>
std::vector<Vec<double, N>> nullspace(const Mat<double, N>& m, double tol = kRankTolerance) {
    const auto d = svd(m);
    const double smax = *std::max_element(d.sigma.begin(), d.sigma.end());
    std::vector<Vec<double, N>> basis;
    for (std::size_t j = 0; j < N; ++j) {
        if (smax == 0.0 || d.sigma[j] <= tol * smax) {
            Vec<double, N> col{};
            for (std::size_t i = 0; i < N; ++i) col[i] = d.v(i, j);
            basis.push_back(col);
        }
    }
    return basis;
}

/// Distance of x from span(basis), basis assumed orthonormal.
template <std::size_t N>
double distance_to_span(const Vec<double, N>& x, const std::vector<Vec<double, N>>& basis) {
    Vec<double, N> r = x;
    for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < N; ++i) dot += b[i] * x[i];
        for (std::size_t i = 0; i < N; ++i) r[i] -= dot * b[i];
    }
    return norm2(r);
}

/// Gauss-Jordan inverse with partial pivoting; throws on a rank-deficient input.
template <std::size_t N>
Mat<double, N> inverse(const Mat<double, N>& m, double tol = kRankTolerance) {
    if (rank(m, tol) < static_cast<int>(N)) {
        throw NumericalError("inverse: matrix is singular at the rank tolerance");
    }
    Mat<double, N> a = m;
    Mat<double, N> inv = Mat<double, N>::identity();
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < N; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (piv != col) {
            for (std::size_t j = 0; j < N; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const double d = a(col, col);
        for (std::size_t j = 0; j < N; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t i = 0; i < N; ++i) {
            if (i == col) continue;
            const double f = a(i, col);
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Solves a x = b by partial-pivot elimination; no rank check (hot path).
template <std::size_t N>
bool solve_in_place(Mat<double, N> a, Vec<double, N>& b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t i = col + 1; i < N; ++i)
            if (std::abs(a(i, col)) > std::abs(a(piv, col))) piv = i;
        if (a(piv, col) == 0.0) return false;
        if (piv != col) {
            for (std::size_t j = col; j < N; ++j) std::swap(a(col, j), a(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t i = col + 1; i < N; ++i) {
            const double f = a(i, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < N; ++j) a(i, j) -= f * a(col, j);
            b[i] -= f * b[col];
        }
    }
    for (std::size_t ii = N; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < N; ++j) s -= a(ii, j) * b[j];
        b[ii] = s / a(ii, ii);
    }
    return true;
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
template <std::size_t N>
Vec<double, N> symmetric_eigs(Mat<double, N> a) {
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a(p, q) * a(p, q);
        if (off <= 1e-34 * std::max(1.0, frobenius_norm(a) * frobenius_norm(a))) break;
        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t =
                    std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    Vec<double, N> d{};
    for (std::size_t i = 0; i < N; ++i) d[i] = a(i, i);
    std::sort(d.begin(), d.end());
    return d;
}

/**
 * Central-difference Jacobian of f at w. The perturbation of component j is
 * step * max(1, |w_j|).
 */
template <std::size_t N, typename F>
Mat<double, N> fd_jacobian(F&& f, const Vec<double, N>& w, double step = 1e-6) {
    Mat<double, N> jac;
    for (std::size_t j = 0; j < N; ++j) {
        const double hj = step * std::max(1.0, std::abs(w[j]));
        Vec<double, N> wp = w, wm = w;
        wp[j] += hj;
        wm[j] -= hj;
        const Vec<double, N> fp = f(wp);
        const Vec<double, N> fm = f(wm);
        for (std::size_t i = 0; i < N; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * hj);
    }
    return jac;
}

}  // namespace swemed1::linalg
