#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "gsk/csr_matrix.hpp"
#include "gsk/problems.hpp"

namespace gsk::testutil {

// Dense LU with partial pivoting; solves A x = b for a row-major n x n matrix.
inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b)
{
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::fabs(a[i * n + k]) > std::fabs(a[piv * n + k])) piv = i;
        }
        if (a[piv * n + k] == 0.0) throw std::runtime_error("singular");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a[k * n + j], a[piv * n + j]);
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i * n + k] / a[k * n + k];
            for (std::size_t j = k; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * x[j];
        x[i] = s / a[i * n + i];
    }
    return x;
}

inline std::vector<double> dense_solve(const CsrMatrix& a, const std::vector<double>& b)
{
    return dense_solve(to_dense(a).data, b);
}

// Random sparse-ish nonsingular matrix: random off-diagonals, diagonal pushed
// away from zero by `shift` times the row's off-diagonal mass.
inline CsrMatrix random_matrix(std::mt19937& rng, std::size_t n, double density, double shift)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && coin(rng) < density) {
                d[i * n + j] = u(rng);
                mass += std::fabs(d[i * n + j]);
            }
        }
        d[i * n + i] = (u(rng) < 0 ? -1.0 : 1.0) * (shift * mass + 0.5 + coin(rng));
    }
    return CsrMatrix::from_dense(n, d);
}

inline std::vector<double> random_vector(std::mt19937& rng, std::size_t n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = u(rng);
    return v;
}

inline double rel_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / (den > 0.0 ? den : 1.0));
}

using LComplex = std::complex<long double>;

// Characteristic polynomial coefficients c[0..n] (c[n] = 1) by Faddeev-LeVerrier.
inline std::vector<long double> char_poly(const DenseMatrix& a)
{
    const std::size_t n = a.n;
    std::vector<long double> c(n + 1, 0.0L);
    c[n] = 1.0L;
    std::vector<long double> m(n * n, 0.0L), am(n * n);
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (std::size_t l = 0; l < n; ++l) s += static_cast<long double>(a(i, l)) * m[l * n + j];
                am[i * n + j] = s;
            }
        }
        for (std::size_t i = 0; i < n * n; ++i) m[i] = am[i];
        for (std::size_t i = 0; i < n; ++i) m[i * n + i] += c[n - k + 1];
        long double tr = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            long double s = 0.0L;
            for (std::size_t l = 0; l < n; ++l) s += static_cast<long double>(a(i, l)) * m[l * n + i];
            tr += s;
        }
        c[n - k] = -tr / static_cast<long double>(k);
    }
    return c;
}

// Durand-Kerner simultaneous root iteration on a monic polynomial.
inline std::vector<LComplex> poly_roots(const std::vector<long double>& c)
{
    const std::size_t n = c.size() - 1;
    std::vector<LComplex> z(n);
    const LComplex seed(0.4L, 0.9L);
    for (std::size_t i = 0; i < n; ++i) z[i] = std::pow(seed, static_cast<long double>(i)) * 2.0L;
    const auto eval = [&](LComplex x) {
        LComplex v = 1.0L;
        for (std::size_t k = n; k-- > 0;) v = v * x + c[k];
        return v;
    };
    for (int it = 0; it < 5000; ++it) {
        long double moved = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            LComplex den = 1.0L;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) den *= z[i] - z[j];
            }
            const LComplex step = eval(z[i]) / den;
            z[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-18L) break;
    }
    return z;
}

// Largest distance after greedy nearest matching.
inline double match_error(std::vector<std::complex<double>> got, const std::vector<LComplex>& want)
{
    double worst = 0.0;
    for (const auto& w : want) {
        const std::complex<double> wd(static_cast<double>(w.real()), static_cast<double>(w.imag()));
        auto best = std::min_element(got.begin(), got.end(), [&](const auto& a, const auto& b) {
            return std::abs(a - wd) < std::abs(b - wd);
        });
        worst = std::max(worst, std::abs(*best - wd) / std::max(1.0, std::abs(wd)));
        got.erase(best);
    }
    return worst;
}


// Smooth manufactured problem: u = sin(pi x) sin(pi y), a = b = 1 + x + y and
// advective convection d = 1 + y, with F derived by hand.
inline CoefficientField manufactured_field()
{
    constexpr double pi = 3.14159265358979323846;
    CoefficientField f;
    const auto a = [](const Point& p) { return 1.0 + p[0] + p[1]; };
    f.diffusion = {a, a, a};
    f.convection[0] = [](const Point& p) { return 1.0 + p[1]; };
    f.source = [a](const Point& p) {
        const double sx = std::sin(pi * p[0]), cx = std::cos(pi * p[0]);
        const double sy = std::sin(pi * p[1]), cy = std::cos(pi * p[1]);
        const double ux = pi * cx * sy, uy = pi * sx * cy, lap = -2 * pi * pi * sx * sy;
        return -(a(p) * lap + ux + uy) + (1.0 + p[1]) * ux;
    };
    return f;
}

// Max-norm error of the discrete solution on an n x n grid.
inline double manufactured_error(std::size_t n)
{
    constexpr double pi = 3.14159265358979323846;
    const auto s = assemble(manufactured_field(), GridSpec::square(n), "manufactured");
    const auto x = dense_solve(s.matrix, s.rhs);
    const double h = 1.0 / static_cast<double>(n + 1);
    double err = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const double u = std::sin(pi * (i + 1) * h) * std::sin(pi * (j + 1) * h);
            err = std::max(err, std::fabs(x[i + n * j] - u));
        }
    }
    return err;
}

} // namespace gsk::testutil
