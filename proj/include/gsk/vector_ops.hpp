#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "gsk/error.hpp"

namespace gsk {

using Vector = std::vector<double>;

inline void check_same_length(std::size_t a, std::size_t b, const char* where)
{
    if (a != b) {
        throw DimensionError(std::string(where) + ": length mismatch (" + std::to_string(a) +
                             " vs " + std::to_string(b) + ")");
    }
}

inline double dot(std::span<const double> x, std::span<const double> y)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

/// ||w .* x||_2
inline double weighted_norm2(std::span<const double> w, std::span<const double> x)
{
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = w[i] * x[i];
        s += t * t;
    }
    return std::sqrt(s);
}

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, std::span<double> x)
{
    for (double& v : x) v *= alpha;
}

inline Vector ones(std::size_t n) { return Vector(n, 1.0); }

} // namespace gsk
