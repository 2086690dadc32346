#include "gsk/scaling.hpp"

#include <cmath>

namespace gsk {

DiagScaling gs_diagonal(const CsrMatrix& a, int p)
{
    if (p < 1) throw Error("geometric scaling: p must be an integer >= 1");
    DiagScaling d{p, Vector(a.size())};
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double norm = row_norm(a, i, p);
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw Error("geometric scaling: row " + std::to_string(i) +
                        " has zero (or non-finite) norm");
        }
        d.diag[i] = 1.0 / norm;
    }
    return d;
}

CsrMatrix scale_matrix(const CsrMatrix& a, std::span<const double> left,
                       std::span<const double> right)
{
    if (!left.empty()) check_same_length(left.size(), a.size(), "scale_matrix left");
    if (!right.empty()) check_same_length(right.size(), a.size(), "scale_matrix right");
    std::vector<double> vals(a.values().begin(), a.values().end());
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double l = left.empty() ? 1.0 : left[i];
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            vals[k] *= l;
            if (!right.empty()) vals[k] *= right[ci[k]];
        }
    }
    return a.with_values(std::move(vals));
}

ScaledSystem gs_scale(const LinearSystem& system, int p)
{
    system.validate();
    DiagScaling d = gs_diagonal(system.matrix, p);
    LinearSystem out;
    out.matrix = scale_matrix(system.matrix, d.diag, {});
    out.rhs.resize(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) out.rhs[i] = d.diag[i] * system.rhs[i];
    out.label = system.label + " [gs" + std::to_string(p) + "]";
    out.grid = system.grid;
    return {std::move(out), std::move(d)};
}

ScaledSystem gs_scale_symmetric(const LinearSystem& system, int p)
{
    system.validate();
    DiagScaling d = gs_diagonal(system.matrix, p);
    Vector half(d.diag.size());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = std::sqrt(d.diag[i]);
    LinearSystem out;
    out.matrix = scale_matrix(system.matrix, half, half);
    out.rhs.resize(system.size());
    for (std::size_t i = 0; i < system.size(); ++i) out.rhs[i] = half[i] * system.rhs[i];
    out.label = system.label + " [sym" + std::to_string(p) + "]";
    out.grid = system.grid;
    return {std::move(out), std::move(d)};
}

Vector unscale_solution(std::span<const double> y, const DiagScaling& d)
{
    check_same_length(y.size(), d.diag.size(), "unscale_solution");
    Vector x(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::sqrt(d.diag[i]) * y[i];
    return x;
}

} // namespace gsk
