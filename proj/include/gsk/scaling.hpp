#pragma once

#include <span>

#include "gsk/csr_matrix.hpp"

namespace gsk {

/// Diagonal scaling D = diag(1/||a_1||_p, ..., 1/||a_n||_p). D is kept as a
/// vector and never formed as a matrix.
struct DiagScaling {
    int p = 2;
    Vector diag;
};

struct ScaledSystem {
    LinearSystem system;
    DiagScaling scaling;
};

/// Row-norm diagonal of A. Throws naming the first zero row.
DiagScaling gs_diagonal(const CsrMatrix& a, int p);

/// Geometric scaling GS(p): D A x = D b. Every row of the result has unit
/// p-norm; the pattern and the solution set are unchanged.
ScaledSystem gs_scale(const LinearSystem& system, int p);

/// Two-sided variant D^(1/2) A D^(1/2) y = D^(1/2) b. Recover x with unscale_solution.
ScaledSystem gs_scale_symmetric(const LinearSystem& system, int p);

/// x_i = sqrt(d_i) * y_i
Vector unscale_solution(std::span<const double> y, const DiagScaling& d);

/// diag(left) * A * diag(right); either span may be empty for identity.
CsrMatrix scale_matrix(const CsrMatrix& a, std::span<const double> left,
                       std::span<const double> right);

} // namespace gsk
