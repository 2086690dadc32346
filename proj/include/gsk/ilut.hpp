#pragma once

#include <span>

#include "gsk/csr_matrix.hpp"

namespace gsk {

/// Threshold incomplete LU parameters, following the AZTEC conventions.
///
/// `fill` is a fill factor relative to the entries of A: each row of L and of U
/// keeps all of its entries that sit in the pattern of A plus at most
/// ceil((fill - 1) * nnz(A) / (2n)) fill-in entries of largest magnitude.
/// fill = 1 therefore reproduces ILU(0); a factor of n or more is exact for any
/// matrix with at least two entries per row on average.
struct IlutConfig {
    double drop_tol = 0.0;
    double fill = 1.0;

    void validate() const;
};

/// Number of fill-in entries each row of L (and of U) may keep.
std::size_t ilut_extra_per_row(const CsrMatrix& a, double fill);

/// L is unit lower triangular and stores its unit diagonal explicitly as the
/// last entry of each row. U is upper triangular with the pivot first in each row.
struct IluFactors {
    CsrMatrix lower;
    CsrMatrix upper;
    Vector inv_diag;

    std::size_t size() const { return upper.size(); }
};

/// Row-wise (IKJ) ILUT without pivoting. Entries whose magnitude falls below
/// drop_tol * ||a_i||_2 are discarded. Throws on a zero pivot.
IluFactors ilut_factor(const CsrMatrix& a, const IlutConfig& cfg = {});

/// z = U^-1 L^-1 r
Vector apply_precond(const IluFactors& f, std::span<const double> r);
void apply_precond(const IluFactors& f, std::span<const double> r, std::span<double> z);

} // namespace gsk
