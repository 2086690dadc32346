#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsk/error.hpp"
#include "gsk/grid.hpp"
#include "gsk/vector_ops.hpp"

namespace gsk {

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square matrix in compressed sparse row format.
///
/// Structural invariants, checked by validate() and by every constructor:
///  - row_ptr has n+1 nondecreasing offsets, row_ptr[0] == 0, row_ptr[n] == nnz
///  - column indices inside a row are strictly increasing and lie in [0, n)
///  - no row is empty
///
/// Explicitly stored zeros are allowed. Instances are immutable.
class CsrMatrix {
public:
    struct RowView {
        std::span<const std::size_t> cols;
        std::span<const double> vals;

        std::size_t size() const { return cols.size(); }
    };

    CsrMatrix() = default;
    CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
              std::vector<double> values);

    /// Builds from unordered triplets. Duplicate (row, col) pairs are rejected.
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> entries);
    /// Row-major dense input; exact zeros are not stored.
    static CsrMatrix from_dense(std::size_t n, std::span<const double> row_major);
    static CsrMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> col_idx() const { return col_idx_; }
    std::span<const double> values() const { return values_; }

    RowView row(std::size_t i) const
    {
        const std::size_t b = row_ptr_[i];
        const std::size_t e = row_ptr_[i + 1];
        return {std::span<const std::size_t>(col_idx_).subspan(b, e - b),
                std::span<const double>(values_).subspan(b, e - b)};
    }

    /// Entry (i, j), zero if not stored.
    double at(std::size_t i, std::size_t j) const;

    /// Same sparsity pattern with new values (one per stored entry).
    CsrMatrix with_values(std::vector<double> values) const;

    bool same_pattern(const CsrMatrix& other) const;
    CsrMatrix transpose() const;

    void validate() const;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

struct LinearSystem {
    CsrMatrix matrix;
    Vector rhs;
    std::string label;
    std::optional<GridSpec> grid;

    std::size_t size() const { return matrix.size(); }
    void validate() const;
};

/// y = A x
Vector spmv(const CsrMatrix& a, std::span<const double> x);
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

/// r = b - A x
void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r);

/// (sum_j |a_ij|^p)^(1/p) for integer p >= 1.
double row_norm(const CsrMatrix& a, std::size_t i, int p);
double lp_norm(std::span<const double> v, int p);

/// Row-major dense square matrix.
struct DenseMatrix {
    std::size_t n = 0;
    std::vector<double> data;

    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
};

inline constexpr std::size_t kDefaultDenseCap = 5000;

/// Dense conversion limit; the GSK_DENSE_CAP environment variable overrides the default.
std::size_t dense_cap();

DenseMatrix to_dense(const CsrMatrix& a);
DenseMatrix to_dense(const CsrMatrix& a, std::size_t cap);

} // namespace gsk
