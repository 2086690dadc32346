#include "gsk/csr_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace gsk {

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr,
                     std::vector<std::size_t> col_idx, std::vector<double> values)
    : n_(n), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values))
{
    validate();
}

void CsrMatrix::validate() const
{
    if (row_ptr_.size() != n_ + 1) {
        throw Error("csr: row_ptr must have n+1 entries");
    }
    if (row_ptr_.front() != 0 || row_ptr_.back() != values_.size() ||
        col_idx_.size() != values_.size()) {
        throw Error("csr: row_ptr does not span the stored entries");
    }
    for (std::size_t i = 0; i < n_; ++i) {
        const std::size_t b = row_ptr_[i];
        const std::size_t e = row_ptr_[i + 1];
        if (e < b) throw Error("csr: row_ptr decreases at row " + std::to_string(i));
        if (e == b) throw Error("csr: row " + std::to_string(i) + " is empty");
        for (std::size_t k = b; k < e; ++k) {
            if (col_idx_[k] >= n_) {
                throw Error("csr: column index out of range in row " + std::to_string(i));
            }
            if (k > b && col_idx_[k] <= col_idx_[k - 1]) {
                throw Error("csr: columns not strictly increasing in row " + std::to_string(i));
            }
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> entries)
{
    for (const auto& t : entries) {
        if (t.row >= n || t.col >= n) throw Error("csr: triplet index out of range");
    }
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    cols.reserve(entries.size());
    vals.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& t = entries[k];
        if (k > 0 && entries[k - 1].row == t.row && entries[k - 1].col == t.col) {
            throw Error("csr: duplicate entry (" + std::to_string(t.row) + ", " +
                        std::to_string(t.col) + ")");
        }
        ++row_ptr[t.row + 1];
        cols.push_back(t.col);
        vals.push_back(t.value);
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::from_dense(std::size_t n, std::span<const double> row_major)
{
    check_same_length(row_major.size(), n * n, "from_dense");
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = row_major[i * n + j];
            if (v != 0.0) {
                cols.push_back(j);
                vals.push_back(v);
            }
        }
        row_ptr[i + 1] = cols.size();
    }
    return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix CsrMatrix::identity(std::size_t n)
{
    std::vector<std::size_t> row_ptr(n + 1);
    std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
    std::vector<std::size_t> cols(n);
    std::iota(cols.begin(), cols.end(), std::size_t{0});
    return CsrMatrix(n, std::move(row_ptr), std::move(cols), std::vector<double>(n, 1.0));
}

double CsrMatrix::at(std::size_t i, std::size_t j) const
{
    const auto r = row(i);
    const auto it = std::lower_bound(r.cols.begin(), r.cols.end(), j);
    if (it == r.cols.end() || *it != j) return 0.0;
    return r.vals[static_cast<std::size_t>(it - r.cols.begin())];
}

CsrMatrix CsrMatrix::with_values(std::vector<double> values) const
{
    check_same_length(values.size(), nnz(), "with_values");
    CsrMatrix out;
    out.n_ = n_;
    out.row_ptr_ = row_ptr_;
    out.col_idx_ = col_idx_;
    out.values_ = std::move(values);
    return out;
}

bool CsrMatrix::same_pattern(const CsrMatrix& other) const
{
    return n_ == other.n_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

CsrMatrix CsrMatrix::transpose() const
{
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t i = 0; i < n_; ++i) {
        const auto r = row(i);
        for (std::size_t k = 0; k < r.size(); ++k) t.push_back({r.cols[k], i, r.vals[k]});
    }
    return from_triplets(n_, std::move(t));
}

void LinearSystem::validate() const
{
    matrix.validate();
    check_same_length(rhs.size(), matrix.size(), "LinearSystem rhs");
}

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    check_same_length(x.size(), a.size(), "spmv x");
    check_same_length(y.size(), a.size(), "spmv y");
    const auto rp = a.row_ptr();
    const auto ci = a.col_idx();
    const auto va = a.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) s += va[k] * x[ci[k]];
        y[i] = s;
    }
}

Vector spmv(const CsrMatrix& a, std::span<const double> x)
{
    check_same_length(x.size(), a.size(), "spmv x");
    Vector y(a.size());
    spmv(a, x, y);
    return y;
}

void residual(const CsrMatrix& a, std::span<const double> x, std::span<const double> b,
              std::span<double> r)
{
    spmv(a, x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
}

namespace {

double abs_pow(double v, int p)
{
    const double a = std::fabs(v);
    switch (p) {
    case 1: return a;
    case 2: return a * a;
    case 3: return a * a * a;
    default: return std::pow(a, p);
    }
}

double root(double s, int p)
{
    switch (p) {
    case 1: return s;
    case 2: return std::sqrt(s);
    case 3: return std::cbrt(s);
    default: return std::pow(s, 1.0 / p);
    }
}

} // namespace

double lp_norm(std::span<const double> v, int p)
{
    if (p < 1) throw Error("lp norm: p must be an integer >= 1, got " + std::to_string(p));
    double s = 0.0;
    for (double x : v) s += abs_pow(x, p);
    return root(s, p);
}

double row_norm(const CsrMatrix& a, std::size_t i, int p)
{
    if (i >= a.size()) throw DimensionError("row_norm: row index out of range");
    return lp_norm(a.row(i).vals, p);
}

std::size_t dense_cap()
{
    if (const char* env = std::getenv("GSK_DENSE_CAP")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    }
    return kDefaultDenseCap;
}

DenseMatrix to_dense(const CsrMatrix& a) { return to_dense(a, dense_cap()); }

DenseMatrix to_dense(const CsrMatrix& a, std::size_t cap)
{
    if (a.size() > cap) {
        throw Error("matrix of order " + std::to_string(a.size()) + " exceeds the dense cap of " +
                    std::to_string(cap) + "; use a smaller grid (or raise GSK_DENSE_CAP)");
    }
    DenseMatrix d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto r = a.row(i);
        for (std::size_t k = 0; k < r.size(); ++k) d(i, r.cols[k]) = r.vals[k];
    }
    return d;
}

} // namespace gsk
