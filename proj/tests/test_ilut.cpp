#include <gtest/gtest.h>

#include <random>

#include "gsk/ilut.hpp"
#include "gsk/problems.hpp"
#include "test_util.hpp"

using namespace gsk;

namespace {

// L*U as a dense matrix (L carries its unit diagonal explicitly).
std::vector<double> product(const IluFactors& f)
{
    const auto l = to_dense(f.lower);
    const auto u = to_dense(f.upper);
    const std::size_t n = f.size();
    std::vector<double> p(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (l(i, k) == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) p[i * n + j] += l(i, k) * u(k, j);
        }
    }
    return p;
}

// Textbook ILU(0) on a dense copy restricted to the pattern of A.
std::vector<double> ilu0_reference(const CsrMatrix& a)
{
    const std::size_t n = a.size();
    auto w = to_dense(a).data;
    std::vector<char> nz(n * n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto j : a.row(i).cols) nz[i * n + j] = 1;
    }
    for (std::size_t i = 1; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            if (!nz[i * n + k]) continue;
            w[i * n + k] /= w[k * n + k];
            for (std::size_t j = k + 1; j < n; ++j) {
                if (nz[i * n + j]) w[i * n + j] -= w[i * n + k] * w[k * n + j];
            }
        }
    }
    return w;
}

} // namespace

TEST(Ilut, DiagonalMatrix)
{
    const auto a = CsrMatrix::from_dense(3, std::vector<double>{2, 0, 0, 0, -3, 0, 0, 0, 5});
    const auto f = ilut_factor(a);
    EXPECT_EQ(to_dense(f.lower).data, to_dense(CsrMatrix::identity(3)).data);
    EXPECT_EQ(to_dense(f.upper).data, to_dense(a).data);
}

TEST(Ilut, ExactOnTridiagonal)
{
    const auto a = CsrMatrix::from_dense(3, std::vector<double>{4, 1, 0, 1, 4, 1, 0, 1, 4});
    const auto f = ilut_factor(a, {0.0, 3.0});
    // Gaussian elimination by hand: l10 = 1/4, u11 = 15/4, l21 = 4/15, u22 = 56/15.
    EXPECT_DOUBLE_EQ(f.lower.at(1, 0), 0.25);
    EXPECT_DOUBLE_EQ(f.upper.at(1, 1), 3.75);
    EXPECT_DOUBLE_EQ(f.lower.at(2, 1), 4.0 / 15.0);
    EXPECT_NEAR(f.upper.at(2, 2), 56.0 / 15.0, 1e-15);
    EXPECT_EQ(f.upper.at(0, 1), 1.0);
}

TEST(Ilut, ExactWithLargeFill)
{
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 10 + rng() % 90;
        const auto a = testutil::random_matrix(rng, n, 0.08, 1.5);
        const auto f = ilut_factor(a, {0.0, static_cast<double>(n)});
        const auto p = product(f);
        const auto d = to_dense(a).data;
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            num += (p[k] - d[k]) * (p[k] - d[k]);
            den += d[k] * d[k];
        }
        EXPECT_LT(std::sqrt(num / den), 1e-12);
    }
}

TEST(Ilut, FillOneIsIlu0OnFivePointStencil)
{
    const auto a = generate_p1(GridSpec::square(12)).matrix;
    const auto f = ilut_factor(a, {0.0, 1.0});
    const auto ref = ilu0_reference(a);
    const std::size_t n = a.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double got = j < i ? f.lower.at(i, j) : f.upper.at(i, j);
            const bool in_pattern = a.at(i, j) != 0.0;
            if (!in_pattern) {
                EXPECT_EQ(got, 0.0) << i << "," << j;
                EXPECT_FALSE(j < i ? f.lower.at(i, j) != 0.0 : false);
            } else {
                EXPECT_NEAR(got, ref[i * n + j], 1e-12 * std::fabs(ref[i * n + j])) << i << "," << j;
            }
        }
    }
    EXPECT_EQ(f.lower.nnz() + f.upper.nnz(), a.nnz() + n);
}

TEST(Ilut, FillOneKeepsSevenPointPattern)
{
    const auto a = generate_p4(GridSpec::cube(6)).matrix;
    const auto f = ilut_factor(a, {0.0, 1.0});
    for (const CsrMatrix* m : {&f.lower, &f.upper}) {
        for (std::size_t i = 0; i < m->size(); ++i) {
            for (auto j : m->row(i).cols) EXPECT_TRUE(i == j || a.at(i, j) != 0.0) << i << "," << j;
        }
    }
}

TEST(Ilut, ExtraPerRowBudget)
{
    const auto a = generate_p1(GridSpec::square(10)).matrix;
    EXPECT_EQ(ilut_extra_per_row(a, 1.0), 0u);
    // nnz/n is just under 5 for a five-point stencil, so fill 2 allows 3 extras per part.
    EXPECT_EQ(ilut_extra_per_row(a, 2.0), 3u);
}

TEST(Ilut, DropToleranceRemovesSmallFill)
{
    std::mt19937 rng(37);
    const auto a = testutil::random_matrix(rng, 40, 0.1, 1.5);
    const auto exact = ilut_factor(a, {0.0, 40.0});
    const auto dropped = ilut_factor(a, {0.05, 40.0});
    EXPECT_LT(dropped.lower.nnz() + dropped.upper.nnz(), exact.lower.nnz() + exact.upper.nnz());
}

TEST(Ilut, ZeroPivotThrows)
{
    const auto a = CsrMatrix::from_dense(2, std::vector<double>{0, 1, 1, 0});
    try {
        ilut_factor(a);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("zero pivot at row 0"), std::string::npos) << e.what();
    }
}

TEST(Ilut, RejectsBadConfig)
{
    EXPECT_THROW(ilut_factor(CsrMatrix::identity(2), {-1.0, 1.0}), Error);
    EXPECT_THROW(ilut_factor(CsrMatrix::identity(2), {0.0, -1.0}), Error);
}

TEST(ApplyPrecond, IdentityFactors)
{
    const auto f = ilut_factor(CsrMatrix::identity(3));
    EXPECT_EQ(apply_precond(f, Vector{1, -2, 3}), (Vector{1, -2, 3}));
}

TEST(ApplyPrecond, Diagonal)
{
    const auto f = ilut_factor(CsrMatrix::from_dense(2, std::vector<double>{2, 0, 0, 4}));
    EXPECT_EQ(apply_precond(f, Vector{2, 4}), (Vector{1, 1}));
}

TEST(ApplyPrecond, ExactFactorsSolve)
{
    std::mt19937 rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng() % 40;
        const auto a = testutil::random_matrix(rng, n, 0.3, 1.5);
        const auto r = testutil::random_vector(rng, n);
        const auto f = ilut_factor(a, {0.0, static_cast<double>(n)});
        EXPECT_LT(testutil::rel_diff(apply_precond(f, r), testutil::dense_solve(a, r)), 1e-12);
    }
}

TEST(ApplyPrecond, DimensionMismatch)
{
    const auto f = ilut_factor(CsrMatrix::identity(3));
    EXPECT_THROW(apply_precond(f, Vector{1, 2}), DimensionError);
}
