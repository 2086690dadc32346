#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "gsk/csr_matrix.hpp"
#include "gsk/problems.hpp"
#include "test_util.hpp"

using namespace gsk;

TEST(Spmv, Identity)
{
    const auto y = spmv(CsrMatrix::identity(3), Vector{1, 2, 3});
    EXPECT_EQ(y, (Vector{1, 2, 3}));
}

TEST(Spmv, HandExpansion)
{
    const auto a = CsrMatrix::from_dense(2, std::vector<double>{2, 0, 1, 3});
    EXPECT_EQ(spmv(a, Vector{1, 1}), (Vector{2, 4}));
}

TEST(Spmv, OnesGivesProblem1Rhs)
{
    const auto sys = generate_p1(GridSpec::square(12));
    EXPECT_EQ(spmv(sys.matrix, ones(sys.size())), sys.rhs);
}

TEST(Spmv, DimensionMismatchThrows)
{
    EXPECT_THROW(spmv(CsrMatrix::identity(3), Vector{1, 2}), DimensionError);
}

TEST(Spmv, AgreesWithDenseProduct)
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng() % 200;
        const auto a = testutil::random_matrix(rng, n, 0.1, 1.0);
        const auto x = testutil::random_vector(rng, n);
        const auto d = to_dense(a);
        Vector ref(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) ref[i] += d(i, j) * x[j];
        }
        EXPECT_LT(testutil::rel_diff(spmv(a, x), ref), 1e-13);
    }
}

TEST(RowNorm, Examples)
{
    const auto a = CsrMatrix::from_dense(3, std::vector<double>{3, 4, 0, 1, -1, 2, 0, 0, 5});
    EXPECT_DOUBLE_EQ(row_norm(a, 0, 2), 5.0);
    EXPECT_DOUBLE_EQ(row_norm(a, 1, 1), 4.0);
    EXPECT_NEAR(row_norm(a, 1, 3), std::cbrt(10.0), 1e-15);
    EXPECT_NEAR(row_norm(a, 1, 4), std::pow(18.0, 0.25), 1e-15);
}

TEST(RowNorm, RejectsPBelowOne)
{
    EXPECT_THROW(row_norm(CsrMatrix::identity(2), 0, 0), Error);
}

TEST(CsrMatrix, FromTripletsSortsRows)
{
    const auto a = CsrMatrix::from_triplets(3, {{0, 2, 1.0}, {0, 0, 2.0}, {1, 1, 3.0}, {2, 0, 4.0}});
    EXPECT_EQ(std::vector<std::size_t>(a.col_idx().begin(), a.col_idx().end()),
              (std::vector<std::size_t>{0, 2, 1, 0}));
    EXPECT_EQ(a.at(0, 2), 1.0);
    EXPECT_EQ(a.at(1, 0), 0.0);
}

TEST(CsrMatrix, RejectsDuplicates)
{
    EXPECT_THROW(CsrMatrix::from_triplets(2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}}), Error);
}

TEST(CsrMatrix, RejectsEmptyRow)
{
    EXPECT_THROW(CsrMatrix::from_triplets(2, {{0, 0, 1.0}}), Error);
}

TEST(CsrMatrix, RejectsBadStructure)
{
    EXPECT_THROW(CsrMatrix(2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), Error);
    EXPECT_THROW(CsrMatrix(2, {0, 2, 3}, {1, 0, 1}, {1.0, 1.0, 1.0}), Error);
    EXPECT_THROW(CsrMatrix(2, {0, 1}, {0}, {1.0}), Error);
}

TEST(CsrMatrix, TransposeRoundTrip)
{
    std::mt19937 rng(3);
    const auto a = testutil::random_matrix(rng, 30, 0.2, 1.0);
    const auto t = a.transpose();
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) EXPECT_EQ(a.at(i, j), t.at(j, i));
    }
    EXPECT_TRUE(t.transpose().same_pattern(a));
}

TEST(ToDense, Examples)
{
    const auto i2 = to_dense(CsrMatrix::identity(2));
    EXPECT_EQ(i2.data, (std::vector<double>{1, 0, 0, 1}));
    const auto a = CsrMatrix::from_triplets(2, {{0, 1, 5.0}, {1, 0, 7.0}});
    EXPECT_EQ(to_dense(a).data, (std::vector<double>{0, 5, 7, 0}));
}

TEST(ToDense, Problem1At40Fits)
{
    const auto d = to_dense(generate_p1(GridSpec::square(40)).matrix);
    EXPECT_EQ(d.n, 1600u);
    EXPECT_EQ(d.data.size(), 1600u * 1600u);
}

TEST(ToDense, CapAdvisesSmallerGrid)
{
    try {
        to_dense(CsrMatrix::identity(10), 5);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("smaller grid"), std::string::npos);
    }
}

TEST(ToDense, CapFromEnvironment)
{
    ::setenv("GSK_DENSE_CAP", "4", 1);
    EXPECT_EQ(dense_cap(), 4u);
    EXPECT_THROW(to_dense(CsrMatrix::identity(5)), Error);
    ::unsetenv("GSK_DENSE_CAP");
    EXPECT_EQ(dense_cap(), kDefaultDenseCap);
}

TEST(LinearSystem, ValidateChecksRhsLength)
{
    LinearSystem s{CsrMatrix::identity(3), Vector{1, 2}, "bad", {}};
    EXPECT_THROW(s.validate(), Error);
}

TEST(GeneratedMatrices, PassValidation)
{
    for (const auto& sys : {generate_p1(GridSpec::square(9)), generate_p2(GridSpec::square(9)),
                            generate_p3(GridSpec::square(10)), generate_p4(GridSpec::cube(5))}) {
        EXPECT_NO_THROW(sys.validate()) << sys.label;
        for (std::size_t i = 0; i < sys.size(); ++i) EXPECT_GT(row_norm(sys.matrix, i, 2), 0.0);
    }
}
