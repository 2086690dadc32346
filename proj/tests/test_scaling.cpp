#include <gtest/gtest.h>

#include <random>

#include "gsk/problems.hpp"
#include "gsk/scaling.hpp"
#include "test_util.hpp"

using namespace gsk;

TEST(GsScale, IdentityUnchanged)
{
    LinearSystem s{CsrMatrix::identity(3), Vector{1, 2, 3}, "I", {}};
    const auto r = gs_scale(s, 2);
    EXPECT_EQ(r.scaling.diag, (Vector{1, 1, 1}));
    EXPECT_EQ(to_dense(r.system.matrix).data, to_dense(s.matrix).data);
    EXPECT_EQ(r.system.rhs, s.rhs);
}

TEST(GsScale, TwoByTwoByHand)
{
    LinearSystem s{CsrMatrix::from_dense(2, std::vector<double>{3, 4, 0, 5}), Vector{10, 5}, "", {}};
    const auto r = gs_scale(s, 2);
    const auto d = to_dense(r.system.matrix);
    EXPECT_DOUBLE_EQ(d(0, 0), 0.6);
    EXPECT_DOUBLE_EQ(d(0, 1), 0.8);
    EXPECT_DOUBLE_EQ(d(1, 1), 1.0);
    EXPECT_DOUBLE_EQ(r.system.rhs[0], 2.0);
    EXPECT_DOUBLE_EQ(r.system.rhs[1], 1.0);
    EXPECT_EQ(r.scaling.p, 2);
}

TEST(GsScale, UnitRowNormsForEveryP)
{
    std::mt19937 rng(5);
    const auto a = testutil::random_matrix(rng, 80, 0.1, 3.0);
    LinearSystem s{a, testutil::random_vector(rng, 80), "", {}};
    for (int p : {1, 2, 3, 4}) {
        const auto r = gs_scale(s, p);
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(row_norm(r.system.matrix, i, p), 1.0, 1e-12) << "p=" << p << " row " << i;
        }
    }
}

TEST(GsScale, Idempotent)
{
    const auto once = gs_scale(generate_p1(GridSpec::square(10)), 2).system;
    const auto twice = gs_scale(once, 2).system;
    for (std::size_t k = 0; k < once.matrix.nnz(); ++k) {
        EXPECT_NEAR(twice.matrix.values()[k], once.matrix.values()[k], 1e-14);
    }
}

TEST(GsScale, PreservesSolution)
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 5 + rng() % 45;
        LinearSystem s{testutil::random_matrix(rng, n, 0.3, 1.2), testutil::random_vector(rng, n), "", {}};
        const auto x = testutil::dense_solve(s.matrix, s.rhs);
        for (int p : {1, 2}) {
            const auto r = gs_scale(s, p);
            EXPECT_LT(testutil::rel_diff(testutil::dense_solve(r.system.matrix, r.system.rhs), x), 1e-10);
        }
    }
}

TEST(GsScale, PatternPreserved)
{
    const auto s = generate_p2(GridSpec::square(8));
    EXPECT_TRUE(gs_scale(s, 1).system.matrix.same_pattern(s.matrix));
    EXPECT_TRUE(gs_scale_symmetric(s, 2).system.matrix.same_pattern(s.matrix));
}

TEST(GsScale, ZeroRowNamed)
{
    // from_dense would reject an empty row, so build one with an explicit zero.
    LinearSystem s{CsrMatrix(2, {0, 1, 2}, {0, 1}, {1.0, 0.0}), Vector{1, 1}, "", {}};
    try {
        gs_scale(s, 2);
        FAIL() << "expected an error";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos) << e.what();
    }
}

TEST(GsScaleSymmetric, DiagonalByHand)
{
    LinearSystem s{CsrMatrix::from_dense(2, std::vector<double>{4, 0, 0, 16}), Vector{4, 16}, "", {}};
    const auto r = gs_scale_symmetric(s, 2);
    EXPECT_DOUBLE_EQ(r.scaling.diag[0], 0.25);
    EXPECT_DOUBLE_EQ(r.scaling.diag[1], 1.0 / 16.0);
    const auto d = to_dense(r.system.matrix);
    EXPECT_DOUBLE_EQ(d(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(d(1, 1), 1.0);
    // y solves the scaled diagonal system directly; x = D^(1/2) y is (1, 1).
    const Vector y{r.system.rhs[0] / d(0, 0), r.system.rhs[1] / d(1, 1)};
    const auto x = unscale_solution(y, r.scaling);
    EXPECT_DOUBLE_EQ(x[0], 1.0);
    EXPECT_DOUBLE_EQ(x[1], 1.0);
}

TEST(GsScaleSymmetric, IdentityUnchanged)
{
    LinearSystem s{CsrMatrix::identity(4), Vector{1, 2, 3, 4}, "", {}};
    for (int p : {1, 2, 3}) {
        const auto r = gs_scale_symmetric(s, p);
        EXPECT_EQ(to_dense(r.system.matrix).data, to_dense(s.matrix).data);
    }
}

TEST(GsScaleSymmetric, KeepsSymmetry)
{
    std::mt19937 rng(23);
    const auto a = testutil::random_matrix(rng, 30, 0.2, 1.0);
    const auto d = to_dense(a);
    std::vector<double> sym(30 * 30);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) sym[i * 30 + j] = d(i, j) + d(j, i);
    }
    LinearSystem s{CsrMatrix::from_dense(30, sym), Vector(30, 1.0), "", {}};
    const auto r = to_dense(gs_scale_symmetric(s, 2).system.matrix);
    for (std::size_t i = 0; i < 30; ++i) {
        for (std::size_t j = 0; j < 30; ++j) EXPECT_NEAR(r(i, j), r(j, i), 4e-16 * std::fabs(r(i, j)));
    }
}

TEST(GsScaleSymmetric, SolutionRecovered)
{
    std::mt19937 rng(29);
    LinearSystem s{testutil::random_matrix(rng, 20, 0.3, 1.5), testutil::random_vector(rng, 20), "", {}};
    const auto r = gs_scale_symmetric(s, 2);
    const auto y = testutil::dense_solve(r.system.matrix, r.system.rhs);
    EXPECT_LT(testutil::rel_diff(unscale_solution(y, r.scaling), testutil::dense_solve(s.matrix, s.rhs)),
              1e-10);
}

TEST(UnscaleSolution, Examples)
{
    EXPECT_EQ(unscale_solution(Vector{3, 4}, DiagScaling{2, {1, 1}}), (Vector{3, 4}));
    EXPECT_EQ(unscale_solution(Vector{3}, DiagScaling{2, {4}}), (Vector{6}));
    EXPECT_THROW(unscale_solution(Vector{3, 1}, DiagScaling{2, {4}}), DimensionError);
}

TEST(GsScale, EveryProblemHasUnitRows)
{
    for (const auto& s : {generate_p1(GridSpec::square(12)), generate_p2(GridSpec::square(12)),
                          generate_p3(GridSpec::square(12)), generate_p4(GridSpec::cube(6))}) {
        for (int p : {1, 2}) {
            const auto r = gs_scale(s, p);
            for (std::size_t i = 0; i < s.size(); ++i) {
                ASSERT_NEAR(row_norm(r.system.matrix, i, p), 1.0, 1e-12) << s.label;
            }
        }
    }
}
