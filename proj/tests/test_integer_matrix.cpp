#include <gtest/gtest.h>

#include <random>

#include "tdual/integer_matrix.hpp"

using namespace tdual;
using namespace tdual::algebra;

namespace {

IntMatrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c, int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    IntMatrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
    return m;
}

void expect_valid_smith(const IntMatrix& M, const SmithForm& s) {
    EXPECT_EQ(s.U * M * s.V, s.D);
    EXPECT_EQ(s.U * s.U_inv, IntMatrix::identity(M.rows()));
    EXPECT_EQ(s.V * s.V_inv, IntMatrix::identity(M.cols()));
    for (std::size_t i = 0; i < s.D.rows(); ++i)
        for (std::size_t j = 0; j < s.D.cols(); ++j)
            if (i != j) EXPECT_EQ(s.D(i, j), 0);
    for (std::size_t i = 0; i < s.diagonal.size(); ++i) {
        EXPECT_GE(s.diagonal[i], 0);
        if (i < s.rank) EXPECT_GT(s.diagonal[i], 0);
        else EXPECT_EQ(s.diagonal[i], 0);
        if (i + 1 < s.rank) EXPECT_EQ(s.diagonal[i + 1] % s.diagonal[i], 0);
    }
}

}  // namespace

TEST(Smith, HandExample) {
    IntMatrix M(2, 2, {2, 4, 6, 8});
    SmithForm s = smith_normal_form(M);
    EXPECT_EQ(s.diagonal, (IntVector{2, 4}));
    expect_valid_smith(M, s);
}

TEST(Smith, ZeroAndIdentity) {
    SmithForm z = smith_normal_form(IntMatrix(3, 2));
    EXPECT_EQ(z.rank, 0u);
    EXPECT_EQ(z.diagonal, (IntVector{0, 0}));
    SmithForm id = smith_normal_form(IntMatrix::identity(3));
    EXPECT_EQ(id.diagonal, (IntVector{1, 1, 1}));
}

TEST(Smith, NeedsDivisibilityFix) {
    // diag(2, 3) is already diagonal but 2 does not divide 3: SNF is diag(1, 6)
    IntMatrix M(2, 2, {2, 0, 0, 3});
    SmithForm s = smith_normal_form(M);
    EXPECT_EQ(s.diagonal, (IntVector{1, 6}));
    expect_valid_smith(M, s);
}

TEST(Smith, LargeEntriesStayExact) {
    IntMatrix M(2, 2);
    M(0, 0) = BigInt("123456789012345678901234567890");
    M(0, 1) = BigInt("987654321098765432109876543210");
    M(1, 0) = 7;
    M(1, 1) = 11;
    expect_valid_smith(M, smith_normal_form(M));
}

class SmithProperty : public ::testing::TestWithParam<int> {};

TEST_P(SmithProperty, RandomShapes) {
    std::mt19937_64 rng(GetParam());
    std::uniform_int_distribution<int> dim(0, 6);
    IntMatrix M = random_matrix(rng, dim(rng), dim(rng), -5, 5);
    SmithForm s = smith_normal_form(M);
    expect_valid_smith(M, s);

    IntMatrix K = kernel_basis(M);
    EXPECT_TRUE((M * K).is_zero());
    EXPECT_EQ(K.cols(), M.cols() - s.rank);

    // solve recovers a consistent right-hand side
    IntMatrix x = random_matrix(rng, M.cols(), 1, -3, 3);
    IntVector b = M * x.column(0);
    auto sol = solve(M, b);
    ASSERT_TRUE(sol.has_value());
    EXPECT_EQ(M * *sol, b);
}

TEST_P(SmithProperty, LowRankProducts) {
    std::mt19937_64 rng(GetParam() + 500);
    IntMatrix A = random_matrix(rng, 5, 2, -3, 3), B = random_matrix(rng, 2, 6, -3, 3);
    IntMatrix M = A * B;
    SmithForm s = smith_normal_form(M);
    expect_valid_smith(M, s);
    EXPECT_LE(s.rank, 2u);
}

INSTANTIATE_TEST_SUITE_P(Seeds, SmithProperty, ::testing::Range(0, 60));

TEST(Solve, Unsolvable) {
    IntMatrix A(1, 1, {2});
    EXPECT_FALSE(solve(A, IntVector{1}).has_value());
    EXPECT_EQ(*solve(A, IntVector{4}), IntVector{2});
    EXPECT_FALSE(solve(IntMatrix(2, 0), IntVector{0, 1}).has_value());
}

TEST(Lattice, Containment) {
    IntMatrix L(2, 2, {2, 0, 0, 3});
    EXPECT_TRUE(lattice_contains(L, IntMatrix(2, 1, {4, 9})));
    EXPECT_FALSE(lattice_contains(L, IntMatrix(2, 1, {1, 0})));
    EXPECT_TRUE(lattice_equal(IntMatrix(2, 2, {1, 1, 0, 1}), IntMatrix::identity(2)));
    EXPECT_FALSE(lattice_equal(IntMatrix(2, 1, {1, 0}), IntMatrix::identity(2)));
}
