#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "lpc/error.hpp"
#include "lpc/matrix_core.hpp"
#include "oracles.hpp"

using namespace lpc;

TEST(ExpressionMatrix, DefaultIds) {
    ExpressionMatrix x(Matrix::Zero(3, 2));
    EXPECT_EQ(x.sample_ids(), (std::vector<std::string>{"s1", "s2", "s3"}));
    EXPECT_EQ(x.feature_ids(), (std::vector<std::string>{"f1", "f2"}));
}

TEST(ExpressionMatrix, RejectsNonFiniteWithLocation) {
    Matrix m = Matrix::Zero(3, 2);
    m(1, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        ExpressionMatrix x(m, {"a", "b", "c"}, {"g1", "g2"});
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        std::string msg = e.what();
        EXPECT_NE(msg.find("'b'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("'g2'"), std::string::npos) << msg;
    }
}

TEST(ExpressionMatrix, RejectsBadShapesAndIds) {
    EXPECT_THROW(ExpressionMatrix(Matrix::Zero(1, 3)), DataError);
    EXPECT_THROW(ExpressionMatrix(Matrix::Zero(2, 0)), DataError);
    EXPECT_THROW(ExpressionMatrix(Matrix::Zero(2, 2), {"a"}, {"f", "g"}), DataError);
    EXPECT_THROW(ExpressionMatrix(Matrix::Zero(2, 2), {"a", "b"}, {"f", "f"}), DataError);
    EXPECT_THROW(ExpressionMatrix(Matrix::Zero(2, 2), {"a", "a"}, {"f", "g"}), DataError);
}

TEST(ExpressionMatrix, SelectSamplesKeepsIds) {
    Matrix m(3, 2);
    m << 1, 2, 3, 4, 5, 6;
    ExpressionMatrix x(m, {"a", "b", "c"}, {"f", "g"});
    std::vector<Index> rows{2, 0};
    auto sub = x.select_samples(rows);
    EXPECT_EQ(sub.sample_ids(), (std::vector<std::string>{"c", "a"}));
    EXPECT_EQ(sub.values()(0, 1), 6);
    EXPECT_EQ(sub.values()(1, 0), 1);
    std::vector<Index> bad{5};
    EXPECT_THROW(x.select_samples(bad), DataError);
}

TEST(CenterFeatures, ColumnMeansVanish) {
    std::mt19937_64 engine(1);
    Matrix m = oracle::random_normal(10, 7, engine).array() + 100.0;
    auto c = center_features(ExpressionMatrix(m));
    for (Index j = 0; j < 7; ++j) {
        EXPECT_NEAR(c.values().col(j).sum(), 0.0, 1e-11);
        EXPECT_NEAR(c.values()(3, j), m(3, j) - m.col(j).mean(), 1e-12);
    }
}

TEST(ThinSvd, ReconstructsAndIsOrthonormal) {
    std::mt19937_64 engine(2);
    Matrix m = oracle::random_normal(12, 30, engine);
    auto basis = thin_svd(m);
    ASSERT_EQ(basis.rank(), 12);
    EXPECT_LT((oracle::matmul(basis.U * basis.d.asDiagonal(), basis.V.transpose()) - m).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((basis.V.transpose() * basis.V - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LT((basis.U.transpose() * basis.U - Matrix::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-10);
    for (Index i = 1; i < basis.rank(); ++i) {
        EXPECT_GE(basis.d[i - 1], basis.d[i]);
    }
    EXPECT_LT((reconstruct(basis) - m).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ThinSvd, SignConventionLargestEntryPositive) {
    std::mt19937_64 engine(3);
    Matrix m = oracle::random_normal(8, 20, engine);
    auto a = thin_svd(m);
    auto b = thin_svd(Matrix(-m));
    for (Index i = 0; i < a.rank(); ++i) {
        Index where;
        a.V.col(i).cwiseAbs().maxCoeff(&where);
        EXPECT_GT(a.V(where, i), 0);
        // Negating X flips U, not V.
        EXPECT_LT((a.V.col(i) - b.V.col(i)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(ThinSvd, CenteredDataDropsTheNullDirection) {
    std::mt19937_64 engine(4);
    Matrix m = oracle::column_centered(oracle::random_normal(10, 40, engine));
    auto basis = thin_svd(m);
    EXPECT_EQ(basis.rank(), 9);
    // Eigenarrays span the row space of the centered matrix.
    Vector proj = basis.V * (basis.V.transpose() * m.row(0).transpose());
    EXPECT_LT((proj - m.row(0).transpose()).norm(), 1e-10);
}

TEST(ThinSvd, ZeroMatrixAndBadTolerance) {
    EXPECT_THROW(thin_svd(Matrix::Zero(3, 3)), NumericalError);
    EXPECT_THROW(thin_svd(Matrix::Identity(3, 3), 0.0), DataError);
    EXPECT_THROW(thin_svd(Matrix::Identity(3, 3), 1.0), DataError);
}

TEST(ThinSvd, RankOneMatrix) {
    Vector u = Vector::LinSpaced(5, 1, 5), v = Vector::LinSpaced(4, -1, 2);
    auto basis = thin_svd(Matrix(u * v.transpose()));
    ASSERT_EQ(basis.rank(), 1);
    EXPECT_NEAR(basis.d[0], u.norm() * v.norm(), 1e-10);
}
