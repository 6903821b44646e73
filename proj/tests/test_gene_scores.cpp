#include <gtest/gtest.h>

#include <random>

#include "lpc/error.hpp"
#include "lpc/gene_scores.hpp"
#include "oracles.hpp"

using namespace lpc;

namespace {

std::vector<double> column(const Matrix& m, Index j) {
    return std::vector<double>(m.col(j).data(), m.col(j).data() + m.rows());
}

ExpressionMatrix random_matrix(Index n, Index p, std::uint64_t seed, double offset = 0) {
    std::mt19937_64 engine(seed);
    return ExpressionMatrix(Matrix(oracle::random_normal(n, p, engine).array() + offset));
}

std::vector<int> alternating_labels(Index n) {
    std::vector<int> labels(n);
    for (Index i = 0; i < n; ++i) labels[i] = 1 + static_cast<int>(i % 2);
    return labels;
}

}

TEST(TScore, MatchesDefinition) {
    auto x = random_matrix(11, 6, 1, 5.0);
    TwoClass y{{1, 1, 2, 1, 2, 2, 2, 1, 1, 2, 2}};
    for (double s0 : {0.0, 0.3}) {
        auto T = t_score_two_class(x, y, s0);
        EXPECT_EQ(T.kind, ScoreKind::t);
        EXPECT_EQ(T.fudge, s0);
        for (Index j = 0; j < 6; ++j) {
            EXPECT_NEAR(T.values[j], oracle::t_statistic(column(x.values(), j), y.labels, s0), 1e-12);
        }
    }
}

TEST(TScore, SignFollowsClassTwoMinusClassOne) {
    Matrix m(4, 1);
    m << 0, 0.1, 5, 5.2;
    auto T = t_score_two_class(ExpressionMatrix(m), TwoClass{{1, 1, 2, 2}}, 0);
    EXPECT_GT(T.values[0], 0);
}

TEST(TScore, ConstantFeature) {
    Matrix m(4, 2);
    m << 1, 3, 1, 4, 1, 8, 1, 9;
    TwoClass y{{1, 1, 2, 2}};
    EXPECT_THROW(t_score_two_class(ExpressionMatrix(m), y, 0), NumericalError);
    auto T = t_score_two_class(ExpressionMatrix(m), y, 0.5);
    EXPECT_EQ(T.values[0], 0);
}

TEST(QuantScore, MatchesFittedLine) {
    auto x = random_matrix(15, 5, 2, -3.0);
    std::mt19937_64 engine(20);
    Vector y = oracle::random_normal(15, 1, engine).col(0);
    std::vector<double> yv(y.data(), y.data() + 15);
    for (double s0 : {0.0, 1.5}) {
        auto T = quant_score(x, Quantitative{y}, s0);
        for (Index j = 0; j < 5; ++j) {
            EXPECT_NEAR(T.values[j], oracle::standardized_slope(column(x.values(), j), yv, s0), 1e-12);
        }
    }
}

TEST(QuantScore, NeedsThreeSamples) {
    EXPECT_THROW(quant_score(random_matrix(2, 3, 3), Quantitative{Vector::LinSpaced(2, 0, 1)}, 0), DataError);
}

TEST(SimplifiedScore, IsLiteralCrossProduct) {
    auto x = random_matrix(8, 4, 4, 2.0);
    Vector y = Vector::LinSpaced(8, -1, 3);
    auto T = simplified_score(x, Quantitative{y});
    Matrix expected = oracle::matmul(x.values().transpose(), y);
    EXPECT_LT((T.values - expected.col(0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CoxScore, MatchesRiskSetEnumerationWithTiesAndCensoring) {
    auto x = random_matrix(12, 5, 5);
    std::vector<double> time{5, 3, 3, 8, 1, 5, 5, 9, 2, 3, 7, 7};
    std::vector<int> event{1, 1, 0, 1, 1, 1, 0, 0, 1, 1, 1, 1};
    Survival y{Eigen::Map<Vector>(time.data(), 12), std::vector<std::uint8_t>(event.begin(), event.end())};
    for (double s0 : {0.0, 0.2}) {
        auto T = cox_score(x, y, s0);
        for (Index j = 0; j < 5; ++j) {
            EXPECT_NEAR(T.values[j], oracle::cox_statistic(column(x.values(), j), time, event, s0), 1e-12);
        }
    }
}

TEST(CoxScore, HighValuesDyingEarlyGivePositiveScore) {
    Matrix m(6, 1);
    m << 6, 5, 4, 3, 2, 1;
    Survival y{Vector::LinSpaced(6, 1, 6), std::vector<std::uint8_t>(6, 1)};
    EXPECT_GT(cox_score(ExpressionMatrix(m), y, 0).values[0], 0);
}

TEST(AnovaF, MatchesSumsOfSquares) {
    auto x = random_matrix(13, 4, 6);
    MultiClass y{{1, 2, 3, 1, 2, 3, 1, 2, 3, 1, 1, 2, 3}, 3};
    auto F = anova_f(x, y);
    for (Index j = 0; j < 4; ++j) {
        EXPECT_NEAR(F.values[j], oracle::f_statistic(column(x.values(), j), y.labels, 3), 1e-10);
    }
}

TEST(ClassContrasts, StandardizedMeanDifferences) {
    auto x = random_matrix(12, 3, 7, 1.0);
    MultiClass y{{1, 1, 1, 1, 2, 2, 2, 2, 3, 3, 3, 3}, 3};
    double s0 = 0.1;
    auto S = class_contrasts(x, y, s0);
    ASSERT_EQ(S.S.rows(), 3);
    for (Index j = 0; j < 3; ++j) {
        auto v = column(x.values(), j);
        double grand = oracle::mean(v), ssw = 0;
        std::vector<double> means(3);
        for (int k = 0; k < 3; ++k) {
            means[k] = oracle::mean(std::vector<double>(v.begin() + 4 * k, v.begin() + 4 * k + 4));
            for (int i = 0; i < 4; ++i) ssw += std::pow(v[4 * k + i] - means[k], 2);
        }
        double sd = std::sqrt(ssw / 9);
        EXPECT_NEAR(S.pooled_sd[j], sd, 1e-12);
        for (int k = 0; k < 3; ++k) {
            EXPECT_NEAR(S.S(k, j), (means[k] - grand) / (sd + s0), 1e-12);
        }
        // Contrasts weighted by class size sum to zero.
        EXPECT_NEAR(S.S.col(j).sum(), 0.0, 1e-12);
    }
}

TEST(FudgeConstant, Rules) {
    auto x = random_matrix(10, 9, 8);
    TwoClass y{alternating_labels(10)};
    EXPECT_EQ(fudge_constant(x, y, ScoreKind::t, {FudgeRule::zero, 0}), 0);
    EXPECT_EQ(fudge_constant(x, y, ScoreKind::t, {FudgeRule::fixed, 0.7}), 0.7);
    EXPECT_THROW(fudge_constant(x, {FudgeRule::fixed, -1}), DataError);
    EXPECT_THROW(fudge_constant(x, {FudgeRule::median_denominator, 0}), DataError);

    // median-denominator equals the median of the unfudged t standard errors.
    auto unfudged = t_score_two_class(x, y, 0);
    std::vector<double> se;
    auto m = center_features(x).values();
    for (Index j = 0; j < 9; ++j) {
        double diff = 0;
        for (Index i = 0; i < 10; ++i) diff += (y.labels[i] == 2 ? 1 : -1) * m(i, j) / 5.0;
        se.push_back(diff / unfudged.values[j]);
    }
    std::sort(se.begin(), se.end());
    EXPECT_NEAR(fudge_constant(x, y, ScoreKind::t, {}), se[4], 1e-12);

    std::vector<double> sds;
    for (Index j = 0; j < 9; ++j) sds.push_back(std::sqrt(m.col(j).squaredNorm() / 9));
    std::sort(sds.begin(), sds.end());
    EXPECT_NEAR(fudge_constant(x, {FudgeRule::median_sd, 0}), sds[4], 1e-12);
    EXPECT_EQ(fudge_constant(x, Quantitative{Vector::LinSpaced(10, 0, 1)}, ScoreKind::simplified, {}), 0);
}

TEST(ComputeScores, DispatchAndKindMismatch) {
    auto x = random_matrix(10, 4, 9);
    Outcome two = TwoClass{alternating_labels(10)};
    EXPECT_EQ(default_score_kind(two), ScoreKind::t);
    EXPECT_EQ(default_score_kind(Outcome{Quantitative{}}), ScoreKind::quant);
    EXPECT_EQ(default_score_kind(Outcome{Survival{}}), ScoreKind::cox);
    EXPECT_EQ(default_score_kind(Outcome{MultiClass{}}), ScoreKind::f);
    EXPECT_THROW(compute_scores(x, two, ScoreKind::quant, 0), DataError);

    auto spec_scores = compute_scores(x, two, ScoreSpec{ScoreKind::t, {}});
    double s0 = fudge_constant(x, two, ScoreKind::t, {});
    EXPECT_EQ(spec_scores.fudge, s0);
    EXPECT_LT((spec_scores.values - t_score_two_class(x, std::get<TwoClass>(two), s0).values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(ComputeScores, InvariantToFeatureShifts) {
    auto x = random_matrix(10, 4, 10);
    auto shifted = ExpressionMatrix(Matrix(x.values().array() + 1000.0));
    TwoClass y{alternating_labels(10)};
    EXPECT_LT((t_score_two_class(x, y, 0.1).values - t_score_two_class(shifted, y, 0.1).values).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Outcomes, ValidationErrors) {
    auto x = random_matrix(6, 2, 11);
    EXPECT_THROW(t_score_two_class(x, TwoClass{{1, 1, 1, 1, 1, 2}}, 0), DataError);
    EXPECT_THROW(t_score_two_class(x, TwoClass{{1, 2, 3, 1, 2, 1}}, 0), DataError);
    EXPECT_THROW(t_score_two_class(x, TwoClass{{1, 2}}, 0), DataError);
    Survival none{Vector::Ones(6), std::vector<std::uint8_t>(6, 0)};
    EXPECT_THROW(cox_score(x, none, 0), DataError);
    Survival negative{Vector::Constant(6, -1.0), std::vector<std::uint8_t>(6, 1)};
    EXPECT_THROW(cox_score(x, negative, 0), DataError);
}

TEST(ExternalScores, LengthAndFiniteness) {
    EXPECT_THROW(external_scores(Vector::Ones(3), 4, "x"), DataError);
    Vector bad = Vector::Ones(3);
    bad[1] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(external_scores(bad, 3, "x"), DataError);
    EXPECT_EQ(external_scores(Vector::Ones(3), 3, "x").label, "x");
}
