#ifndef LPC_GENE_SCORES_HPP
#define LPC_GENE_SCORES_HPP

#include <string>

#include "lpc/matrix_core.hpp"
#include "lpc/outcome.hpp"

/**
 * @file gene_scores.hpp
 * @brief Conventional per-feature statistics for each outcome type.
 *
 * All ratio statistics take a fudge constant `s0 >= 0` that is added to the
 * denominator. With `s0 = 0` a zero denominator is an error rather than an
 * infinity. Inputs need not be centered; every routine centers internally
 * except `simplified_score()`, which is the literal `X^T y`.
 */

namespace lpc {

enum class ScoreKind { t, quant, cox, f, external, simplified };

std::string score_kind_name(ScoreKind kind);

/** Inverse of `score_kind_name()`; throws `DataError` on unknown names. */
ScoreKind parse_score_kind(const std::string& name);

struct ScoreVector {
    Vector values;
    ScoreKind kind = ScoreKind::external;
    double fudge = 0;
    std::string label;
};

enum class FudgeRule {
    /** `s0 = 0`. */
    zero,
    /** Median over features of the sample standard deviation. */
    median_sd,
    /** Median over features of the chosen statistic's own denominator. */
    median_denominator,
    /** A user-supplied value. */
    fixed,
};

struct FudgePolicy {
    FudgeRule rule = FudgeRule::median_denominator;
    double value = 0;
};

std::string fudge_rule_name(FudgeRule rule);
FudgeRule parse_fudge_rule(const std::string& name);

/**
 * Fudge constant that does not need the outcome. `median_denominator` is
 * rejected here because the denominator depends on the outcome; use the
 * overload below.
 */
double fudge_constant(const ExpressionMatrix& x, const FudgePolicy& policy);

/**
 * Fudge constant for statistic `kind` on this outcome. For `f` (which takes
 * no constant itself) the median-denominator rule returns the median pooled
 * standard deviation used by `class_contrasts()`. `simplified` and
 * `external` always get 0.
 */
double fudge_constant(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, const FudgePolicy& policy);

/**
 * Pooled-variance two-sample t statistic, class 2 minus class 1:
 * `(mean2 - mean1) / (se + s0)`.
 */
ScoreVector t_score_two_class(const ExpressionMatrix& x, const TwoClass& outcome, double s0);

/**
 * Standardized slope of the univariate regression of `y` on each feature,
 * `X_j^T y / (sigma_j * ||X_j|| + s0)`, with `sigma_j` the residual standard
 * deviation on `n - 2` degrees of freedom. Needs `n >= 3`.
 */
ScoreVector quant_score(const ExpressionMatrix& x, const Quantitative& outcome, double s0);

/** `X^T y` exactly as given. */
ScoreVector simplified_score(const ExpressionMatrix& x, const Quantitative& outcome);

/**
 * Univariate Cox score statistic at zero, `U_j(0) / (sqrt(I_j(0)) + s0)`,
 * with Breslow handling of tied event times.
 */
ScoreVector cox_score(const ExpressionMatrix& x, const Survival& outcome, double s0);

/** One-way ANOVA F statistic. No fudge constant. */
ScoreVector anova_f(const ExpressionMatrix& x, const MultiClass& outcome);

/**
 * @brief Standardized class-centroid contrasts for multi-class LPC.
 *
 * `S(k, j) = (mean of feature j in class k - overall mean) / (pooled_sd[j] + fudge)`
 * where `pooled_sd` is the within-class standard deviation on `n - K`
 * degrees of freedom.
 */
struct ContrastMatrix {
    Matrix S;
    Vector pooled_sd;
    double fudge = 0;
};

ContrastMatrix class_contrasts(const ExpressionMatrix& x, const MultiClass& outcome, double s0);

/** Wrap scores computed elsewhere. Throws on length mismatch or non-finite values. */
ScoreVector external_scores(const Vector& values, Index num_features, std::string label);

/** `t`, `quant`, `cox` or `f` according to the outcome type. */
ScoreKind default_score_kind(const Outcome& outcome);

struct ScoreSpec {
    ScoreKind kind = ScoreKind::t;
    FudgePolicy fudge;
};

/** Dispatch on kind with an explicit fudge constant. */
ScoreVector compute_scores(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0);

/** Dispatch on kind, resolving the fudge constant from the policy on this data. */
ScoreVector compute_scores(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec);

}

#endif
