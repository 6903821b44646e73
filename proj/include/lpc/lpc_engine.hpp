#ifndef LPC_LPC_ENGINE_HPP
#define LPC_LPC_ENGINE_HPP

#include <optional>
#include <vector>

#include "lpc/gene_scores.hpp"
#include "lpc/matrix_core.hpp"

/**
 * @file lpc_engine.hpp
 * @brief Lassoed principal components: L1-penalized regression of feature
 * scores onto eigenarrays.
 *
 * The fit minimizes `||T - b0 - V b||^2 + lambda * sum_i |b_i|` by first
 * solving the unpenalized least squares problem on the design `[1, V]` and
 * then soft-thresholding the slopes at `lambda / 2`. The intercept is never
 * thresholded. This equals the exact lasso solution when every eigenarray is
 * orthogonal to the all-ones vector; otherwise it is the thresholded joint
 * OLS solution.
 */

namespace lpc {

struct OlsFit {
    double intercept = 0;
    Vector coefs;
};

/**
 * Least squares fit of `T` on `[1, V]` via the `(r+1)`-dimensional normal
 * equations. Throws `NumericalError` if the all-ones vector lies in the span
 * of `V`, naming the eigenarray most aligned with it.
 */
OlsFit ols_on_eigenarrays(const Vector& T, const EigenBasis& basis);

/** `sign(b) * max(|b| - lambda / 2, 0)` elementwise. */
Vector soft_threshold(const Vector& coefs, double lambda);

struct LpcFit {
    double lambda = 0;
    double intercept = 0;
    Vector ols_coefs;
    Vector shrunk_coefs;
    /** `intercept + V * shrunk_coefs`; these are the LPC scores. */
    Vector fitted;
    /** Eigenarray indices (0-based) with nonzero shrunk coefficients. */
    std::vector<Index> active_set;
};

/** Threshold an existing OLS fit. */
LpcFit shrink_fit(const OlsFit& ols, const EigenBasis& basis, double lambda);

LpcFit lpc_scores(const ScoreVector& T, const EigenBasis& basis, double lambda);

struct MultiClassLpc {
    /** `sum_k fitted_k(j)^2` per feature. */
    Vector score;
    std::vector<LpcFit> fits;
    /** For two classes, the signed fitted contrast of class 1. */
    std::optional<Vector> signed_two_class;
};

/** Fit every contrast row with the same lambda and combine. */
MultiClassLpc lpc_multiclass(const ContrastMatrix& contrasts, const EigenBasis& basis, double lambda);

/**
 * Fitted values of the unpenalized regression of `T` on `[1, v_1..v_count]`,
 * i.e. projection onto the leading eigenarrays without any shrinkage.
 */
Vector leading_projection(const Vector& T, const EigenBasis& basis, Index count);

/**
 * Feature indices ordered by decreasing `|key|`, ties broken by decreasing
 * `|tiebreak|` and then by increasing index.
 */
std::vector<Index> rank_features(const Vector& key, const Vector& tiebreak);

/** 1-based rank of every feature under `order`. */
std::vector<Index> ranks_from_order(const std::vector<Index>& order);

/**
 * @brief LPC statistic over a range of lambda values.
 *
 * Holds the OLS coefficients of one score vector (or of every multi-class
 * contrast) so that refitting at a new lambda only costs the thresholding
 * and one matrix-vector product per contrast.
 */
class LpcPath {
public:
    LpcPath(const Vector& scores, const EigenBasis& basis);
    LpcPath(const ContrastMatrix& contrasts, const EigenBasis& basis);

    /** LPC ranking statistic at `lambda`: fitted values, or the multi-class sum of squares. */
    Vector statistic(double lambda) const;

    /** Largest `|OLS slope|` across all fits. Lambda at twice this shrinks everything. */
    double max_abs_coef() const;

    bool multiclass() const { return multiclass_; }

private:
    Matrix V_;
    std::vector<OlsFit> fits_;
    bool multiclass_ = false;
};

}

#endif
