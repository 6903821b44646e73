#ifndef LPC_SIGNIFICANCE_HPP
#define LPC_SIGNIFICANCE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpc/gene_scores.hpp"
#include "lpc/matrix_core.hpp"
#include "lpc/outcome.hpp"

/**
 * @file significance.hpp
 * @brief Permutation FDR, the split-sample FDR correction for LPC scores,
 * predictive advantage and the CaMP bias demonstration.
 *
 * Statistics are compared in absolute value throughout. Every stochastic
 * routine draws from per-task streams keyed by the task index, and every
 * reduction runs over tasks in index order.
 */

namespace lpc {

/**
 * Null scores, one row per permutation of the outcome. Class labels,
 * quantitative responses and (time, event) pairs are permuted; `X` is not.
 * Permutation `b` uses the stream `(seed, permutation, b)`.
 */
Matrix permutation_null(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0,
                        Index num_permutations, std::uint64_t seed, int num_threads = 1);

/** Same, with caller-supplied permutations (entry `i` of a row is the source index for sample `i`). */
Matrix permutation_null(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0,
                        const std::vector<std::vector<Index>>& permutations, int num_threads = 1);

/** Type-7 sample quantile of `values` at level `prob`. */
double quantile(std::vector<double> values, double prob);

/**
 * `min(1, #{j : |T_j| <= q} / (gamma * p))` where `q` is the `gamma`-quantile
 * of the pooled absolute null scores.
 */
double estimate_pi0(const Vector& T, const Matrix& null_scores, double gamma = 0.5);

struct FdrPoint {
    Index k = 0;
    /** Clipped to [0, 1]. */
    double fdr = 0;
    /** Before clipping. */
    double raw = 0;
};

struct FdrCurve {
    std::vector<FdrPoint> points;
    std::string statistic_kind;
    double pi0 = 1;
    Index n_permutations = 0;
    std::uint64_t seed = 0;
};

/** `1..min(p, 100)`. */
std::vector<Index> default_ks(Index num_features);

/**
 * For each k, with the threshold at the k-th largest `|T|`:
 * `pi0 * mean_b #{j : |null(b, j)| >= threshold} / k`.
 */
FdrCurve fdr_local_statistic(const Vector& T, const Matrix& null_scores, double pi0, const std::vector<Index>& ks);

/**
 * `-log10(m * p_j / q_j)` where `m` is the number of hypotheses and `q_j` is the
 * average rank of `p_j` (1 = smallest).
 */
ScoreVector camp_transform(const Vector& p_values);

/** Average ranks, ascending, 1-based. */
Vector average_ranks(const Vector& values);

struct AdvantageCurve {
    std::vector<double> alphas;
    std::vector<double> lpc_conditional_mean;
    std::vector<double> t_conditional_mean;
    std::vector<double> advantage;
    /** Number of features selected at each level. */
    std::vector<Index> selected;
};

/**
 * Mean test-set `|T*|` over the `ceil((1 - alpha) p)` features ranked highest
 * by training `|L|`, minus the same for training `|T|`. Both rankings break
 * ties by `|T|` (see `rank_features`), so a constant `L` gives zero advantage.
 * `L` uses eigenarrays of the training matrix.
 */
AdvantageCurve predictive_advantage(const ExpressionMatrix& x_train, const ExpressionMatrix& x_test,
                                    const Outcome& outcome_train, const Outcome& outcome_test,
                                    const ScoreSpec& spec, double lambda, const std::vector<double>& alphas);

struct FdrLpcOptions {
    Index n_permutations = 200;
    Index n_splits = 20;
    double split_fraction = 0.5;
    std::uint64_t seed = 0;
    /** Empty means `default_ks(p)`. */
    std::vector<Index> ks;
    int num_threads = 1;
    /** Rank by the training `T` in place of the LPC score. Diagnostic only. */
    bool conventional_as_lpc = false;
};

struct FdrLpcResult {
    FdrCurve t_curve;
    FdrCurve lpc_curve;
    /** Correction subtracted from the T estimate, per k. */
    std::vector<double> delta;
    /** Split-averaged `mean|T*|(top-k by |L|) - mean|T*|(top-k by |T|)`, per k. */
    std::vector<double> numerator;
    /** Split-averaged `mean|T*| - mean|T*|` under test-side permutation. */
    double denominator = 0;
    double test_mean_abs = 0;
    double test_null_mean_abs = 0;
    bool degenerate = false;
    std::vector<std::string> warnings;
};

/**
 * FDR estimate for the LPC ranking: the permutation estimate for T minus
 * `(1 - pi0) * numerator(k) / denominator`, with both terms averaged over
 * `n_splits` random train/test splits and the null test-side mean taken from
 * `ceil(B / n_splits)` permutations of each test outcome. A denominator below
 * 2% of the null mean is treated as signal-free and the correction set to 0.
 */
FdrLpcResult fdr_lpc(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec, double lambda,
                     const FdrLpcOptions& options);

struct ResampledDifference {
    std::vector<Index> ks;
    std::vector<double> mean;
    /** Absent with a single resample. */
    std::vector<std::optional<double>> std_error;
    Index n_resamples = 0;
    double fraction = 0;
};

/**
 * Repeats `fdr_lpc` on subsamples drawn without replacement (stratified for
 * class outcomes) and summarizes the clipped `FDR_T - FDR_LPC` per k.
 */
ResampledDifference resampled_fdr_difference(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                                             double lambda, double fraction, Index n_resamples,
                                             const FdrLpcOptions& options);

/** `#{false among the first k of order} / k` for each k. */
std::vector<double> true_fdr(const std::vector<Index>& order, const std::vector<std::uint8_t>& truth,
                             const std::vector<Index>& ks);

struct CampDemoReport {
    std::uint64_t seed = 0;
    Index replicates = 0;
    Index n_hypotheses = 0;
    Index n_nonnull = 0;
    Index called = 0;
    double pvalue_cutoff = 0;
    double pvalue_estimated_fdr = 0;
    double pvalue_true_fdr = 0;
    double camp_cutoff = 0;
    double camp_estimated_fdr = 0;
    double camp_true_fdr = 0;
};

/**
 * Uniform p-values with the first `n_nonnull` replaced by `nonnull_p`, the
 * `called_fraction` most significant called, and the FDR of that call
 * estimated from `replicates` all-uniform null draws, once thresholding the
 * p-values and once thresholding their CaMP transform.
 */
CampDemoReport camp_demo(std::uint64_t seed, Index replicates, Index n_hypotheses = 1000, Index n_nonnull = 50,
                         double nonnull_p = 1e-6, double called_fraction = 0.1);

}

#endif
