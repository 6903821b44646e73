#ifndef LPC_RESAMPLING_HPP
#define LPC_RESAMPLING_HPP

#include <vector>

#include "lpc/gene_scores.hpp"
#include "lpc/lpc_engine.hpp"
#include "lpc/outcome.hpp"
#include "lpc/rng.hpp"

/**
 * @file resampling.hpp
 * @brief Train/test splits, outcome permutations and the per-subset
 * scoring shared by tuning, FDR estimation and predictive advantage.
 */

namespace lpc {

/** Index sets, each sorted ascending. */
struct SampleSplit {
    std::vector<Index> train;
    std::vector<Index> test;
};

/**
 * Random split with roughly `train_fraction` of the samples in training.
 *
 * Class outcomes are stratified: each class contributes
 * `round(train_fraction * size)` members to training, clamped so both sides
 * keep at least 2 (classes of fewer than 4 members cannot be split).
 * Quantitative outcomes keep at least 3 samples per side. Survival splits
 * are redrawn, up to `max_retries` times, until both sides have an event.
 */
SampleSplit split_samples(const Outcome& outcome, double train_fraction, RandomStream& rng, int max_retries = 100);

/** Outcome with entries reordered by a uniformly random permutation. */
Outcome permute_outcome(const Outcome& outcome, RandomStream& rng);

/** Eigenarrays of the column-centered matrix. */
EigenBasis eigenarrays_of(const ExpressionMatrix& x);

/**
 * LPC path for this data. Multi-class outcomes go through class contrasts
 * (with the fudge constant resolved from `spec`), everything else through
 * the score vector `T`.
 */
LpcPath lpc_path_for(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                     const ScoreVector& T, const EigenBasis& basis);

/** Mean of `|values[j]|` over the first `k` entries of `order`, for every k in `1..order.size()`. */
std::vector<double> running_abs_means(const Vector& values, const std::vector<Index>& order);

}

#endif
