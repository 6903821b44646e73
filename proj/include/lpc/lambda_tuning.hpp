#ifndef LPC_LAMBDA_TUNING_HPP
#define LPC_LAMBDA_TUNING_HPP

#include <cstdint>
#include <vector>

#include "lpc/gene_scores.hpp"
#include "lpc/matrix_core.hpp"
#include "lpc/outcome.hpp"

/**
 * @file lambda_tuning.hpp
 * @brief Choice of the shrinkage parameter by repeated train/test splits.
 *
 * Eigenarrays come from the full data. Each repeat scores the training
 * samples, fits the LPC path onto the full-data eigenarrays, and records the
 * mean `|T_test|` of the `top_m` features ranked by the training LPC score.
 * The lambda with the highest repeat-averaged criterion wins; exact ties go
 * to the smallest lambda.
 */

namespace lpc {

struct TuningOptions {
    /** Empty means `default_lambda_grid()` on the full-data fit. */
    std::vector<double> grid;
    int n_repeats = 10;
    /** Zero means `default_top_m(p)`. */
    Index top_m = 0;
    double split_fraction = 2.0 / 3.0;
    std::uint64_t seed = 0;
    int num_threads = 1;
};

struct TuningReport {
    std::vector<double> grid;
    std::vector<double> mean_test_score;
    /** Standard error of the repeat-averaged criterion; zero with a single repeat. */
    std::vector<double> std_error;
    double chosen_lambda = 0;
    int n_repeats = 0;
    Index top_m = 0;
    double split_fraction = 0;
    std::uint64_t seed = 0;
};

/** `0` followed by 20 geometric points from `2 * max_abs_coef / 1000` to `2 * max_abs_coef`. */
std::vector<double> default_lambda_grid(double max_abs_coef);

/** `min(50, ceil(p / 4))`. */
Index default_top_m(Index num_features);

TuningReport select_lambda(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                           const TuningOptions& options);

}

#endif
