#include "lpc/lambda_tuning.hpp"

#include <algorithm>
#include <cmath>

#include "lpc/error.hpp"
#include "lpc/lpc_engine.hpp"
#include "lpc/parallel.hpp"
#include "lpc/resampling.hpp"
#include "lpc/rng.hpp"

namespace lpc {

std::vector<double> default_lambda_grid(double max_abs_coef) {
    std::vector<double> grid{0.0};
    if (!(max_abs_coef > 0) || !std::isfinite(max_abs_coef)) {
        return grid;
    }
    constexpr int points = 20;
    const double top = 2 * max_abs_coef;
    const double bottom = top / 1000;
    const double step = std::log(top / bottom) / (points - 1);
    for (int i = 0; i < points; ++i) {
        grid.push_back(i == points - 1 ? top : bottom * std::exp(step * i));
    }
    return grid;
}

Index default_top_m(Index num_features) {
    return std::min<Index>(50, (num_features + 3) / 4);
}

TuningReport select_lambda(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                           const TuningOptions& options)
{
    validate_outcome(outcome, x.num_samples());
    if (options.n_repeats < 1) {
        throw DataError("n_repeats must be at least 1");
    }
    const Index p = x.num_features();
    TuningReport report;
    report.n_repeats = options.n_repeats;
    report.split_fraction = options.split_fraction;
    report.seed = options.seed;
    report.top_m = options.top_m == 0 ? default_top_m(p) : options.top_m;
    if (report.top_m < 1 || report.top_m > p) {
        throw DataError("top_m must lie in [1, " + std::to_string(p) + "]");
    }

    const EigenBasis basis = eigenarrays_of(x);
    report.grid = options.grid;
    if (report.grid.empty()) {
        auto full = compute_scores(x, outcome, spec);
        report.grid = default_lambda_grid(lpc_path_for(x, outcome, spec, full, basis).max_abs_coef());
    } else {
        for (double lambda : report.grid) {
            if (!(lambda >= 0) || !std::isfinite(lambda)) {
                throw DataError("lambda grid values must be finite and non-negative");
            }
        }
        std::sort(report.grid.begin(), report.grid.end());
        report.grid.erase(std::unique(report.grid.begin(), report.grid.end()), report.grid.end());
    }

    const std::size_t G = report.grid.size();
    const auto R = static_cast<std::size_t>(options.n_repeats);
    Matrix criterion(static_cast<Index>(R), static_cast<Index>(G));

    parallel_for(R, options.num_threads, [&](std::size_t r) {
        RandomStream rng(options.seed, stream_id(StreamTag::tuning_split, r));
        auto split = split_samples(outcome, options.split_fraction, rng);
        auto x_train = x.select_samples(split.train);
        auto x_test = x.select_samples(split.test);
        auto y_train = select_outcome(outcome, split.train);
        auto y_test = select_outcome(outcome, split.test);

        auto t_train = compute_scores(x_train, y_train, spec);
        auto t_test = compute_scores(x_test, y_test, spec);
        auto path = lpc_path_for(x_train, y_train, spec, t_train, basis);

        for (std::size_t g = 0; g < G; ++g) {
            auto order = rank_features(path.statistic(report.grid[g]), t_train.values);
            // Sum in index order so that identical top sets give identical criteria.
            std::vector<Index> top(order.begin(), order.begin() + report.top_m);
            std::sort(top.begin(), top.end());
            double total = 0;
            for (Index j : top) {
                total += std::abs(t_test.values[j]);
            }
            criterion(static_cast<Index>(r), static_cast<Index>(g)) = total / static_cast<double>(report.top_m);
        }
    });

    report.mean_test_score.resize(G);
    report.std_error.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
        auto column = criterion.col(static_cast<Index>(g));
        double mean = column.mean();
        report.mean_test_score[g] = mean;
        if (R > 1) {
            double ss = (column.array() - mean).square().sum();
            report.std_error[g] = std::sqrt(ss / static_cast<double>(R - 1) / static_cast<double>(R));
        }
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < G; ++g) {
        if (report.mean_test_score[g] > report.mean_test_score[best]) {
            best = g;
        }
    }
    report.chosen_lambda = report.grid[best];
    return report;
}

}
