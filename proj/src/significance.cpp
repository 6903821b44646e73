#include "lpc/significance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lpc/error.hpp"
#include "lpc/lpc_engine.hpp"
#include "lpc/parallel.hpp"
#include "lpc/resampling.hpp"
#include "lpc/rng.hpp"

namespace lpc {

namespace {

constexpr double kDegenerateDenominator = 0.02;

void check_ks(const std::vector<Index>& ks, Index p) {
    if (ks.empty()) {
        throw DataError("no values of k requested");
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] < 1 || ks[i] > p) {
            throw DataError("k = " + std::to_string(ks[i]) + " is outside [1, " + std::to_string(p) + "]");
        }
        if (i > 0 && ks[i] <= ks[i - 1]) {
            throw DataError("values of k must be strictly increasing");
        }
    }
}

std::vector<double> sorted_abs(const Vector& values) {
    std::vector<double> out(values.size());
    for (Index j = 0; j < values.size(); ++j) {
        out[j] = std::abs(values[j]);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/** Number of entries `>= threshold` in an ascending vector. */
Index count_at_least(const std::vector<double>& ascending, double threshold) {
    auto it = std::lower_bound(ascending.begin(), ascending.end(), threshold);
    return static_cast<Index>(ascending.end() - it);
}

void assign_raw(FdrPoint& point, double raw) {
    point.raw = raw;
    point.fdr = std::clamp(raw, 0.0, 1.0);
}

}

Matrix permutation_null(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0,
                        const std::vector<std::vector<Index>>& permutations, int num_threads)
{
    validate_outcome(outcome, x.num_samples());
    if (permutations.empty()) {
        throw DataError("at least one permutation is required");
    }
    const auto n = static_cast<std::size_t>(x.num_samples());
    for (const auto& perm : permutations) {
        std::vector<Index> sorted(perm);
        std::sort(sorted.begin(), sorted.end());
        bool valid = sorted.size() == n;
        for (std::size_t i = 0; valid && i < n; ++i) {
            valid = sorted[i] == static_cast<Index>(i);
        }
        if (!valid) {
            throw DataError("permutation is not a rearrangement of 0.." + std::to_string(n - 1));
        }
    }
    Matrix null(static_cast<Index>(permutations.size()), x.num_features());
    parallel_for(permutations.size(), num_threads, [&](std::size_t b) {
        auto permuted = select_outcome(outcome, permutations[b]);
        null.row(static_cast<Index>(b)) = compute_scores(x, permuted, kind, s0).values.transpose();
    });
    return null;
}

Matrix permutation_null(const ExpressionMatrix& x, const Outcome& outcome, ScoreKind kind, double s0,
                        Index num_permutations, std::uint64_t seed, int num_threads)
{
    if (num_permutations < 1) {
        throw DataError("the number of permutations must be at least 1");
    }
    std::vector<std::vector<Index>> perms(static_cast<std::size_t>(num_permutations));
    for (std::size_t b = 0; b < perms.size(); ++b) {
        RandomStream rng(seed, stream_id(StreamTag::permutation, b));
        auto perm = rng.permutation(static_cast<std::size_t>(x.num_samples()));
        perms[b].assign(perm.begin(), perm.end());
    }
    return permutation_null(x, outcome, kind, s0, perms, num_threads);
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) {
        throw DataError("quantile of an empty set");
    }
    if (!(prob >= 0 && prob <= 1)) {
        throw DataError("quantile level must lie in [0, 1]");
    }
    std::sort(values.begin(), values.end());
    double h = (static_cast<double>(values.size()) - 1) * prob;
    auto lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double estimate_pi0(const Vector& T, const Matrix& null_scores, double gamma) {
    if (null_scores.size() == 0) {
        throw DataError("null score matrix is empty");
    }
    if (!(gamma > 0 && gamma < 1)) {
        throw DataError("gamma must lie in (0, 1)");
    }
    std::vector<double> pooled(static_cast<std::size_t>(null_scores.size()));
    for (Index i = 0; i < null_scores.size(); ++i) {
        pooled[static_cast<std::size_t>(i)] = std::abs(null_scores.data()[i]);
    }
    double q = quantile(std::move(pooled), gamma);
    Index below = 0;
    for (Index j = 0; j < T.size(); ++j) {
        below += std::abs(T[j]) <= q;
    }
    return std::min(1.0, static_cast<double>(below) / (gamma * static_cast<double>(T.size())));
}

std::vector<Index> default_ks(Index num_features) {
    std::vector<Index> ks(static_cast<std::size_t>(std::min<Index>(num_features, 100)));
    std::iota(ks.begin(), ks.end(), Index{1});
    return ks;
}

FdrCurve fdr_local_statistic(const Vector& T, const Matrix& null_scores, double pi0, const std::vector<Index>& ks) {
    const Index p = T.size();
    if (null_scores.rows() < 1 || null_scores.cols() != p) {
        throw DataError("null score matrix must have one column per feature and at least one row");
    }
    if (!(pi0 > 0 && pi0 <= 1)) {
        throw DataError("pi0 must lie in (0, 1]");
    }
    check_ks(ks, p);

    auto observed = sorted_abs(T);
    std::vector<std::vector<double>> nulls(static_cast<std::size_t>(null_scores.rows()));
    for (Index b = 0; b < null_scores.rows(); ++b) {
        nulls[static_cast<std::size_t>(b)] = sorted_abs(null_scores.row(b).transpose());
    }

    FdrCurve curve;
    curve.pi0 = pi0;
    curve.n_permutations = null_scores.rows();
    for (Index k : ks) {
        double threshold = observed[static_cast<std::size_t>(p - k)];
        double total = 0;
        for (const auto& row : nulls) {
            total += static_cast<double>(count_at_least(row, threshold));
        }
        FdrPoint point;
        point.k = k;
        assign_raw(point, pi0 * total / static_cast<double>(nulls.size()) / static_cast<double>(k));
        curve.points.push_back(point);
    }
    return curve;
}

Vector average_ranks(const Vector& values) {
    const Index m = values.size();
    std::vector<Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
    Vector ranks(m);
    Index start = 0;
    while (start < m) {
        Index end = start + 1;
        while (end < m && values[order[end]] == values[order[start]]) {
            ++end;
        }
        double rank = 0.5 * static_cast<double>(start + 1 + end);
        for (Index i = start; i < end; ++i) {
            ranks[order[i]] = rank;
        }
        start = end;
    }
    return ranks;
}

ScoreVector camp_transform(const Vector& p_values) {
    const Index m = p_values.size();
    if (m == 0) {
        throw DataError("no p-values supplied");
    }
    for (Index j = 0; j < m; ++j) {
        if (!(p_values[j] > 0 && p_values[j] <= 1)) {
            throw DataError("p-value " + std::to_string(j + 1) + " is outside (0, 1]");
        }
    }
    Vector ranks = average_ranks(p_values);
    ScoreVector out;
    out.kind = ScoreKind::external;
    out.label = "camp";
    out.values.resize(m);
    for (Index j = 0; j < m; ++j) {
        out.values[j] = -std::log10(static_cast<double>(m) * p_values[j] / ranks[j]);
    }
    return out;
}

AdvantageCurve predictive_advantage(const ExpressionMatrix& x_train, const ExpressionMatrix& x_test,
                                    const Outcome& outcome_train, const Outcome& outcome_test,
                                    const ScoreSpec& spec, double lambda, const std::vector<double>& alphas)
{
    if (x_train.feature_ids() != x_test.feature_ids()) {
        throw DataError("training and test matrices must list the same features in the same order");
    }
    for (double a : alphas) {
        if (!(a > 0 && a < 1)) {
            throw DataError("quantile levels must lie in (0, 1)");
        }
    }
    auto t_train = compute_scores(x_train, outcome_train, spec);
    auto t_test = compute_scores(x_test, outcome_test, spec);
    auto basis = eigenarrays_of(x_train);
    Vector L = lpc_path_for(x_train, outcome_train, spec, t_train, basis).statistic(lambda);

    const Index p = x_train.num_features();
    auto by_l = rank_features(L, t_train.values);
    auto by_t = rank_features(t_train.values, t_train.values);
    auto top_mean = [&](const std::vector<Index>& order, Index count) {
        double total = 0;
        for (Index k = 0; k < count; ++k) {
            total += std::abs(t_test.values[order[static_cast<std::size_t>(k)]]);
        }
        return total / static_cast<double>(count);
    };

    AdvantageCurve curve;
    for (double a : alphas) {
        // Top ceil((1 - alpha) p) features, ties in |L| broken by |T| as in the ranking.
        auto count = static_cast<Index>(std::ceil((1 - a) * static_cast<double>(p) - 1e-9));
        count = std::clamp<Index>(count, 1, p);
        curve.alphas.push_back(a);
        curve.selected.push_back(count);
        curve.lpc_conditional_mean.push_back(top_mean(by_l, count));
        curve.t_conditional_mean.push_back(top_mean(by_t, count));
        curve.advantage.push_back(curve.lpc_conditional_mean.back() - curve.t_conditional_mean.back());
    }
    return curve;
}

FdrLpcResult fdr_lpc(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec, double lambda,
                     const FdrLpcOptions& options)
{
    validate_outcome(outcome, x.num_samples());
    if (std::holds_alternative<MultiClass>(outcome)) {
        throw DataError("FDR estimation for the multi-class LPC score is not supported");
    }
    if (options.n_splits < 1) {
        throw DataError("n_splits must be at least 1");
    }
    const Index p = x.num_features();
    auto ks = options.ks.empty() ? default_ks(p) : options.ks;
    check_ks(ks, p);

    FdrLpcResult result;
    auto T = compute_scores(x, outcome, spec);
    Matrix null = permutation_null(x, outcome, T.kind, T.fudge, options.n_permutations, options.seed,
                                   options.num_threads);
    double pi0 = estimate_pi0(T.values, null);
    result.t_curve = fdr_local_statistic(T.values, null, pi0, ks);
    result.t_curve.statistic_kind = score_kind_name(T.kind);
    result.t_curve.seed = options.seed;

    const auto S = static_cast<std::size_t>(options.n_splits);
    const Index null_per_split = (options.n_permutations + options.n_splits - 1) / options.n_splits;
    Matrix numerators(static_cast<Index>(S), static_cast<Index>(ks.size()));
    Vector observed_means(static_cast<Index>(S)), null_means(static_cast<Index>(S));

    parallel_for(S, options.num_threads, [&](std::size_t s) {
        RandomStream rng(options.seed, stream_id(StreamTag::fdr_split, s));
        auto split = split_samples(outcome, options.split_fraction, rng);
        if (split.train.size() < 10 || split.test.size() < 10) {
            throw DataError("splitting " + std::to_string(x.num_samples()) +
                            " samples leaves fewer than 10 on one side");
        }
        auto x_train = x.select_samples(split.train);
        auto x_test = x.select_samples(split.test);
        auto y_train = select_outcome(outcome, split.train);
        auto y_test = select_outcome(outcome, split.test);

        auto t_train = compute_scores(x_train, y_train, spec);
        auto t_test = compute_scores(x_test, y_test, spec);
        Vector L = options.conventional_as_lpc
            ? t_train.values
            : lpc_path_for(x_train, y_train, spec, t_train, eigenarrays_of(x_train)).statistic(lambda);

        auto by_lpc = running_abs_means(t_test.values, rank_features(L, t_train.values));
        auto by_t = running_abs_means(t_test.values, rank_features(t_train.values, t_train.values));
        for (std::size_t i = 0; i < ks.size(); ++i) {
            auto k = static_cast<std::size_t>(ks[i] - 1);
            numerators(static_cast<Index>(s), static_cast<Index>(i)) = by_lpc[k] - by_t[k];
        }
        observed_means[static_cast<Index>(s)] = t_test.values.cwiseAbs().mean();

        double null_total = 0;
        for (Index b = 0; b < null_per_split; ++b) {
            RandomStream perm_rng(options.seed, stream_id(StreamTag::test_null, s * static_cast<std::size_t>(null_per_split) + static_cast<std::size_t>(b)));
            auto permuted = permute_outcome(y_test, perm_rng);
            null_total += compute_scores(x_test, permuted, t_test.kind, t_test.fudge).values.cwiseAbs().mean();
        }
        null_means[static_cast<Index>(s)] = null_total / static_cast<double>(null_per_split);
    });

    result.test_mean_abs = observed_means.mean();
    result.test_null_mean_abs = null_means.mean();
    result.denominator = result.test_mean_abs - result.test_null_mean_abs;
    result.degenerate = !(result.denominator > kDegenerateDenominator * result.test_null_mean_abs);
    if (result.degenerate) {
        result.warnings.push_back("test-side mean |T*| is within 2% of its permutation null; FDR correction set to 0");
    }

    result.lpc_curve = result.t_curve;
    result.lpc_curve.statistic_kind = "lpc";
    for (std::size_t i = 0; i < ks.size(); ++i) {
        double numerator = numerators.col(static_cast<Index>(i)).mean();
        double delta = result.degenerate ? 0.0 : (1 - pi0) * numerator / result.denominator;
        result.numerator.push_back(numerator);
        result.delta.push_back(delta);
        assign_raw(result.lpc_curve.points[i], result.t_curve.points[i].raw - delta);
    }
    return result;
}

ResampledDifference resampled_fdr_difference(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                                             double lambda, double fraction, Index n_resamples,
                                             const FdrLpcOptions& options)
{
    if (!(fraction > 0 && fraction < 1)) {
        throw DataError("resampling fraction must lie in (0, 1)");
    }
    if (n_resamples < 1) {
        throw DataError("n_resamples must be at least 1");
    }
    const auto R = static_cast<std::size_t>(n_resamples);
    auto ks = options.ks.empty() ? default_ks(x.num_features()) : options.ks;
    Matrix diffs(static_cast<Index>(R), static_cast<Index>(ks.size()));

    // Parallelism lives inside each fdr_lpc call; resamples run in order.
    for (std::size_t r = 0; r < R; ++r) {
        RandomStream rng(options.seed, stream_id(StreamTag::resample, r));
        auto keep = split_samples(outcome, fraction, rng).train;
        FdrLpcOptions inner = options;
        inner.ks = ks;
        inner.seed = derive_seed(options.seed, StreamTag::resample, r);
        auto fit = fdr_lpc(x.select_samples(keep), select_outcome(outcome, keep), spec, lambda, inner);
        for (std::size_t i = 0; i < ks.size(); ++i) {
            diffs(static_cast<Index>(r), static_cast<Index>(i)) = fit.t_curve.points[i].fdr - fit.lpc_curve.points[i].fdr;
        }
    }

    ResampledDifference out;
    out.ks = ks;
    out.n_resamples = n_resamples;
    out.fraction = fraction;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        auto column = diffs.col(static_cast<Index>(i));
        double mean = column.mean();
        out.mean.push_back(mean);
        if (R > 1) {
            double var = (column.array() - mean).square().sum() / static_cast<double>(R - 1);
            out.std_error.emplace_back(std::sqrt(var / static_cast<double>(R)));
        } else {
            out.std_error.emplace_back(std::nullopt);
        }
    }
    return out;
}

std::vector<double> true_fdr(const std::vector<Index>& order, const std::vector<std::uint8_t>& truth,
                             const std::vector<Index>& ks)
{
    if (order.size() != truth.size()) {
        throw DataError("ranking and truth vector differ in length");
    }
    check_ks(ks, static_cast<Index>(order.size()));
    std::vector<double> out;
    Index false_calls = 0;
    std::size_t pos = 0;
    for (Index k : ks) {
        for (; pos < static_cast<std::size_t>(k); ++pos) {
            false_calls += truth[static_cast<std::size_t>(order[pos])] == 0;
        }
        out.push_back(static_cast<double>(false_calls) / static_cast<double>(k));
    }
    return out;
}

CampDemoReport camp_demo(std::uint64_t seed, Index replicates, Index n_hypotheses, Index n_nonnull,
                         double nonnull_p, double called_fraction)
{
    if (replicates < 1) {
        throw DataError("replicates must be at least 1");
    }
    if (n_hypotheses < 2 || n_nonnull < 0 || n_nonnull >= n_hypotheses) {
        throw DataError("need 0 <= n_nonnull < n_hypotheses and at least 2 hypotheses");
    }
    if (!(nonnull_p > 0 && nonnull_p < 1) || !(called_fraction > 0 && called_fraction < 1)) {
        throw DataError("nonnull_p and called_fraction must lie in (0, 1)");
    }
    auto draw_uniform = [&](std::uint64_t index) {
        RandomStream rng(seed, stream_id(StreamTag::demo, index));
        Vector p(n_hypotheses);
        for (Index j = 0; j < n_hypotheses; ++j) {
            p[j] = rng.uniform();
        }
        return p;
    };

    CampDemoReport report;
    report.seed = seed;
    report.replicates = replicates;
    report.n_hypotheses = n_hypotheses;
    report.n_nonnull = n_nonnull;
    report.called = static_cast<Index>(std::llround(called_fraction * static_cast<double>(n_hypotheses)));
    report.called = std::clamp<Index>(report.called, 1, n_hypotheses);

    Vector observed = draw_uniform(0);
    observed.head(n_nonnull).setConstant(nonnull_p);

    // Both statistics are "larger is more significant" here: -p and CaMP.
    auto called_set = [&](const Vector& stat, double& cutoff) {
        std::vector<double> sorted(stat.data(), stat.data() + stat.size());
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        cutoff = sorted[static_cast<std::size_t>(report.called - 1)];
        return cutoff;
    };
    auto true_fraction_false = [&](const Vector& stat, double cutoff) {
        Index called = 0, false_calls = 0;
        for (Index j = 0; j < stat.size(); ++j) {
            if (stat[j] >= cutoff) {
                ++called;
                false_calls += j >= n_nonnull;
            }
        }
        return static_cast<double>(false_calls) / static_cast<double>(called);
    };

    Vector neg_p = -observed;
    Vector camp = camp_transform(observed).values;
    double p_cut = 0, camp_cut = 0;
    called_set(neg_p, p_cut);
    called_set(camp, camp_cut);
    report.pvalue_cutoff = -p_cut;
    report.camp_cutoff = camp_cut;
    report.pvalue_true_fdr = true_fraction_false(neg_p, p_cut);
    report.camp_true_fdr = true_fraction_false(camp, camp_cut);

    double p_total = 0, camp_total = 0;
    for (Index r = 0; r < replicates; ++r) {
        Vector null = draw_uniform(static_cast<std::uint64_t>(r) + 1);
        Vector null_camp = camp_transform(null).values;
        for (Index j = 0; j < n_hypotheses; ++j) {
            p_total += null[j] <= report.pvalue_cutoff;
            camp_total += null_camp[j] >= camp_cut;
        }
    }
    auto denom = static_cast<double>(replicates) * static_cast<double>(report.called);
    report.pvalue_estimated_fdr = p_total / denom;
    report.camp_estimated_fdr = camp_total / denom;
    return report;
}

}
