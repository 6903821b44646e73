#include "lpc/resampling.hpp"

#include <algorithm>
#include <cmath>

#include "lpc/error.hpp"

namespace lpc {

namespace {

template<class... Ts>
struct overloaded : Ts... { using Ts::operator()...; };

Index clamp_count(double fraction, Index size, Index floor_per_side) {
    auto wanted = static_cast<Index>(std::llround(fraction * static_cast<double>(size)));
    return std::clamp(wanted, floor_per_side, size - floor_per_side);
}

SampleSplit stratified(const std::vector<int>& labels, int num_classes, double fraction, RandomStream& rng) {
    std::vector<std::vector<Index>> members(num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        members[labels[i] - 1].push_back(static_cast<Index>(i));
    }
    SampleSplit split;
    for (int k = 0; k < num_classes; ++k) {
        auto& group = members[k];
        auto size = static_cast<Index>(group.size());
        if (size < 4) {
            throw DataError("class " + std::to_string(k + 1) + " has " + std::to_string(size) +
                            " members; splitting needs at least 4 so both sides keep 2");
        }
        rng.shuffle(std::span<Index>(group));
        Index take = clamp_count(fraction, size, 2);
        split.train.insert(split.train.end(), group.begin(), group.begin() + take);
        split.test.insert(split.test.end(), group.begin() + take, group.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

SampleSplit unstratified(Index n, double fraction, Index floor_per_side, RandomStream& rng) {
    if (n < 2 * floor_per_side) {
        throw DataError("cannot split " + std::to_string(n) + " samples with at least " + std::to_string(floor_per_side) + " per side");
    }
    auto order = rng.permutation(static_cast<std::size_t>(n));
    Index take = clamp_count(fraction, n, floor_per_side);
    SampleSplit split;
    split.train.assign(order.begin(), order.begin() + take);
    split.test.assign(order.begin() + take, order.end());
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

}

SampleSplit split_samples(const Outcome& outcome, double train_fraction, RandomStream& rng, int max_retries) {
    if (!(train_fraction > 0 && train_fraction < 1)) {
        throw DataError("train fraction must lie in (0, 1)");
    }
    return std::visit(overloaded{
        [&](const Quantitative& o) { return unstratified(o.y.size(), train_fraction, 3, rng); },
        [&](const TwoClass& o) { return stratified(o.labels, 2, train_fraction, rng); },
        [&](const MultiClass& o) { return stratified(o.labels, o.num_classes, train_fraction, rng); },
        [&](const Survival& o) {
            for (int attempt = 0; attempt <= max_retries; ++attempt) {
                auto split = unstratified(o.time.size(), train_fraction, 2, rng);
                auto has_event = [&](const std::vector<Index>& side) {
                    return std::any_of(side.begin(), side.end(), [&](Index i) { return o.event[i] == 1; });
                };
                if (has_event(split.train) && has_event(split.test)) {
                    return split;
                }
            }
            throw DataError("could not draw a survival split with events on both sides after " +
                            std::to_string(max_retries) + " retries");
        },
    }, outcome);
}

Outcome permute_outcome(const Outcome& outcome, RandomStream& rng) {
    auto perm = rng.permutation(static_cast<std::size_t>(outcome_size(outcome)));
    std::vector<Index> indices(perm.begin(), perm.end());
    return select_outcome(outcome, indices);
}

EigenBasis eigenarrays_of(const ExpressionMatrix& x) {
    return thin_svd(center_features(x));
}

LpcPath lpc_path_for(const ExpressionMatrix& x, const Outcome& outcome, const ScoreSpec& spec,
                     const ScoreVector& T, const EigenBasis& basis)
{
    if (auto mc = std::get_if<MultiClass>(&outcome)) {
        double s0 = fudge_constant(x, outcome, ScoreKind::f, spec.fudge);
        return LpcPath(class_contrasts(x, *mc, s0), basis);
    }
    return LpcPath(T.values, basis);
}

std::vector<double> running_abs_means(const Vector& values, const std::vector<Index>& order) {
    std::vector<double> out(order.size());
    double total = 0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        total += std::abs(values[order[k]]);
        out[k] = total / static_cast<double>(k + 1);
    }
    return out;
}

}
