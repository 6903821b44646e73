#include "lpc/sim_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "lpc/error.hpp"
#include "lpc/rng.hpp"

namespace lpc {

namespace {

constexpr Index kSimSamples = 40;
constexpr Index kSimFeatures = 1000;
constexpr Index kSimSignal = 50;

enum GeneratorCode : std::uint64_t {
    code_sim1 = 1,
    code_sim2 = 2,
    code_sim3 = 3,
    code_latent = 4,
    code_confounded = 5,
    code_isolated = 6,
};

RandomStream generator_stream(std::uint64_t seed, GeneratorCode code) {
    return RandomStream(seed, stream_id(StreamTag::simulation, code));
}

std::vector<std::uint8_t> leading_truth(Index p, Index count) {
    std::vector<std::uint8_t> truth(static_cast<std::size_t>(p), 0);
    std::fill(truth.begin(), truth.begin() + count, 1);
    return truth;
}

/*
 * Noise blocks live on quads of 4 consecutive samples; quads 0-4 cover the
 * first outcome half and quads 5-9 the second. Within a quad the patterns
 * a, b, c are mutually orthogonal and sum to zero, as are p1 and p2. Two
 * blocks sharing a quad always use different patterns there, so all blocks
 * are orthogonal to each other, to the all-ones vector and to the half split.
 * The first three blocks have disjoint supports.
 */
using QuadPattern = std::array<int, 4>;
constexpr QuadPattern pat_a{1, 1, -1, -1};
constexpr QuadPattern pat_b{1, -1, 1, -1};
constexpr QuadPattern pat_c{1, -1, -1, 1};
constexpr QuadPattern pat_p1{1, -1, 0, 0};
constexpr QuadPattern pat_p2{0, 0, 1, -1};

struct Piece {
    int quad;
    QuadPattern pattern;
};

const std::array<std::array<Piece, 3>, 7> kBlocks{{
    {{{0, pat_a}, {1, pat_a}, {6, pat_p1}}},
    {{{2, pat_a}, {3, pat_a}, {7, pat_p2}}},
    {{{4, pat_a}, {5, pat_a}, {9, pat_p1}}},
    {{{0, pat_b}, {1, pat_b}, {6, pat_p2}}},
    {{{0, pat_c}, {1, pat_c}, {7, pat_p1}}},
    {{{2, pat_b}, {3, pat_b}, {8, pat_p1}}},
    {{{2, pat_c}, {3, pat_c}, {8, pat_p2}}},
}};

SimulatedDataset finish(Matrix x, Outcome outcome, std::vector<std::uint8_t> truth, std::string name, std::uint64_t seed) {
    return SimulatedDataset{ExpressionMatrix(std::move(x)), std::move(outcome), std::move(truth), std::move(name), seed};
}

Vector centered_normal(RandomStream& rng, Index size) {
    Vector v(size);
    for (Index i = 0; i < size; ++i) {
        v[i] = rng.normal();
    }
    return v.array() - v.mean();
}

}

SimulatedDataset simulate_1(std::uint64_t seed) {
    auto rng = generator_stream(seed, code_sim1);
    const Index n = kSimSamples, p = kSimFeatures;
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rng.normal(i < 20 ? 6.0 : 5.0, 1.0);
    }
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            x(i, j) = rng.normal(j < kSimSignal && i < 20 ? 2.0 : 0.0, 1.0);
        }
    }
    return finish(std::move(x), Quantitative{std::move(y)}, leading_truth(p, kSimSignal), "sim1", seed);
}

Matrix noise_block_patterns(int n_blocks) {
    if (n_blocks < 0 || n_blocks > static_cast<int>(kBlocks.size())) {
        throw DataError("the number of noise blocks must lie in [0, 7]");
    }
    Matrix out = Matrix::Zero(kSimSamples, n_blocks);
    for (int b = 0; b < n_blocks; ++b) {
        for (const auto& piece : kBlocks[b]) {
            for (int s = 0; s < 4; ++s) {
                out(4 * piece.quad + s, b) = piece.pattern[s];
            }
        }
    }
    return out;
}

SimulatedDataset simulate_2(std::uint64_t seed, int n_noise_blocks) {
    Matrix patterns = noise_block_patterns(n_noise_blocks);
    auto rng = generator_stream(seed, code_sim2);
    const Index n = kSimSamples, p = kSimFeatures;
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rng.normal(i < 20 ? 12.5 : 10.0, 1.0);
    }
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        Index block = j >= kSimSignal ? (j - kSimSignal) / 100 : -1;
        bool in_block = block >= 0 && block < n_noise_blocks;
        for (Index i = 0; i < n; ++i) {
            double mean = j < kSimSignal && i < 20 ? 1.5 : 0.0;
            if (in_block) {
                mean += 2.0 * patterns(i, block);
            }
            x(i, j) = rng.normal(mean, 1.0);
        }
    }
    return finish(std::move(x), Quantitative{std::move(y)}, leading_truth(p, kSimSignal),
                  "sim2-" + std::to_string(n_noise_blocks) + "block", seed);
}

SimulatedDataset simulate_3(std::uint64_t seed) {
    auto rng = generator_stream(seed, code_sim3);
    const Index n = kSimSamples, p = kSimFeatures;
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rng.normal(i < 10 ? 10.0 : (i < 30 ? 11.0 : 12.0), 1.0);
    }
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            bool shifted = (j < 25 && i >= 20) || (j >= 25 && j < kSimSignal && ((i >= 10 && i < 20) || i >= 30));
            x(i, j) = rng.normal(shifted ? 2.0 : 0.0, 1.0);
        }
    }
    return finish(std::move(x), Quantitative{std::move(y)}, leading_truth(p, kSimSignal), "sim3", seed);
}

TwoClass dichotomize(const Quantitative& outcome) {
    const Index n = outcome.y.size();
    if (n < 2) {
        throw DataError("need at least 2 samples to dichotomize");
    }
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return outcome.y[a] < outcome.y[b]; });
    TwoClass out{std::vector<int>(static_cast<std::size_t>(n), 1)};
    for (Index pos = n / 2; pos < n; ++pos) {
        out.labels[static_cast<std::size_t>(order[pos])] = 2;
    }
    return out;
}

SimulatedDataset as_two_class(SimulatedDataset data) {
    auto quant = std::get_if<Quantitative>(&data.outcome);
    if (!quant) {
        throw DataError("only quantitative outcomes can be dichotomized");
    }
    data.outcome = dichotomize(*quant);
    data.generator += "-2class";
    return data;
}

LatentModel::LatentModel(const LatentModelSpec& spec) : spec_(spec) {
    if (spec.n < 3 || spec.p < 3) {
        throw DataError("latent model needs n >= 3 and p >= 3");
    }
    if (spec.important < 2 || spec.important > spec.p) {
        throw DataError("the important set must have between 2 and p features");
    }
    if (!(spec.sd_eps >= 0) || !(spec.sd_z >= 0)) {
        throw DataError("noise standard deviations must be non-negative");
    }
    RandomStream rng(spec.structure_seed, stream_id(StreamTag::structure, code_latent));
    u1_ = centered_normal(rng, spec.n);
    u1_.normalize();
    u2_ = centered_normal(rng, spec.n);
    u2_ -= u1_.dot(u2_) * u1_;
    u2_.normalize();

    alpha1_ = Vector::Zero(spec.p);
    alpha1_.head(spec.important) = centered_normal(rng, spec.important);
    alpha1_.normalize();
    alpha2_ = centered_normal(rng, spec.p);
    alpha2_ -= alpha1_.dot(alpha2_) * alpha1_;
    alpha2_.normalize();
}

SimulatedDataset LatentModel::sample(std::uint64_t seed) const {
    auto rng = generator_stream(seed, code_latent);
    const Index n = spec_.n, p = spec_.p;
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = spec_.beta1 * u1_[i] + spec_.sd_eps * rng.normal();
    }
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            x(i, j) = spec_.c1 * alpha1_[j] * u1_[i] + spec_.c2 * alpha2_[j] * u2_[i] + spec_.sd_z * rng.normal();
        }
    }
    return finish(std::move(x), Quantitative{std::move(y)}, leading_truth(p, spec_.important), "latent", seed);
}

double LatentModel::expected_score(Index j) const {
    return spec_.c1 * alpha1_[j] * spec_.beta1;
}

double LatentModel::variance_reduction(Index j) const {
    const double ve = spec_.sd_eps * spec_.sd_eps, vz = spec_.sd_z * spec_.sd_z;
    const double a1 = alpha1_[j], a2 = alpha2_[j];
    return spec_.c2 * spec_.c2 * a2 * a2 * ve +
           (1 - a1 * a1) * (spec_.beta1 * spec_.beta1 * vz + static_cast<double>(spec_.n) * vz * ve);
}

std::pair<SimulatedDataset, Vector> latent_model_sample(const LatentModelSpec& spec, std::uint64_t seed) {
    LatentModel model(spec);
    return {model.sample(seed), model.alpha1()};
}

Vector confounder_coding(Index n) {
    const Index m = 2 * (n / 4);
    Vector c(n);
    for (Index i = 0; i < n; ++i) {
        c[i] = i < m ? 1.0 : -1.0;
    }
    return c;
}

SimulatedDataset simulate_confounded(std::uint64_t seed, Index n, Index p, Index n_true) {
    if (n < 8 || n % 2 != 0) {
        throw DataError("the confounded generator needs an even number of samples, at least 8");
    }
    if (n_true < 1 || n_true > p) {
        throw DataError("n_true must lie in [1, p]");
    }
    auto rng = generator_stream(seed, code_confounded);
    Vector confounder = confounder_coding(n);
    TwoClass outcome{std::vector<int>(static_cast<std::size_t>(n))};
    for (Index i = 0; i < n; ++i) {
        outcome.labels[static_cast<std::size_t>(i)] = i % 2 == 0 ? 2 : 1;
    }
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            double mean = 0;
            if (j < n_true) {
                mean = (outcome.labels[static_cast<std::size_t>(i)] == 2 ? 2.0 : 0.0) - (confounder[i] > 0 ? 1.5 : 0.0);
            }
            x(i, j) = rng.normal(mean, 1.0);
        }
    }
    return finish(std::move(x), std::move(outcome), leading_truth(p, n_true), "confounded", seed);
}

SimulatedDataset simulate_isolated(std::uint64_t seed, Index n, Index p) {
    if (n < 4 || p < 2) {
        throw DataError("the isolated-feature generator needs n >= 4 and p >= 2");
    }
    auto rng = generator_stream(seed, code_isolated);
    Vector y(n);
    for (Index i = 0; i < n; ++i) {
        y[i] = rng.normal();
    }
    Matrix x(n, p);
    const double scale = 1 / std::sqrt(10.0);
    for (Index j = 0; j < p; ++j) {
        for (Index i = 0; i < n; ++i) {
            x(i, j) = j == 0 ? scale * (3 * y[i] + rng.normal()) : rng.normal();
        }
    }
    return finish(std::move(x), Quantitative{std::move(y)}, leading_truth(p, 1), "isolated", seed);
}

}
