#ifndef LPC_SIM_LAB_HPP
#define LPC_SIM_LAB_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lpc/matrix_core.hpp"
#include "lpc/outcome.hpp"

/**
 * @file sim_lab.hpp
 * @brief Seeded synthetic datasets with known truth.
 *
 * Every generator is a pure function of its parameters and seed. Samples are
 * drawn from stream `(seed, simulation, generator code)` in a fixed order:
 * outcome values first (sample by sample), then the matrix feature by feature.
 */

namespace lpc {

struct SimulatedDataset {
    ExpressionMatrix x;
    Outcome outcome;
    /** 1 for features genuinely associated with the outcome. */
    std::vector<std::uint8_t> truth;
    std::string generator;
    std::uint64_t seed = 0;
};

/**
 * 40 x 1000. `y ~ N(6, 1)` for samples 1-20 and `N(5, 1)` otherwise; the
 * first 50 features are `N(2, 1)` on samples 1-20 and `N(0, 1)` elsewhere.
 */
SimulatedDataset simulate_1(std::uint64_t seed);

/**
 * 40 x 1000. `y ~ N(12.5, 1)` for samples 1-20 and `N(10, 1)` otherwise; the
 * first 50 features are `N(1.5, 1)` on samples 1-20; `n_noise_blocks` (3 or 7)
 * blocks of 100 features starting at feature 51 carry a fixed +-2 pattern
 * over 10 samples, orthogonal to the outcome halves and to one another.
 */
SimulatedDataset simulate_2(std::uint64_t seed, int n_noise_blocks = 3);

/**
 * 40 x 1000 with three outcome groups (`N(10,1)`, `N(11,1)`, `N(12,1)` on
 * samples 1-10, 11-30, 31-40). Features 1-25 shift by 2 on samples 21-40,
 * features 26-50 shift by 2 on samples 11-20 and 31-40.
 */
SimulatedDataset simulate_3(std::uint64_t seed);

/** `n x n_blocks` matrix of the Simulation 2 noise-block sample patterns, entries in {-1, 0, 1}. */
Matrix noise_block_patterns(int n_blocks);

/** Class 2 for values above the median, class 1 otherwise (ties broken by sample order). */
TwoClass dichotomize(const Quantitative& outcome);

/** Same dataset with its quantitative outcome dichotomized. */
SimulatedDataset as_two_class(SimulatedDataset data);

struct LatentModelSpec {
    Index n = 40;
    Index p = 200;
    Index important = 30;
    double c1 = 5;
    double c2 = 5;
    double beta1 = 2;
    double sd_eps = 1;
    double sd_z = 1;
    /** Seed for the fixed factors `u1, u2, alpha1, alpha2`. */
    std::uint64_t structure_seed = 1;
};

/**
 * @brief Two-factor latent model.
 *
 * `X = c1 u1 alpha1' + c2 u2 alpha2' + Z`, `y = beta1 u1 + eps`. The factors
 * are drawn once per model: `u1, u2` are centered orthonormal sample
 * patterns, `alpha1, alpha2` centered orthonormal feature patterns with
 * `alpha1` supported on the first `important` features.
 */
class LatentModel {
public:
    explicit LatentModel(const LatentModelSpec& spec);

    const LatentModelSpec& spec() const { return spec_; }
    const Vector& u1() const { return u1_; }
    const Vector& u2() const { return u2_; }
    const Vector& alpha1() const { return alpha1_; }
    const Vector& alpha2() const { return alpha2_; }

    /** One draw of `(X, y)`; truth marks the support of `alpha1`. */
    SimulatedDataset sample(std::uint64_t seed) const;

    /** `E(T_j) = c1 * alpha1_j * beta1` for `T = X'y`. */
    double expected_score(Index j) const;

    /**
     * `Var(T_j) - Var(That_j)` with `That = <T, alpha1> alpha1`:
     * `c2^2 alpha2_j^2 s_eps^2 + (1 - alpha1_j^2)(beta1^2 s_z^2 + n s_z^2 s_eps^2)`.
     */
    double variance_reduction(Index j) const;

private:
    LatentModelSpec spec_;
    Vector u1_, u2_, alpha1_, alpha2_;
};

/** One draw from the latent model plus the oracle eigenarray `alpha1`. */
std::pair<SimulatedDataset, Vector> latent_model_sample(const LatentModelSpec& spec, std::uint64_t seed);

/**
 * Two-class data where true features respond to both the class and a
 * binary confounder. Classes alternate along the sample order; the
 * confounder is +1 on the first `m` samples (`m` the largest even number not
 * above `n / 2`) and -1 after, so its coding is orthogonal to the class
 * coding. True features (the first `n_true`) get `+2` in class 2 and `-1.5`
 * where the confounder is +1, on top of unit Gaussian noise.
 */
SimulatedDataset simulate_confounded(std::uint64_t seed, Index n = 10, Index p = 50, Index n_true = 10);

/** Binary confounder coding used by `simulate_confounded`. */
Vector confounder_coding(Index n);

/**
 * One informative feature and no correlated structure: `y ~ N(0, 1)`,
 * feature 1 is `(3 y + N(0, 1)) / sqrt(10)` so that its variance matches the
 * other features, which are `N(0, 1)`.
 */
SimulatedDataset simulate_isolated(std::uint64_t seed, Index n = 40, Index p = 1000);

}

#endif
