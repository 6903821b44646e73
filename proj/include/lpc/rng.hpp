#ifndef LPC_RNG_HPP
#define LPC_RNG_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

/**
 * @file rng.hpp
 * @brief Counter-based random streams.
 *
 * Every stochastic routine draws from a `RandomStream` identified by a
 * `(seed, stream)` pair. The generator is Philox4x64-10 keyed by
 * `{seed, stream}` with the block index as the counter, so streams are
 * independent of each other and of the order in which they are consumed.
 * Distribution sampling (uniform, Gaussian, bounded integers, shuffles) is
 * implemented here rather than through `<random>` so that output is the same
 * on every standard library.
 */

namespace lpc {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/** One Philox4x64-10 block. */
PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key);

/**
 * Stream namespaces. A stream id is `(tag << 48) | index`, so indices below
 * 2^48 never collide across tags.
 */
enum class StreamTag : std::uint64_t {
    permutation = 1,
    tuning_split = 2,
    fdr_split = 3,
    test_null = 4,
    resample = 5,
    simulation = 6,
    structure = 7,
    demo = 8,
    advantage_split = 9,
};

std::uint64_t stream_id(StreamTag tag, std::uint64_t index);

/**
 * Seed for a nested computation (e.g. the FDR run inside resample `index`),
 * derived from the parent seed through one Philox block.
 */
std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index);

class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    /** Uniform on the open interval (0, 1). */
    double uniform();

    /** Standard normal via Box-Muller; the second variate of each pair is cached. */
    double normal();

    double normal(double mean, double sd) { return mean + sd * normal(); }

    /** Unbiased integer in [0, bound). `bound` must be positive. */
    std::uint64_t below(std::uint64_t bound);

    template<typename T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            auto j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

    /** Uniformly random permutation of 0..n-1. */
    std::vector<std::size_t> permutation(std::size_t n);

private:
    PhiloxKey key_;
    std::uint64_t block_ = 0;
    PhiloxCounter buffer_{};
    int used_ = 4;
    bool has_cached_normal_ = false;
    double cached_normal_ = 0;
};

}

#endif
