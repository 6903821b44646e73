#include "lpc/rng.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace lpc {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    auto product = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(product >> 64);
    lo = static_cast<std::uint64_t>(product);
}

}

PhiloxCounter philox4x64(PhiloxCounter ctr, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t stream_id(StreamTag tag, std::uint64_t index) {
    return (static_cast<std::uint64_t>(tag) << 48) | (index & ((1ULL << 48) - 1));
}

std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
    return philox4x64({index, 0, 0, 0}, {seed, stream_id(tag, 0) ^ 0xA5A5A5A5A5A5A5A5ULL})[0];
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

std::uint64_t RandomStream::next_u64() {
    if (used_ == 4) {
        buffer_ = philox4x64({block_, 0, 0, 0}, key_);
        ++block_;
        used_ = 0;
    }
    return buffer_[used_++];
}

double RandomStream::uniform() {
    constexpr double scale = 0x1.0p-53;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * scale;
}

double RandomStream::normal() {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    double radius = std::sqrt(-2.0 * std::log(uniform()));
    double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t bound) {
    // Lemire's multiply-then-reject.
    std::uint64_t hi, lo;
    mulhilo(next_u64(), bound, hi, lo);
    if (lo < bound) {
        std::uint64_t threshold = (0 - bound) % bound;
        while (lo < threshold) {
            mulhilo(next_u64(), bound, hi, lo);
        }
    }
    return hi;
}

std::vector<std::size_t> RandomStream::permutation(std::size_t n) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order));
    return order;
}

}
