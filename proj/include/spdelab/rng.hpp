#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace spdelab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). The 64-bit seed
/// is the key; output block i is the encryption of counter i, so every stream is
/// fully determined by its key and independent of how work is scheduled.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed = 0);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()();

    /// Ten-round bijection of a 128-bit counter under a 64-bit key.
    static Block encrypt(Block counter, Key key);

    std::uint64_t seed() const { return seed_; }
    /// Blocks consumed so far.
    std::uint64_t position() const { return counter_; }

private:
    std::uint64_t seed_;
    Key key_;
    std::uint64_t counter_ = 0;
    Block buffer_{};
    int next_ = 2;  // 64-bit words already handed out from buffer_
};

/// SplitMix64 finalizer, a bijective avalanche on 64 bits.
std::uint64_t mix64(std::uint64_t x);

/// Seed for cell (a, b) of an experiment, e.g. (nu index, run index).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b);

/// Standard normal variates from a Philox stream.
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : engine_(seed) {}

    double operator()() { return dist_(engine_); }
    std::uint64_t seed() const { return engine_.seed(); }

private:
    Philox4x32 engine_;
    boost::random::normal_distribution<double> dist_;
};

}  // namespace spdelab
