#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace indecide {

/// Philox4x32-10 block function: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based pseudo-random stream.
///
/// The key is the seed; the upper 64 counter bits hold the stream id and the
/// lower 64 count blocks. Any (seed, stream_id) pair is reachable in O(1) and
/// streams never share blocks, so replication r can own stream r no matter
/// how replications are spread across workers.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return next_u64(); }
    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53 bits of resolution.
    double uniform();

    /// Standard normal by inversion of the tail function.
    double normal();

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
};

/// Deterministic stream for replication `stream_id` of an experiment seeded with `seed`.
inline RandomStream seeded_stream(std::uint64_t seed, std::uint64_t stream_id) { return RandomStream(seed, stream_id); }

}  // namespace indecide
