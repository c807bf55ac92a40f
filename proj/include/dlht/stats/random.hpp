#pragma once
#include <array>
#include <cstdint>

namespace dlht::stats {

/*
 * Philox4x32-10 counter-based generator. The output at position `i` of a
 * stream depends only on (key, stream, i), so substreams can be handed to
 * workers in any order without changing what they draw.
 */
class Generator {
   public:
    using result_type = std::uint64_t;

    Generator(std::uint64_t key, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()();

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    // Standard normal by inversion (one uniform per draw).
    double normal();

    std::uint64_t position() const { return counter_; }

   private:
    void refill();

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int available_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/*
 * Immutable descriptor of a reproducible random sequence. Identical
 * (seed, stream_id) pairs replay identical draws; `child` derives
 * statistically independent substreams by hashing.
 */
struct RandomStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    RandomStream child(std::uint64_t index) const;
    Generator generator() const { return Generator(seed, stream_id); }

    friend bool operator==(const RandomStream&, const RandomStream&) = default;
};

}  // namespace dlht::stats
