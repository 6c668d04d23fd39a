#pragma once

#include <cstdint>
#include <limits>

namespace votesim {

/// Seeded counter-style random stream based on the splitmix64 generator.
/// Substreams are derived by hashing a key into the state, so the same
/// (seed, key path) always yields the same draw sequence and distinct key
/// paths yield statistically independent streams.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t seed) noexcept : state_(mix(mix(seed) ^ kGolden)) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<std::uint64_t>::max(); }

    result_type operator()() noexcept {
        state_ += kGolden;
        return mix(state_);
    }

    /// Independent-quality child stream; does not advance this stream.
    [[nodiscard]] RngStream substream(std::uint64_t key) const noexcept {
        RngStream child(0);
        child.state_ = mix(state_ ^ mix(key + kGolden));
        return child;
    }

    [[nodiscard]] RngStream substream(std::uint64_t a, std::uint64_t b) const noexcept {
        return substream(a).substream(b);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound) noexcept {
        // rejection sampling on the top of the 64-bit range
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = (*this)();
            if (r >= threshold) return r % bound;
        }
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
};

}  // namespace votesim
