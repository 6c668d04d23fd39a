#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "votesim/rng.hpp"

namespace votesim {

/// Index of an opinion; valid values are [0, k) of the owning configuration.
struct ColorId {
    std::uint32_t index = 0;
    friend bool operator==(ColorId, ColorId) = default;
};

/// Macroscopic state: one count per color, summing to n. Counts are kept in
/// input order; descending order is applied by analysis helpers, never by
/// storage.
class Configuration {
public:
    explicit Configuration(std::vector<std::int64_t> counts) : counts_(std::move(counts)) {
        if (counts_.empty()) throw std::invalid_argument("configuration: empty count vector");
        n_ = 0;
        for (const auto c : counts_) {
            if (c < 0) throw std::invalid_argument("configuration: negative count");
            n_ += c;
        }
        if (n_ < 1) throw std::invalid_argument("configuration: total population must be positive");
    }

    [[nodiscard]] std::int64_t n() const noexcept { return n_; }
    [[nodiscard]] std::size_t k() const noexcept { return counts_.size(); }
    [[nodiscard]] std::int64_t count(std::size_t i) const { return counts_.at(i); }
    [[nodiscard]] std::span<const std::int64_t> counts() const noexcept { return counts_; }

    [[nodiscard]] bool unanimous() const noexcept {
        return std::ranges::any_of(counts_, [&](std::int64_t c) { return c == n_; });
    }

    [[nodiscard]] std::optional<std::size_t> unanimous_color() const noexcept {
        for (std::size_t i = 0; i < counts_.size(); ++i)
            if (counts_[i] == n_) return i;
        return std::nullopt;
    }

    [[nodiscard]] std::size_t largest_color() const noexcept {
        return static_cast<std::size_t>(
            std::distance(counts_.begin(), std::ranges::max_element(counts_)));
    }

    [[nodiscard]] std::vector<std::int64_t> sorted_desc() const {
        auto s = counts_;
        std::ranges::sort(s, std::greater<>());
        return s;
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;

private:
    std::vector<std::int64_t> counts_;
    std::int64_t n_ = 0;
};

inline Configuration make_configuration(std::vector<std::int64_t> counts) {
    return Configuration(std::move(counts));
}

/// Microscopic state: per-node color and bit. Bits start all False.
struct AgentPopulation {
    std::vector<std::uint32_t> colors;
    std::vector<std::uint8_t> bits;
    std::uint32_t k = 0;

    static AgentPopulation from_configuration(const Configuration& cfg) {
        AgentPopulation pop;
        pop.k = static_cast<std::uint32_t>(cfg.k());
        pop.colors.reserve(static_cast<std::size_t>(cfg.n()));
        for (std::size_t j = 0; j < cfg.k(); ++j)
            pop.colors.insert(pop.colors.end(), static_cast<std::size_t>(cfg.count(j)),
                              static_cast<std::uint32_t>(j));
        pop.bits.assign(pop.colors.size(), 0);
        return pop;
    }

    [[nodiscard]] std::int64_t n() const noexcept {
        return static_cast<std::int64_t>(colors.size());
    }

    [[nodiscard]] Configuration to_configuration() const {
        std::vector<std::int64_t> counts(k, 0);
        for (const auto c : colors) ++counts[c];
        return Configuration(std::move(counts));
    }

    [[nodiscard]] std::int64_t bits_set() const noexcept {
        return std::accumulate(bits.begin(), bits.end(), std::int64_t{0});
    }

    [[nodiscard]] std::vector<std::int64_t> bits_per_color() const {
        std::vector<std::int64_t> x(k, 0);
        for (std::size_t v = 0; v < colors.size(); ++v)
            if (bits[v]) ++x[colors[v]];
        return x;
    }
};

/// Exact macroscopic state for the memory protocol: counts per (color, bit).
struct AggregateState {
    std::vector<std::int64_t> set_counts;    // x_j: color j, bit True
    std::vector<std::int64_t> unset_counts;  // color j, bit False

    static AggregateState from_configuration(const Configuration& cfg) {
        AggregateState st;
        st.set_counts.assign(cfg.k(), 0);
        st.unset_counts.assign(cfg.counts().begin(), cfg.counts().end());
        return st;
    }

    [[nodiscard]] std::size_t k() const noexcept { return set_counts.size(); }

    [[nodiscard]] std::int64_t n() const noexcept {
        return std::accumulate(set_counts.begin(), set_counts.end(), std::int64_t{0}) +
               std::accumulate(unset_counts.begin(), unset_counts.end(), std::int64_t{0});
    }

    [[nodiscard]] std::int64_t x() const noexcept {
        return std::accumulate(set_counts.begin(), set_counts.end(), std::int64_t{0});
    }

    [[nodiscard]] std::int64_t color_count(std::size_t j) const {
        return set_counts.at(j) + unset_counts.at(j);
    }

    [[nodiscard]] Configuration to_configuration() const {
        std::vector<std::int64_t> counts(k());
        for (std::size_t j = 0; j < k(); ++j) counts[j] = set_counts[j] + unset_counts[j];
        return Configuration(std::move(counts));
    }
};

/// Everything the protocol loops parameterize: phase lengths, the constant
/// ell, the bound U on b/(c1-c2), round caps, and sampling semantics.
struct ProtocolParams {
    int ell = 10;
    std::optional<double> u_override;
    std::optional<int> propagation_rounds_override;
    std::int64_t max_rounds = 1;
    bool sample_includes_self = true;

    void validate() const {
        if (ell < 1) throw std::invalid_argument("params: ell must be >= 1");
        if (max_rounds < 1) throw std::invalid_argument("params: max_rounds must be >= 1");
        if (u_override && *u_override <= 0)
            throw std::invalid_argument("params: U override must be positive");
        if (propagation_rounds_override && *propagation_rounds_override < 1)
            throw std::invalid_argument("params: propagation rounds override must be >= 1");
    }
};

}  // namespace votesim
