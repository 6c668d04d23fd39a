#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "votesim/rng.hpp"

namespace votesim {

/// Draw an index with probability weights[i] / sum(weights).
inline std::size_t sample_categorical(std::span<const double> weights, RngStream& rng) {
    double total = 0.0;
    for (const double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw std::invalid_argument("categorical: weights must be finite and non-negative");
        total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("categorical: all weights are zero");
    const double u = rng.next_double() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    return weights.size() - 1;
}

/// B(m, p) draw; p is clamped to [0, 1] to absorb floating-point residue.
inline std::int64_t sample_binomial(std::int64_t m, double p, RngStream& rng) {
    if (m < 0) throw std::invalid_argument("binomial: negative trial count");
    if (m == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return m;
    std::binomial_distribution<std::int64_t> dist(m, p);
    return dist(rng);
}

/// Exact multinomial(m; probs) via sequential conditional binomial draws.
inline std::vector<std::int64_t> sample_multinomial(std::int64_t m, std::span<const double> probs,
                                                    RngStream& rng) {
    if (m < 0) throw std::invalid_argument("multinomial: negative trial count");
    double total = 0.0;
    for (const double p : probs) {
        if (p < 0.0 || p > 1.0 || !std::isfinite(p))
            throw std::invalid_argument("multinomial: probability outside [0, 1]");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("multinomial: probabilities must sum to 1");

    std::vector<std::int64_t> counts(probs.size(), 0);
    std::int64_t remaining = m;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        const double cond = mass_left > 0.0 ? std::min(probs[i] / mass_left, 1.0) : 1.0;
        counts[i] = sample_binomial(remaining, cond, rng);
        remaining -= counts[i];
        mass_left -= probs[i];
    }
    if (!probs.empty()) counts.back() += remaining;
    return counts;
}

}  // namespace votesim
