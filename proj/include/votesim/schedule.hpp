#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "votesim/core.hpp"

namespace votesim {

// All round and phase budgets use base-2 logs with ceilings; iterated log
// arguments are clamped (k -> max(k,2), n -> max(n,4)) to stay defined.

inline double log2_clamped_k(std::int64_t k) {
    return std::log2(static_cast<double>(std::max<std::int64_t>(k, 2)));
}

inline double log2log2_clamped_n(std::int64_t n) {
    return std::log2(std::log2(static_cast<double>(std::max<std::int64_t>(n, 4))));
}

/// Bit-propagation rounds per phase: ceil(2 log2 k + 2 log2 log2 n).
inline std::int64_t propagation_rounds(std::int64_t n, std::int64_t k,
                                       const ProtocolParams& params) {
    if (params.propagation_rounds_override) return *params.propagation_rounds_override;
    return static_cast<std::int64_t>(
        std::ceil(2.0 * log2_clamped_k(k) + 2.0 * log2log2_clamped_n(n)));
}

/// U defaults to c2 / (c1 - c2) from the sorted initial configuration,
/// clamped to [2, n].
inline double memory_u_bound(const Configuration& cfg, const ProtocolParams& params) {
    if (params.u_override) return *params.u_override;
    const auto sorted = cfg.sorted_desc();
    const double n = static_cast<double>(cfg.n());
    double u = n;
    if (sorted.size() >= 2 && sorted[0] > sorted[1])
        u = static_cast<double>(sorted[1]) / static_cast<double>(sorted[0] - sorted[1]);
    return std::clamp(u, 2.0, n);
}

/// Phase cap: ceil(ell log2 U + log2 log2 n).
inline std::int64_t memory_phase_cap(const Configuration& cfg, const ProtocolParams& params) {
    const double u = memory_u_bound(cfg, params);
    return static_cast<std::int64_t>(
        std::ceil(static_cast<double>(params.ell) * std::log2(u) + log2log2_clamped_n(cfg.n())));
}

/// Two-choices round cap: max(max_rounds, ceil(k log2 n)).
inline std::int64_t two_choices_cap(std::int64_t n, std::int64_t k,
                                    const ProtocolParams& params) {
    const auto loop_bound = static_cast<std::int64_t>(std::ceil(
        static_cast<double>(k) * std::log2(static_cast<double>(std::max<std::int64_t>(n, 2)))));
    return std::max(params.max_rounds, loop_bound);
}

/// Phases an asynchronous node runs before halting: 10 * ceil(log2 n).
inline std::int64_t async_phases(std::int64_t n) {
    return 10 * static_cast<std::int64_t>(
                    std::ceil(std::log2(static_cast<double>(std::max<std::int64_t>(n, 2)))));
}

/// Instructions per asynchronous node program: one two-choices step plus two
/// propagation ticks per phase.
inline std::int64_t async_instructions_per_node(std::int64_t n) { return 3 * async_phases(n); }

}  // namespace votesim
