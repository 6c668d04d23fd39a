#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "votesim/core.hpp"

namespace votesim::oracle {

/// One-round Markov kernel of the two-choices protocol, materialized as an
/// exact next-configuration distribution. Only feasible on tiny instances.
struct TransitionDistribution {
    std::map<std::vector<std::int64_t>, double> probabilities;

    [[nodiscard]] double total_mass() const noexcept {
        double s = 0.0;
        for (const auto& [_, p] : probabilities) s += p;
        return s;
    }
};

/// E[f_ij] = c_i c_j^2 / n^2 for the flow from color i to color j.
inline double expected_flow(const Configuration& cfg, std::size_t i, std::size_t j) {
    if (i == j) throw std::invalid_argument("expected_flow: i == j has no flow");
    const double n = static_cast<double>(cfg.n());
    const double ci = static_cast<double>(cfg.count(i));
    const double cj = static_cast<double>(cfg.count(j));
    return ci * cj * cj / (n * n);
}

/// Var[f_ij] = c_i c_j^2 (n - c_j)(n + c_j) / n^4.
inline double flow_variance(const Configuration& cfg, std::size_t i, std::size_t j) {
    if (i == j) throw std::invalid_argument("flow_variance: i == j has no flow");
    const double n = static_cast<double>(cfg.n());
    const double ci = static_cast<double>(cfg.count(i));
    const double cj = static_cast<double>(cfg.count(j));
    return ci * cj * cj * (n - cj) * (n + cj) / (n * n * n * n);
}

/// E[c'_i] = c_i + (n - c_i) c_i^2 / n^2 - (c_i / n^2) sum_{j != i} c_j^2.
inline double expected_next(const Configuration& cfg, std::size_t i) {
    const double n = static_cast<double>(cfg.n());
    const double ci = static_cast<double>(cfg.count(i));
    double sum_other_sq = 0.0;
    for (std::size_t j = 0; j < cfg.k(); ++j) {
        if (j == i) continue;
        const double cj = static_cast<double>(cfg.count(j));
        sum_other_sq += cj * cj;
    }
    return ci + (n - ci) * ci * ci / (n * n) - ci / (n * n) * sum_other_sq;
}

inline std::vector<double> expected_next_all(const Configuration& cfg) {
    std::vector<double> out(cfg.k());
    for (std::size_t i = 0; i < cfg.k(); ++i) out[i] = expected_next(cfg, i);
    return out;
}

/// Lower bound (a - b)(1 + a / 4n) on the next gap between the two largest
/// colors; diagnostic companion to the gap-growth lemma.
inline double gap_growth_bound(const Configuration& cfg) {
    if (cfg.k() < 2) throw std::invalid_argument("gap_growth_bound: need at least two colors");
    const auto sorted = cfg.sorted_desc();
    const double a = static_cast<double>(sorted[0]);
    const double b = static_cast<double>(sorted[1]);
    const double n = static_cast<double>(cfg.n());
    return (a - b) * (1.0 + a / (4.0 * n));
}

/// E[x(1)] = sum_j c_j^2 / n, the expected bit count after a two-choices round.
inline double expected_bits_after_two_choices(const Configuration& cfg) {
    const double n = static_cast<double>(cfg.n());
    double s = 0.0;
    for (const auto c : cfg.counts()) {
        const double cd = static_cast<double>(c);
        s += cd * cd;
    }
    return s / n;
}

/// E[x_j(1)] = c_j^2 / n, from x_j(1) ~ B(n, c_j^2 / n^2).
inline double per_color_bit_expectation(const Configuration& cfg, std::size_t j) {
    const double n = static_cast<double>(cfg.n());
    const double cj = static_cast<double>(cfg.count(j));
    return cj * cj / n;
}

/// One bit-propagation step in expectation:
/// (E[x(t+1)], E[x_j(t+1)]) = (x + (n-x) x / n, x_j + (n-x) x_j / n).
inline std::pair<double, double> bit_propagation_expectation(std::int64_t x, std::int64_t x_j,
                                                             std::int64_t n) {
    if (x_j < 0 || x_j > x || x > n)
        throw std::invalid_argument("bit_propagation_expectation: need 0 <= x_j <= x <= n");
    const double xd = static_cast<double>(x);
    const double xjd = static_cast<double>(x_j);
    const double nd = static_cast<double>(n);
    return {xd + (nd - xd) * xd / nd, xjd + (nd - xd) * xjd / nd};
}

/// Adversarial near-tie configuration with gap z' * sqrt(n):
/// (floor(n') + floor(z sqrt n), ceil(n') - floor(z sqrt n), 1, ..., 1)
/// with z = z'/2 and n' = (n - k + 2) / 2.
inline Configuration theorem3_configuration(std::int64_t n, std::int64_t k, double z_prime) {
    if (k < 2 || n < k) throw std::invalid_argument("theorem3_configuration: need 2 <= k <= n");
    const double n_prime = static_cast<double>(n - k + 2) / 2.0;
    const auto shift =
        static_cast<std::int64_t>(std::floor(z_prime / 2.0 * std::sqrt(static_cast<double>(n))));
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 1);
    counts[0] = static_cast<std::int64_t>(std::floor(n_prime)) + shift;
    counts[1] = static_cast<std::int64_t>(std::ceil(n_prime)) - shift;
    if (counts[1] < 1)
        throw std::invalid_argument("theorem3_configuration: bias too large, c2 < 1");
    return Configuration(std::move(counts));
}

/// Slow-start configuration: c1 = n/k plus a sqrt(n ln n) bias, remainder
/// split as evenly as possible.
inline Configuration theorem4_configuration(std::int64_t n, std::int64_t k, double z) {
    if (k < 2 || n < k) throw std::invalid_argument("theorem4_configuration: need 2 <= k <= n");
    const double nd = static_cast<double>(n);
    const auto bias =
        static_cast<std::int64_t>(std::ceil(z * std::sqrt(nd * std::log(nd))));
    const auto c1 = static_cast<std::int64_t>(std::llround(nd / static_cast<double>(k))) + bias;
    const std::int64_t rest = n - c1;
    if (c1 < 1 || rest < k - 1)
        throw std::invalid_argument("theorem4_configuration: infeasible bias");
    std::vector<std::int64_t> counts(static_cast<std::size_t>(k));
    counts[0] = c1;
    const std::int64_t base = rest / (k - 1);
    std::int64_t extra = rest % (k - 1);
    for (std::size_t j = 1; j < counts.size(); ++j) {
        counts[j] = base + (extra > 0 ? 1 : 0);
        if (extra > 0) --extra;
    }
    return Configuration(std::move(counts));
}

namespace detail {

inline double log_factorial(std::int64_t m) { return std::lgamma(static_cast<double>(m) + 1.0); }

/// Probability of one multinomial flow outcome from a single source color.
inline double multinomial_pmf(std::int64_t m, const std::vector<std::int64_t>& counts,
                              const std::vector<double>& probs) {
    double logp = log_factorial(m);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i] == 0) continue;
        if (probs[i] <= 0.0) return 0.0;
        logp += static_cast<double>(counts[i]) * std::log(probs[i]) - log_factorial(counts[i]);
    }
    return std::exp(logp);
}

inline void enumerate_source_flows(
    std::int64_t budget, std::size_t slot, std::vector<std::int64_t>& flows,
    const std::function<void(const std::vector<std::int64_t>&)>& emit) {
    if (slot + 1 == flows.size()) {
        flows[slot] = budget;
        emit(flows);
        return;
    }
    for (std::int64_t f = 0; f <= budget; ++f) {
        flows[slot] = f;
        enumerate_source_flows(budget - f, slot + 1, flows, emit);
    }
}

}  // namespace detail

/// Exact next-configuration distribution of one two-choices round, as the
/// convolution of independent per-source multinomial flow laws. Guarded to
/// n <= 8, k <= 3.
inline TransitionDistribution exact_transition(const Configuration& cfg) {
    if (cfg.n() > 8 || cfg.k() > 3)
        throw std::invalid_argument("exact_transition: enumeration guard (n <= 8, k <= 3)");
    const std::size_t k = cfg.k();
    const double n = static_cast<double>(cfg.n());

    // per-source outcome space: destinations j != i, then "stay"
    TransitionDistribution result;
    std::map<std::vector<std::int64_t>, double> current;
    current.emplace(std::vector<std::int64_t>(cfg.counts().begin(), cfg.counts().end()), 1.0);

    for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t ci = cfg.count(i);
        if (ci == 0) continue;
        std::vector<double> probs;
        std::vector<std::size_t> dests;
        double away = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            const double cj = static_cast<double>(cfg.count(j));
            probs.push_back(cj * cj / (n * n));
            dests.push_back(j);
            away += probs.back();
        }
        probs.push_back(1.0 - away);  // stay

        std::map<std::vector<std::int64_t>, double> next;
        std::vector<std::int64_t> flows(probs.size(), 0);
        detail::enumerate_source_flows(
            ci, 0, flows, [&](const std::vector<std::int64_t>& f) {
                const double p = detail::multinomial_pmf(ci, f, probs);
                if (p == 0.0) return;
                for (const auto& [counts, q] : current) {
                    auto moved = counts;
                    for (std::size_t d = 0; d < dests.size(); ++d) {
                        moved[i] -= f[d];
                        moved[dests[d]] += f[d];
                    }
                    next[moved] += q * p;
                }
            });
        current = std::move(next);
    }
    result.probabilities = std::move(current);
    return result;
}

/// True iff E[c'] is monotone in the current counts (always holds).
inline bool monotonicity_check(const Configuration& cfg) {
    const auto expect = expected_next_all(cfg);
    for (std::size_t r = 0; r < cfg.k(); ++r)
        for (std::size_t s = 0; s < cfg.k(); ++s)
            if (cfg.count(r) <= cfg.count(s) && expect[r] > expect[s] + 1e-9 * cfg.n())
                return false;
    return true;
}

}  // namespace votesim::oracle
