#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "votesim/core.hpp"
#include "votesim/report.hpp"
#include "votesim/rng.hpp"
#include "votesim/sampling.hpp"
#include "votesim/schedule.hpp"

namespace votesim::aggregate {

namespace detail {

// Outcome probabilities are accumulated in double precision; the residual
// "stay" entry is defined as 1 minus the partial sum so the vector is exactly
// normalized.
inline double residual(double partial_sum) { return partial_sum < 1.0 ? 1.0 - partial_sum : 0.0; }

inline std::vector<std::int64_t> draw_flows(std::int64_t m, const std::vector<double>& probs,
                                            RngStream& rng) {
    std::vector<std::int64_t> counts(probs.size(), 0);
    std::int64_t remaining = m;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        const double cond = mass_left > 0.0 ? std::min(probs[i] / mass_left, 1.0) : 1.0;
        counts[i] = sample_binomial(remaining, cond, rng);
        remaining -= counts[i];
        mass_left -= probs[i];
    }
    counts.back() += remaining;
    return counts;
}

}  // namespace detail

/// One two-choices round drawn at flow granularity: the k x k matrix of
/// per-source multinomial flows, f[i][j] ~ B(c_i, c_j^2 / n^2) marginally.
/// The diagonal holds the nodes that kept their color.
inline std::vector<std::vector<std::int64_t>> two_choices_flows(const Configuration& cfg,
                                                                RngStream& rng) {
    const std::size_t k = cfg.k();
    const double n = static_cast<double>(cfg.n());
    std::vector<double> q(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double r = static_cast<double>(cfg.count(j)) / n;
        q[j] = r * r;
    }

    std::vector<std::vector<std::int64_t>> flows(k, std::vector<std::int64_t>(k, 0));
    for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t ci = cfg.count(i);
        if (ci == 0) continue;
        std::vector<double> probs;
        probs.reserve(k);
        double away = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            probs.push_back(q[j]);
            away += q[j];
        }
        probs.push_back(detail::residual(away));  // stay
        const auto drawn = detail::draw_flows(ci, probs, rng);
        std::size_t slot = 0;
        for (std::size_t j = 0; j < k; ++j) {
            if (j == i) continue;
            flows[i][j] = drawn[slot++];
        }
        flows[i][i] = drawn.back();
    }
    return flows;
}

/// Exact macroscopic two-choices round: column sums of the flow matrix.
inline Configuration two_choices_round_agg(const Configuration& cfg, RngStream& rng) {
    const auto flows = two_choices_flows(cfg, rng);
    std::vector<std::int64_t> counts(cfg.k(), 0);
    for (std::size_t i = 0; i < cfg.k(); ++i)
        for (std::size_t j = 0; j < cfg.k(); ++j) counts[j] += flows[i][j];
    return Configuration(std::move(counts));
}

/// Phase-opening memory round over classes: every node of color i lands in
/// (j, True) with probability c_j^2 / n^2 for each j, else stays (i, False).
inline AggregateState memory_two_choices_round_agg(const AggregateState& state, RngStream& rng) {
    const std::size_t k = state.k();
    const double n = static_cast<double>(state.n());
    std::vector<double> q(k);
    double total_q = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double r = static_cast<double>(state.color_count(j)) / n;
        q[j] = r * r;
        total_q += q[j];
    }

    AggregateState next;
    next.set_counts.assign(k, 0);
    next.unset_counts.assign(k, 0);
    std::vector<double> probs = q;
    probs.push_back(detail::residual(total_q));  // keep color, bit False
    for (std::size_t i = 0; i < k; ++i) {
        const std::int64_t ci = state.color_count(i);
        if (ci == 0) continue;
        const auto drawn = detail::draw_flows(ci, probs, rng);
        for (std::size_t j = 0; j < k; ++j) next.set_counts[j] += drawn[j];
        next.unset_counts[i] += drawn.back();
    }
    return next;
}

/// Bit-propagation round over classes: a node adopts (j, True) with
/// probability x_j / n, else keeps its class. The set-bit total never
/// decreases.
inline AggregateState bit_propagation_round_agg(const AggregateState& state, RngStream& rng) {
    const std::size_t k = state.k();
    const double n = static_cast<double>(state.n());
    std::vector<double> probs(k + 1);
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        probs[j] = static_cast<double>(state.set_counts[j]) / n;
        total += probs[j];
    }
    probs[k] = detail::residual(total);  // keep current class

    AggregateState next;
    next.set_counts.assign(k, 0);
    next.unset_counts.assign(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
        for (const bool bit_set : {false, true}) {
            const std::int64_t m = bit_set ? state.set_counts[i] : state.unset_counts[i];
            if (m == 0) continue;
            const auto drawn = detail::draw_flows(m, probs, rng);
            for (std::size_t j = 0; j < k; ++j) next.set_counts[j] += drawn[j];
            if (bit_set)
                next.set_counts[i] += drawn.back();
            else
                next.unset_counts[i] += drawn.back();
        }
    }
    return next;
}

enum class AggProtocol { TwoChoices, Memory };

namespace detail {

inline RoundReport make_report(std::int64_t round, const AggregateState& state,
                               bool phase_end = false) {
    auto cfg = state.to_configuration();
    RoundReport rep{round, cfg, state.x(), state.set_counts, cfg.unanimous(), phase_end};
    return rep;
}

}  // namespace detail

/// Same schedules and stopping rules as the per-node runners, executed over
/// aggregate state in O(k^2) work per round.
inline RunResult run_protocol_agg(const Configuration& cfg, AggProtocol protocol,
                                  const ProtocolParams& params, RngStream& rng,
                                  bool record_reports = true) {
    params.validate();
    RunResult result{cfg, {}, 0, false};
    if (cfg.unanimous()) {
        result.converged = true;
        if (record_reports)
            result.reports.push_back(
                detail::make_report(0, AggregateState::from_configuration(cfg)));
        return result;
    }

    if (protocol == AggProtocol::TwoChoices) {
        const auto cap = two_choices_cap(cfg.n(), static_cast<std::int64_t>(cfg.k()), params);
        Configuration current = cfg;
        for (std::int64_t t = 1; t <= cap; ++t) {
            RngStream round_rng = rng.substream(static_cast<std::uint64_t>(t));
            current = two_choices_round_agg(current, round_rng);
            result.rounds = t;
            result.converged = current.unanimous();
            result.final_config = current;
            if (record_reports)
                result.reports.push_back(
                    RoundReport{t, current, 0, {}, result.converged, false});
            if (result.converged) break;
        }
        return result;
    }

    const auto prop_rounds = propagation_rounds(cfg.n(), static_cast<std::int64_t>(cfg.k()), params);
    const auto phase_cap = memory_phase_cap(cfg, params);
    AggregateState state = AggregateState::from_configuration(cfg);
    std::int64_t round = 0;
    for (std::int64_t phase = 1; phase <= phase_cap && !result.converged; ++phase) {
        for (std::int64_t step = 0; step <= prop_rounds; ++step) {
            RngStream round_rng = rng.substream(static_cast<std::uint64_t>(round + 1));
            state = step == 0 ? memory_two_choices_round_agg(state, round_rng)
                              : bit_propagation_round_agg(state, round_rng);
            ++round;
            result.rounds = round;
            auto rep = detail::make_report(round, state, step == prop_rounds);
            result.converged = rep.converged;
            result.final_config = rep.config;
            if (record_reports) result.reports.push_back(std::move(rep));
            if (result.converged) break;
        }
    }
    return result;
}

}  // namespace votesim::aggregate
