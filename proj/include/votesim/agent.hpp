#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "votesim/core.hpp"
#include "votesim/report.hpp"
#include "votesim/rng.hpp"
#include "votesim/schedule.hpp"

namespace votesim::agent {

/// Draw stream for one node in one round. Every node draws from its own
/// substream, so the outcome of a synchronous round does not depend on the
/// order nodes are processed in.
inline RngStream node_stream(const RngStream& round_rng, std::uint64_t node) {
    return round_rng.substream(node);
}

namespace detail {

inline std::uint64_t sample_node(RngStream& rng, std::uint64_t n, std::uint64_t self,
                                 bool include_self) {
    if (include_self) return rng.below(n);
    std::uint64_t u = rng.below(n - 1);
    if (u >= self) ++u;
    return u;
}

}  // namespace detail

/// One synchronous two-choices round: every node samples two nodes from the
/// previous state and adopts their color iff the samples coincide.
inline AgentPopulation two_choices_round(const AgentPopulation& pop, RngStream& rng,
                                         bool include_self = true) {
    const auto n = static_cast<std::uint64_t>(pop.n());
    AgentPopulation next = pop;
    for (std::uint64_t v = 0; v < n; ++v) {
        RngStream node_rng = node_stream(rng, v);
        const std::uint64_t u1 = detail::sample_node(node_rng, n, v, include_self);
        const std::uint64_t u2 = detail::sample_node(node_rng, n, v, include_self);
        if (pop.colors[u1] == pop.colors[u2]) next.colors[v] = pop.colors[u1];
    }
    return next;
}

/// Phase-opening round of the memory protocol: colors update as in the
/// two-choices round and every node's bit is freshly assigned (True iff its
/// samples coincided).
inline AgentPopulation memory_two_choices_round(const AgentPopulation& pop, RngStream& rng,
                                                bool include_self = true) {
    const auto n = static_cast<std::uint64_t>(pop.n());
    AgentPopulation next = pop;
    for (std::uint64_t v = 0; v < n; ++v) {
        RngStream node_rng = node_stream(rng, v);
        const std::uint64_t u1 = detail::sample_node(node_rng, n, v, include_self);
        const std::uint64_t u2 = detail::sample_node(node_rng, n, v, include_self);
        if (pop.colors[u1] == pop.colors[u2]) {
            next.colors[v] = pop.colors[u1];
            next.bits[v] = 1;
        } else {
            next.bits[v] = 0;
        }
    }
    return next;
}

/// Bit-propagation round: each node samples one node; if its bit is set, the
/// node adopts that color and sets its own bit. Bits are never cleared here.
inline AgentPopulation bit_propagation_round(const AgentPopulation& pop, RngStream& rng,
                                             bool include_self = true) {
    const auto n = static_cast<std::uint64_t>(pop.n());
    AgentPopulation next = pop;
    for (std::uint64_t v = 0; v < n; ++v) {
        RngStream node_rng = node_stream(rng, v);
        const std::uint64_t u = detail::sample_node(node_rng, n, v, include_self);
        if (pop.bits[u]) {
            next.colors[v] = pop.colors[u];
            next.bits[v] = 1;
        }
    }
    return next;
}

namespace detail {

inline RoundReport make_report(std::int64_t round, const AgentPopulation& pop, bool memory_mode,
                               bool phase_end = false) {
    auto cfg = pop.to_configuration();
    RoundReport rep{round, cfg, 0, {}, cfg.unanimous(), phase_end};
    if (memory_mode) {
        rep.bits_set = pop.bits_set();
        rep.bits_per_color = pop.bits_per_color();
    }
    return rep;
}

}  // namespace detail

/// Algorithm-1 runner: iterate two-choices rounds until unanimity or the
/// round cap. A capped run is flagged, not an error.
inline std::pair<AgentPopulation, RunResult> run_two_choices(AgentPopulation pop,
                                                             const ProtocolParams& params,
                                                             RngStream& rng,
                                                             bool record_reports = true) {
    params.validate();
    const std::int64_t n = pop.n();
    const auto cap = two_choices_cap(n, pop.k, params);
    RunResult result{pop.to_configuration(), {}, 0, false};
    if (result.final_config.unanimous()) {
        result.converged = true;
        if (record_reports) result.reports.push_back(detail::make_report(0, pop, false));
        return {std::move(pop), std::move(result)};
    }
    for (std::int64_t t = 1; t <= cap; ++t) {
        RngStream round_rng = rng.substream(static_cast<std::uint64_t>(t));
        pop = two_choices_round(pop, round_rng, params.sample_includes_self);
        result.rounds = t;
        auto rep = detail::make_report(t, pop, false);
        result.converged = rep.converged;
        result.final_config = rep.config;
        if (record_reports) result.reports.push_back(std::move(rep));
        if (result.converged) break;
    }
    return {std::move(pop), std::move(result)};
}

/// Algorithm-2 runner: phases of one two-choices round plus a fixed number of
/// bit-propagation rounds, stopping at unanimity or the phase cap.
inline std::pair<AgentPopulation, RunResult> run_memory_protocol(AgentPopulation pop,
                                                                 const ProtocolParams& params,
                                                                 RngStream& rng,
                                                                 bool record_reports = true) {
    params.validate();
    const std::int64_t n = pop.n();
    const Configuration initial = pop.to_configuration();
    const auto prop_rounds = propagation_rounds(n, pop.k, params);
    const auto phase_cap = memory_phase_cap(initial, params);

    RunResult result{initial, {}, 0, false};
    if (initial.unanimous()) {
        result.converged = true;
        if (record_reports) result.reports.push_back(detail::make_report(0, pop, true));
        return {std::move(pop), std::move(result)};
    }

    std::int64_t round = 0;
    for (std::int64_t phase = 1; phase <= phase_cap && !result.converged; ++phase) {
        for (std::int64_t step = 0; step <= prop_rounds; ++step) {
            RngStream round_rng = rng.substream(static_cast<std::uint64_t>(round + 1));
            pop = step == 0 ? memory_two_choices_round(pop, round_rng, params.sample_includes_self)
                            : bit_propagation_round(pop, round_rng, params.sample_includes_self);
            ++round;
            result.rounds = round;
            auto rep = detail::make_report(round, pop, true, step == prop_rounds);
            result.converged = rep.converged;
            result.final_config = rep.config;
            if (record_reports) result.reports.push_back(std::move(rep));
            if (result.converged) break;
        }
    }
    return {std::move(pop), std::move(result)};
}

struct AsyncOptions {
    bool stop_on_unanimity = true;
    bool include_self = true;
};

struct AsyncResult {
    AgentPopulation population;
    std::int64_t ticks = 0;  // total node activations; 1 time unit = n activations
    bool converged = false;
    bool all_halted = false;
    std::vector<std::int64_t> instructions_executed;  // per node
};

/// Algorithm-3 runner, sequentialized: a uniformly random node executes its
/// next instruction against the current global state. Each node's program is
/// 10 ceil(log2 n) phases of [two-choices step, 2 propagation ticks].
inline AsyncResult run_async_protocol(AgentPopulation pop, RngStream& rng,
                                      const AsyncOptions& options = {}) {
    const auto n = static_cast<std::uint64_t>(pop.n());
    const std::int64_t program_length = async_instructions_per_node(pop.n());

    std::vector<std::int64_t> pc(n, 0);  // instruction index; phase = pc / 3, step = pc % 3
    std::vector<std::int64_t> counts(pop.k, 0);
    for (const auto c : pop.colors) ++counts[c];
    std::int64_t max_count = *std::ranges::max_element(counts);

    AsyncResult result{std::move(pop), 0, false, false, std::vector<std::int64_t>(n, 0)};
    std::uint64_t halted = 0;

    auto adopt = [&](std::uint64_t v, std::uint32_t color) {
        --counts[result.population.colors[v]];
        result.population.colors[v] = color;
        max_count = std::max(max_count, ++counts[color]);
    };

    result.converged = max_count == static_cast<std::int64_t>(n);
    while (!(options.stop_on_unanimity && result.converged) && halted < n) {
        const std::uint64_t v = rng.below(n);
        ++result.ticks;
        if (pc[v] >= program_length) continue;
        RngStream node_rng = rng.substream(static_cast<std::uint64_t>(result.ticks));
        if (pc[v] % 3 == 0) {
            const std::uint64_t u1 = detail::sample_node(node_rng, n, v, options.include_self);
            const std::uint64_t u2 = detail::sample_node(node_rng, n, v, options.include_self);
            if (result.population.colors[u1] == result.population.colors[u2]) {
                adopt(v, result.population.colors[u1]);
                result.population.bits[v] = 1;
            } else {
                result.population.bits[v] = 0;
            }
        } else {
            const std::uint64_t u = detail::sample_node(node_rng, n, v, options.include_self);
            if (result.population.bits[u]) {
                adopt(v, result.population.colors[u]);
                result.population.bits[v] = 1;
            }
        }
        ++result.instructions_executed[v];
        if (++pc[v] == program_length) ++halted;
        result.converged = max_count == static_cast<std::int64_t>(n);
    }
    result.all_halted = halted == n;
    return result;
}

}  // namespace votesim::agent
