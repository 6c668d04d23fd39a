#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "votesim/agent.hpp"
#include "votesim/aggregate.hpp"
#include "votesim/core.hpp"
#include "votesim/oracle.hpp"
#include "votesim/stats.hpp"

namespace votesim::harness {

enum class Protocol { TwoChoices, Memory, Async };
enum class Engine { Agent, Aggregate };

inline std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::TwoChoices: return "two-choices";
        case Protocol::Memory: return "memory";
        case Protocol::Async: return "async";
    }
    return "?";
}

inline std::string to_string(Engine e) {
    return e == Engine::Agent ? "agent" : "aggregate";
}

/// Initial-configuration builders covering the experiment setups: equal
/// counts plus a bias on color 0, the two adversarial constructions, or an
/// explicit count vector.
struct Initializer {
    enum class Kind { EqualPlusBias, Theorem3, Theorem4, Custom };

    Kind kind = Kind::EqualPlusBias;
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::int64_t bias = 0;   // equal-plus-bias
    double z = 0.0;          // theorem3 (z') and theorem4 (z)
    std::vector<std::int64_t> counts;  // custom

    static Initializer equal_plus_bias(std::int64_t n, std::int64_t k, std::int64_t bias) {
        return {Kind::EqualPlusBias, n, k, bias, 0.0, {}};
    }
    static Initializer theorem3(std::int64_t n, std::int64_t k, double z_prime) {
        return {Kind::Theorem3, n, k, 0, z_prime, {}};
    }
    static Initializer theorem4(std::int64_t n, std::int64_t k, double z) {
        return {Kind::Theorem4, n, k, 0, z, {}};
    }
    static Initializer custom(std::vector<std::int64_t> counts) {
        return {Kind::Custom, 0, 0, 0, 0.0, std::move(counts)};
    }

    [[nodiscard]] Configuration build() const {
        switch (kind) {
            case Kind::EqualPlusBias: {
                if (k < 1 || n < 1) throw std::invalid_argument("initializer: need n, k >= 1");
                // c1 = ceil(n/k) + bias, remainder split maximally equally
                const std::int64_t c1 = (n + k - 1) / k + bias;
                const std::int64_t rest = n - c1;
                if (c1 < 1 || (k > 1 && rest < 0))
                    throw std::invalid_argument("initializer: infeasible bias");
                std::vector<std::int64_t> cnts(static_cast<std::size_t>(k), 0);
                cnts[0] = c1;
                if (k > 1) {
                    const std::int64_t base = rest / (k - 1);
                    std::int64_t extra = rest % (k - 1);
                    if (base < 0) throw std::invalid_argument("initializer: infeasible bias");
                    for (std::size_t j = 1; j < cnts.size(); ++j) {
                        cnts[j] = base + (extra > 0 ? 1 : 0);
                        if (extra > 0) --extra;
                    }
                }
                return Configuration(std::move(cnts));
            }
            case Kind::Theorem3: return oracle::theorem3_configuration(n, k, z);
            case Kind::Theorem4: return oracle::theorem4_configuration(n, k, z);
            case Kind::Custom: return Configuration(counts);
        }
        throw std::logic_error("initializer: unknown kind");
    }

    /// Color expected to win; all builders place the plurality at index 0
    /// except custom inputs.
    [[nodiscard]] std::size_t target_color() const {
        if (kind == Kind::Custom) return Configuration(counts).largest_color();
        return 0;
    }
};

struct ExperimentSpec {
    Protocol protocol = Protocol::TwoChoices;
    Engine engine = Engine::Aggregate;
    Initializer initializer;
    std::int64_t trials = 1;
    std::uint64_t seed = 1;
    ProtocolParams params;
    bool record_trajectory = false;
    int threads = 1;

    void validate() const {
        params.validate();
        if (trials < 1) throw std::invalid_argument("spec: trials must be >= 1");
        if (protocol == Protocol::Async && engine != Engine::Agent)
            throw std::invalid_argument("spec: async protocol requires the agent engine");
        initializer.build();  // fail before any trial runs
    }
};

struct TrajectoryRow {
    std::int64_t round = 0;
    double x1_over_x = std::nan("");  // undefined when x(t) = 0
    double a_over_n = 0.0;
    bool phase_end = false;
};

struct TrialRecord {
    std::int64_t trial = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> winner;
    std::int64_t rounds = 0;                   // ticks for async
    std::optional<double> time_units;          // async only: ticks / n
    bool converged = false;
    std::vector<TrajectoryRow> trajectory;
};

struct SweepCell {
    std::int64_t trials = 0;
    double mean_rounds = 0.0;
    double median_rounds = 0.0;
    double std_rounds = 0.0;
    double win_rate = 0.0;
    stats::Interval win_ci;
};

namespace detail {

inline std::vector<TrajectoryRow> extract_trajectory(const std::vector<RoundReport>& reports,
                                                     std::size_t target, std::int64_t n) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(reports.size());
    for (const auto& rep : reports) {
        TrajectoryRow row;
        row.round = rep.round;
        row.a_over_n = static_cast<double>(rep.config.count(target)) / static_cast<double>(n);
        row.phase_end = rep.phase_end;
        if (rep.bits_set > 0 && target < rep.bits_per_color.size())
            row.x1_over_x = static_cast<double>(rep.bits_per_color[target]) /
                            static_cast<double>(rep.bits_set);
        rows.push_back(row);
    }
    return rows;
}

inline TrialRecord run_trial(const ExperimentSpec& spec, const Configuration& initial,
                             std::size_t target, std::int64_t trial) {
    RngStream trial_rng = RngStream(spec.seed).substream(static_cast<std::uint64_t>(trial));
    TrialRecord rec;
    rec.trial = trial;
    rec.seed = spec.seed;

    if (spec.protocol == Protocol::Async) {
        auto pop = AgentPopulation::from_configuration(initial);
        agent::AsyncOptions opts{true, spec.params.sample_includes_self};
        auto res = agent::run_async_protocol(std::move(pop), trial_rng, opts);
        rec.rounds = res.ticks;
        rec.time_units = static_cast<double>(res.ticks) / static_cast<double>(initial.n());
        rec.converged = res.converged;
        if (res.converged) rec.winner = res.population.to_configuration().unanimous_color();
        return rec;
    }

    RunResult result{initial, {}, 0, false};
    if (spec.engine == Engine::Aggregate) {
        const auto proto = spec.protocol == Protocol::Memory
                               ? aggregate::AggProtocol::Memory
                               : aggregate::AggProtocol::TwoChoices;
        result = aggregate::run_protocol_agg(initial, proto, spec.params, trial_rng,
                                             spec.record_trajectory);
    } else {
        auto pop = AgentPopulation::from_configuration(initial);
        auto [_, res] = spec.protocol == Protocol::Memory
                            ? agent::run_memory_protocol(std::move(pop), spec.params, trial_rng,
                                                         spec.record_trajectory)
                            : agent::run_two_choices(std::move(pop), spec.params, trial_rng,
                                                     spec.record_trajectory);
        result = std::move(res);
    }
    rec.rounds = result.rounds;
    rec.converged = result.converged;
    if (result.converged) rec.winner = result.final_config.unanimous_color();
    if (spec.record_trajectory)
        rec.trajectory = extract_trajectory(result.reports, target, initial.n());
    return rec;
}

}  // namespace detail

/// Run spec.trials independent trials with per-trial substreams of
/// spec.seed. Deterministic and order-independent under any thread count.
inline std::vector<TrialRecord> run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const Configuration initial = spec.initializer.build();
    const std::size_t target = spec.initializer.target_color();

    std::vector<TrialRecord> records(static_cast<std::size_t>(spec.trials));
    const int threads = std::max(1, spec.threads);
    if (threads == 1 || spec.trials == 1) {
        for (std::int64_t t = 0; t < spec.trials; ++t)
            records[static_cast<std::size_t>(t)] = detail::run_trial(spec, initial, target, t);
        return records;
    }

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::int64_t t = w; t < spec.trials; t += threads)
                records[static_cast<std::size_t>(t)] = detail::run_trial(spec, initial, target, t);
        });
    }
    for (auto& th : pool) th.join();
    return records;
}

/// Aggregate statistics over one batch of trials.
inline SweepCell summarize(const std::vector<TrialRecord>& records, std::size_t target_color) {
    if (records.empty()) throw std::invalid_argument("summarize: empty record list");
    std::vector<double> rounds;
    rounds.reserve(records.size());
    std::int64_t wins = 0;
    for (const auto& rec : records) {
        rounds.push_back(static_cast<double>(rec.rounds));
        if (rec.converged && rec.winner == target_color) ++wins;
    }
    SweepCell cell;
    cell.trials = static_cast<std::int64_t>(records.size());
    cell.mean_rounds = stats::mean(rounds);
    cell.median_rounds = stats::median(rounds);
    cell.std_rounds = stats::sample_stddev(rounds);
    cell.win_rate = static_cast<double>(wins) / static_cast<double>(records.size());
    cell.win_ci = stats::wilson_interval(wins, cell.trials);
    return cell;
}

inline std::vector<std::pair<ExperimentSpec, SweepCell>> sweep(
    const std::vector<ExperimentSpec>& grid) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    std::vector<std::pair<ExperimentSpec, SweepCell>> out;
    out.reserve(grid.size());
    for (const auto& spec : grid) {
        const auto records = run_experiment(spec);
        out.emplace_back(spec, summarize(records, spec.initializer.target_color()));
    }
    return out;
}

struct EngineComparison {
    double chi_square_p = 1.0;  // one-round outcome bins
    double ks_p = 1.0;          // rounds-to-convergence distributions
};

namespace detail {

/// Bin samples of the next largest-color count into shared bins with
/// expected mass >= 5 per bin, from pooled deciles.
inline std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> bin_pair(
    const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    std::vector<std::int64_t> pooled = a;
    pooled.insert(pooled.end(), b.begin(), b.end());
    std::ranges::sort(pooled);
    std::vector<std::int64_t> edges;  // right-inclusive bin upper edges
    const std::size_t bins = 20;
    for (std::size_t q = 1; q < bins; ++q) {
        const auto e = pooled[pooled.size() * q / bins];
        if (edges.empty() || e > edges.back()) edges.push_back(e);
    }
    auto count_bins = [&](const std::vector<std::int64_t>& xs) {
        std::vector<std::int64_t> counts(edges.size() + 1, 0);
        for (const auto x : xs) {
            const auto it = std::ranges::lower_bound(edges, x);
            ++counts[static_cast<std::size_t>(it - edges.begin())];
        }
        return counts;
    };
    return {count_bins(a), count_bins(b)};
}

}  // namespace detail

/// Statistical agreement of the two engines on the same kernel: chi-square on
/// binned one-round outcomes and two-sample KS on rounds to convergence.
inline EngineComparison compare_engines(const Configuration& cfg, std::int64_t trials,
                                        std::uint64_t seed, const ProtocolParams& params = {}) {
    if (cfg.n() > 10000)
        throw std::invalid_argument("compare_engines: agent engine guard (n <= 10^4)");
    RngStream base(seed);
    const std::size_t top = cfg.largest_color();

    std::vector<std::int64_t> one_round_agent;
    std::vector<std::int64_t> one_round_agg;
    std::vector<double> rounds_agent;
    std::vector<double> rounds_agg;
    one_round_agent.reserve(static_cast<std::size_t>(trials));
    one_round_agg.reserve(static_cast<std::size_t>(trials));
    const auto pop0 = AgentPopulation::from_configuration(cfg);
    for (std::int64_t t = 0; t < trials; ++t) {
        RngStream r1 = base.substream(1, static_cast<std::uint64_t>(t));
        RngStream r2 = base.substream(2, static_cast<std::uint64_t>(t));
        auto next_pop = agent::two_choices_round(pop0, r1, params.sample_includes_self);
        one_round_agent.push_back(next_pop.to_configuration().count(top));
        one_round_agg.push_back(aggregate::two_choices_round_agg(cfg, r2).count(top));
    }
    for (std::int64_t t = 0; t < trials; ++t) {
        RngStream r1 = base.substream(3, static_cast<std::uint64_t>(t));
        RngStream r2 = base.substream(4, static_cast<std::uint64_t>(t));
        auto [_, res] = agent::run_two_choices(pop0, params, r1, false);
        rounds_agent.push_back(static_cast<double>(res.rounds));
        rounds_agg.push_back(static_cast<double>(
            aggregate::run_protocol_agg(cfg, aggregate::AggProtocol::TwoChoices, params, r2, false)
                .rounds));
    }

    EngineComparison cmp;
    const auto [bins_a, bins_b] = detail::bin_pair(one_round_agent, one_round_agg);
    cmp.chi_square_p = stats::chi_square_homogeneity(bins_a, bins_b);
    cmp.ks_p = stats::ks_two_sample(std::move(rounds_agent), std::move(rounds_agg));
    return cmp;
}

/// Per-round relative bit share of the target color and relative size of the
/// plurality, for one memory-protocol trial.
inline std::vector<TrajectoryRow> trajectory_bits(ExperimentSpec spec) {
    if (spec.protocol != Protocol::Memory)
        throw std::invalid_argument("trajectory_bits: memory protocol required");
    spec.record_trajectory = true;
    spec.trials = 1;
    const auto records = run_experiment(spec);
    return records.front().trajectory;
}

}  // namespace votesim::harness
