#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <stdexcept>
#include <string_view>
#include <thread>
#include <vector>

#include "d2dsim/admission.hpp"
#include "d2dsim/channel.hpp"
#include "d2dsim/config.hpp"
#include "d2dsim/policy.hpp"
#include "d2dsim/rng.hpp"

namespace d2dsim {

enum class PolicyKind : std::uint8_t { Proposed = 0, AllNoma = 1, AllOma = 2, Random = 3 };

inline constexpr PolicyKind kAllPolicies[] = {PolicyKind::Proposed, PolicyKind::AllNoma,
                                              PolicyKind::AllOma, PolicyKind::Random};

constexpr std::string_view to_string(PolicyKind p) noexcept
{
    switch (p) {
    case PolicyKind::Proposed:
        return "proposed";
    case PolicyKind::AllNoma:
        return "all-noma";
    case PolicyKind::AllOma:
        return "all-oma";
    case PolicyKind::Random:
        return "random";
    }
    return "?";
}

inline PolicyKind parse_policy(std::string_view s)
{
    for (const auto p : kAllPolicies) {
        if (to_string(p) == s) {
            return p;
        }
    }
    throw std::invalid_argument("unknown policy '" + std::string(s) + "'");
}

struct SlotResult {
    std::uint32_t slot = 0;
    double revenue = 0.0;
    double r_max = 0.0;
    double eta = 0.0;
    std::size_t admitted_count = 0;
    std::size_t active_due = 0;
    // Assignments that failed the post-admission C1/C2 or capacity check.
    std::size_t constraint_violations = 0;

    bool operator==(const SlotResult&) const = default;
};

struct EpisodeResult {
    PolicyKind policy = PolicyKind::Proposed;
    std::vector<SlotResult> per_slot;
    std::vector<double> cumulative_revenue;
    std::vector<double> cumulative_eta;

    std::size_t constraint_violations() const
    {
        std::size_t total = 0;
        for (const auto& s : per_slot) {
            total += s.constraint_violations;
        }
        return total;
    }

    bool operator==(const EpisodeResult&) const = default;
};

/// Poisson number of new D2D pairs this slot.
inline std::size_t spawn_arrivals(Rng& rng, double rate)
{
    if (!(rate >= 0.0)) {
        throw std::invalid_argument("spawn_arrivals: rate must be >= 0");
    }
    if (rate == 0.0) {
        return 0;
    }
    return static_cast<std::size_t>(std::poisson_distribution<std::uint64_t>(rate)(rng));
}

/// Policy-independent part of an episode: geometry, path loss and the channel
/// random stream. Each advance() yields one slot's gains.
class ChannelState {
  public:
    ChannelState(const SimConfig& config, Rng rng) : rng_(std::move(rng))
    {
        topology_ = place_topology(config, rng_);
        path_loss_ = path_loss_table(topology_, config);
    }

    const Topology& topology() const noexcept { return topology_; }

    /// Departures, arrivals, then fresh fading on every link.
    GainTable advance(const SimConfig& config)
    {
        const double leave = config.experiment.due_departure_prob;
        if (leave > 0.0 && !topology_.pairs.empty()) {
            std::bernoulli_distribution departs(leave);
            std::vector<D2dPair> kept;
            kept.reserve(topology_.pairs.size());
            for (const auto& pair : topology_.pairs) {
                if (!departs(rng_)) {
                    kept.push_back(pair);
                }
            }
            if (kept.size() != topology_.pairs.size()) {
                topology_.pairs = std::move(kept);
                path_loss_ = path_loss_table(topology_, config);
            }
        }
        const std::size_t arrivals = spawn_arrivals(rng_, config.experiment.due_arrival_rate);
        for (std::size_t a = 0; a < arrivals; ++a) {
            topology_.pairs.push_back(place_pair(config, topology_.bs, rng_));
        }
        if (arrivals > 0) {
            path_loss_.extend_path_loss(topology_, config);
        }
        return path_loss_.with_fading(rng_);
    }

  private:
    Rng rng_;
    Topology topology_;
    GainTable path_loss_;
};

/// Mode-selection state for one policy within an episode.
class PolicyState {
  public:
    PolicyState(PolicyKind kind, const SimConfig& config, Rng rng)
        : kind_(kind), rng_(std::move(rng)),
          threshold_(compute_threshold(config.bandit, config.econ)),
          bandits_(config.experiment.num_cue_m, initial_bandit_state(config.bandit))
    {
    }

    PolicyKind kind() const noexcept { return kind_; }
    const std::vector<BanditState>& bandits() const noexcept { return bandits_; }

    /// Modes to play this slot; advances per-C-UE state.
    std::vector<Mode> next_modes(const SimConfig& config)
    {
        std::vector<Mode> modes(bandits_.size());
        for (std::size_t i = 0; i < bandits_.size(); ++i) {
            switch (kind_) {
            case PolicyKind::Proposed:
                modes[i] = bandits_[i].mode;
                bandits_[i] = step_bandit(bandits_[i], config.bandit, threshold_);
                break;
            case PolicyKind::AllNoma:
                modes[i] = baseline_mode(BaselineKind::AllNoma, rng_);
                break;
            case PolicyKind::AllOma:
                modes[i] = baseline_mode(BaselineKind::AllOma, rng_);
                break;
            case PolicyKind::Random:
                modes[i] = baseline_mode(BaselineKind::Random, rng_);
                break;
            }
        }
        return modes;
    }

  private:
    PolicyKind kind_;
    Rng rng_;
    Threshold threshold_;
    std::vector<BanditState> bandits_;
};

/// Mode selection, admission and revenue accounting for one slot, given the
/// slot's gains.
inline SlotResult play_slot(std::uint32_t slot, PolicyState& policy, const GainTable& gains,
                            const SimConfig& config)
{
    const auto modes = policy.next_modes(config);
    const auto admission = greedy_admit(modes, gains, config);
    const auto& asg = admission.assignment;

    SlotResult r;
    r.slot = slot;
    r.active_due = gains.num_due();
    r.admitted_count = asg.admitted_count();
    r.revenue = revenue_rate(asg, config.econ) * config.econ.slot_duration;
    r.r_max = static_cast<double>(r.active_due) * config.econ.phi_noma * config.econ.slot_duration;
    r.eta = r.r_max > 0.0 ? r.revenue / r.r_max : 0.0;
    if (!is_feasible(asg, gains, config) || !respects_capacity(asg, config)) {
        ++r.constraint_violations;
    }
    return r;
}

/// One policy's slot loop over a shared channel.
struct EpisodeState {
    ChannelState channel;
    PolicyState policy;
    std::uint32_t slot = 0;
};

inline EpisodeState make_episode_state(const SimConfig& config, PolicyKind policy,
                                       std::uint64_t seed, std::uint64_t rep)
{
    return EpisodeState{
        ChannelState(config, make_rng(seed, rep, StreamTag::Channel)),
        PolicyState(policy, config,
                    make_rng(seed, rep, StreamTag::Policy, static_cast<std::uint64_t>(policy))),
        0};
}

inline SlotResult run_slot(EpisodeState& state, const SimConfig& config)
{
    const auto gains = state.channel.advance(config);
    return play_slot(state.slot++, state.policy, gains, config);
}

namespace detail {

inline void finish_episode(EpisodeResult& ep)
{
    ep.cumulative_revenue.reserve(ep.per_slot.size());
    ep.cumulative_eta.reserve(ep.per_slot.size());
    double rev = 0.0;
    double rmax = 0.0;
    for (const auto& s : ep.per_slot) {
        rev += s.revenue;
        rmax += s.r_max;
        ep.cumulative_revenue.push_back(rev);
        ep.cumulative_eta.push_back(rmax > 0.0 ? rev / rmax : 0.0);
    }
}

} // namespace detail

/// Runs several policies in lockstep over one channel realization, so every
/// policy sees identical topology, arrivals and fading. Results equal those
/// of running each policy alone with run_episode.
inline std::vector<EpisodeResult> run_episodes(const SimConfig& config,
                                               std::span<const PolicyKind> policies,
                                               std::uint64_t seed, std::uint64_t rep = 0)
{
    ChannelState channel(config, make_rng(seed, rep, StreamTag::Channel));
    std::vector<PolicyState> states;
    std::vector<EpisodeResult> results(policies.size());
    states.reserve(policies.size());
    for (std::size_t p = 0; p < policies.size(); ++p) {
        states.emplace_back(policies[p], config,
                            make_rng(seed, rep, StreamTag::Policy,
                                     static_cast<std::uint64_t>(policies[p])));
        results[p].policy = policies[p];
        results[p].per_slot.reserve(config.experiment.num_slots);
    }
    for (std::uint32_t t = 0; t < config.experiment.num_slots; ++t) {
        const auto gains = channel.advance(config);
        for (std::size_t p = 0; p < policies.size(); ++p) {
            results[p].per_slot.push_back(play_slot(t, states[p], gains, config));
        }
    }
    for (auto& r : results) {
        detail::finish_episode(r);
    }
    return results;
}

inline EpisodeResult run_episode(const SimConfig& config, PolicyKind policy, std::uint64_t seed,
                                 std::uint64_t rep = 0)
{
    const PolicyKind one[] = {policy};
    return std::move(run_episodes(config, one, seed, rep).front());
}

/// Mean and sample standard deviation of cumulative eta per slot.
struct PolicySeries {
    PolicyKind policy = PolicyKind::Proposed;
    std::vector<double> mean_cum_eta;
    std::vector<double> std_cum_eta;

    double final_mean() const { return mean_cum_eta.empty() ? 0.0 : mean_cum_eta.back(); }
    double final_std() const { return std_cum_eta.empty() ? 0.0 : std_cum_eta.back(); }

    bool operator==(const PolicySeries&) const = default;
};

struct McSummary {
    std::vector<PolicySeries> series;
    std::uint32_t reps = 0;
    std::uint32_t num_slots = 0;
    // Totals over every slot of every episode.
    std::size_t constraint_violations = 0;
    std::size_t normalization_violations = 0;
    std::size_t slots_simulated = 0;

    double final_standard_error(std::size_t p) const
    {
        return reps > 0 ? series.at(p).final_std() / std::sqrt(static_cast<double>(reps)) : 0.0;
    }

    bool operator==(const McSummary&) const = default;
};

/// Runs num_reps repetitions of every listed policy and aggregates them in
/// repetition order. `threads` only changes the schedule, never the result.
inline McSummary run_monte_carlo(const SimConfig& config, std::span<const PolicyKind> policies,
                                 unsigned threads = 1)
{
    const std::uint32_t reps = config.experiment.num_reps;
    const std::uint32_t slots = config.experiment.num_slots;
    if (reps < 1) {
        throw std::invalid_argument("run_monte_carlo: num_reps must be >= 1");
    }
    const std::size_t np = policies.size();

    // cum_eta[rep][policy][slot]
    std::vector<std::vector<std::vector<double>>> cum_eta(reps);
    std::vector<std::size_t> violations(reps, 0);
    std::vector<std::size_t> bad_norm(reps, 0);

    std::atomic<std::uint32_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (std::uint32_t rep = next++; rep < reps; rep = next++) {
                auto eps = run_episodes(config, policies, config.experiment.seed, rep);
                auto& row = cum_eta[rep];
                row.reserve(np);
                for (auto& ep : eps) {
                    violations[rep] += ep.constraint_violations();
                    for (const auto& s : ep.per_slot) {
                        if (!(s.eta >= 0.0 && s.eta <= 1.0) || s.revenue > s.r_max) {
                            ++bad_norm[rep];
                        }
                    }
                    row.push_back(std::move(ep.cumulative_eta));
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next = reps;
        }
    };

    const unsigned nthreads = std::max(1u, std::min<unsigned>(threads, reps));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(nthreads);
        for (unsigned t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    McSummary summary;
    summary.reps = reps;
    summary.num_slots = slots;
    summary.slots_simulated = static_cast<std::size_t>(reps) * slots * np;
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
        summary.constraint_violations += violations[rep];
        summary.normalization_violations += bad_norm[rep];
    }
    summary.series.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
        auto& s = summary.series[p];
        s.policy = policies[p];
        s.mean_cum_eta.assign(slots, 0.0);
        s.std_cum_eta.assign(slots, 0.0);
        for (std::uint32_t t = 0; t < slots; ++t) {
            // Two-pass, in repetition order.
            double sum = 0.0;
            for (std::uint32_t rep = 0; rep < reps; ++rep) {
                sum += cum_eta[rep][p][t];
            }
            const double mean = sum / static_cast<double>(reps);
            double m2 = 0.0;
            for (std::uint32_t rep = 0; rep < reps; ++rep) {
                const double d = cum_eta[rep][p][t] - mean;
                m2 += d * d;
            }
            s.mean_cum_eta[t] = mean;
            s.std_cum_eta[t] = reps > 1 ? std::sqrt(m2 / static_cast<double>(reps - 1)) : 0.0;
        }
    }
    return summary;
}

} // namespace d2dsim
