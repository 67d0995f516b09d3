#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include "d2dsim/config.hpp"
#include "d2dsim/mode.hpp"
#include "d2dsim/rng.hpp"

namespace d2dsim {

/// Per-C-UE belief and the mode it plays in slot `slot`.
struct BanditState {
    double rho = 0.5;
    Mode mode = Mode::Noma;
    std::uint64_t slot = 0;

    bool operator==(const BanditState&) const = default;
};

/// Retirement threshold rho* and the ratio omega = r / beta it is built from.
struct Threshold {
    double rho_star = 1.0;
    double omega = 0.0;
};

inline BanditState initial_bandit_state(const BanditParams& bandit)
{
    return {bandit.initial_belief_rho0, bandit.initial_mode, 0};
}

/// rho* = omega*phi_oma / ((omega+1)(phi_noma - phi_oma) + omega*phi_oma).
///
/// Equal rates give rho* = 1: without a NOMA premium the risky arm is never
/// worth holding once the belief drops below certainty.
inline Threshold compute_threshold(const BanditParams& bandit, const EconomicParams& econ)
{
    if (!(bandit.intensity_beta > 0.0)) {
        throw std::invalid_argument("intensity_beta must be > 0");
    }
    if (!(econ.phi_oma > 0.0) || !(econ.phi_noma >= econ.phi_oma)) {
        throw std::invalid_argument("compute_threshold requires phi_noma >= phi_oma > 0");
    }
    const double omega = bandit.discounted_reward_r / bandit.intensity_beta;
    const double safe = omega * econ.phi_oma;
    const double denom = (omega + 1.0) * (econ.phi_noma - econ.phi_oma) + safe;
    // r = 0 and equal rates leave 0/0; no premium means retire immediately.
    const double rho_star = denom > 0.0 ? safe / denom : 1.0;
    return {rho_star, omega};
}

/// Belief after one slot in which `prev_action` was played:
/// odds(rho') = odds(rho) * exp(-A * beta * eps).
inline double update_belief(const BanditState& state, Mode prev_action, const BanditParams& bandit)
{
    const double decay = std::exp(-to_action(prev_action) * bandit.intensity_beta * bandit.time_step_eps);
    const double rho = state.rho;
    const double num = rho * decay;
    const double den = 1.0 - rho + num;
    if (den <= 0.0) {
        return rho;
    }
    return std::clamp(num / den, 0.0, 1.0);
}

/// NOMA iff rho >= rho*. Equality goes to NOMA.
inline Mode select_mode(double rho, const Threshold& threshold) noexcept
{
    return rho >= threshold.rho_star ? Mode::Noma : Mode::Oma;
}

/// Update the belief with the action just played, then pick the next action.
inline BanditState step_bandit(const BanditState& state, const BanditParams& bandit,
                               const Threshold& threshold)
{
    BanditState next;
    next.rho = update_belief(state, state.mode, bandit);
    next.mode = select_mode(next.rho, threshold);
    next.slot = state.slot + 1;
    return next;
}

/// First slot whose played mode is OMA, from the closed form
/// t = floor(ln(odds(rho0) / odds(rho*)) / (beta*eps)) + 1 for rho0 > rho*.
/// Slot 0 always plays the configured initial mode. nullopt means the belief
/// never drops below rho*.
inline std::optional<std::uint64_t> closed_form_switch_slot(const BanditParams& bandit,
                                                            const Threshold& threshold)
{
    if (bandit.initial_mode == Mode::Oma) {
        return 0;
    }
    const double rho0 = bandit.initial_belief_rho0;
    const double rho_star = threshold.rho_star;
    if (rho0 < rho_star) {
        return 1;
    }
    // rho = 1 is a fixed point of the update.
    const double rate = bandit.intensity_beta * bandit.time_step_eps;
    if (rho0 >= 1.0 || !(rate > 0.0)) {
        return std::nullopt;
    }
    if (rho_star <= 0.0) {
        return std::nullopt;
    }
    const double log_ratio = std::log(rho0 / (1.0 - rho0)) - std::log(rho_star / (1.0 - rho_star));
    const double t = std::floor(log_ratio / rate) + 1.0;
    if (t >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::nullopt;
    }
    return static_cast<std::uint64_t>(std::max(t, 1.0));
}

enum class BaselineKind { AllNoma, AllOma, Random };

inline Mode baseline_mode(BaselineKind kind, Rng& rng)
{
    switch (kind) {
    case BaselineKind::AllNoma:
        return Mode::Noma;
    case BaselineKind::AllOma:
        return Mode::Oma;
    case BaselineKind::Random:
        return std::bernoulli_distribution(0.5)(rng) ? Mode::Noma : Mode::Oma;
    }
    throw std::invalid_argument("unknown baseline kind");
}

} // namespace d2dsim
