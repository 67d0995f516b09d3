#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "d2dsim/channel.hpp"
#include "d2dsim/config.hpp"
#include "d2dsim/mode.hpp"

namespace d2dsim {

/// Which D-UE reuses which C-UE resource in one slot, plus each C-UE's mode.
/// host() and group() are kept mutually consistent by assign/unassign.
class Assignment {
  public:
    Assignment() = default;

    Assignment(std::vector<Mode> modes, std::size_t num_due)
        : modes_(std::move(modes)), groups_(modes_.size()), host_(num_due, npos)
    {
    }

    std::size_t num_cue() const noexcept { return modes_.size(); }
    std::size_t num_due() const noexcept { return host_.size(); }

    Mode mode(std::size_t i) const { return modes_.at(i); }
    const std::vector<Mode>& modes() const noexcept { return modes_; }

    std::optional<std::size_t> host(std::size_t j) const
    {
        const auto h = host_.at(j);
        return h == npos ? std::nullopt : std::optional<std::size_t>(h);
    }

    const std::vector<std::size_t>& group(std::size_t i) const { return groups_.at(i); }

    void assign(std::size_t j, std::size_t i)
    {
        if (host_.at(j) != npos) {
            throw std::logic_error("Assignment: D-UE already hosted");
        }
        groups_.at(i).push_back(j);
        host_[j] = i;
    }

    void unassign(std::size_t j)
    {
        const auto h = host_.at(j);
        if (h == npos) {
            return;
        }
        auto& g = groups_[h];
        g.erase(std::find(g.begin(), g.end(), j));
        host_[j] = npos;
    }

    std::size_t admitted_count() const noexcept
    {
        return static_cast<std::size_t>(
            std::count_if(host_.begin(), host_.end(), [](auto h) { return h != npos; }));
    }

    /// Host index per D-UE; unassigned D-UEs read as num_cue().
    std::vector<std::size_t> host_vector() const
    {
        std::vector<std::size_t> v(host_);
        for (auto& h : v) {
            if (h == npos) {
                h = num_cue();
            }
        }
        return v;
    }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::vector<Mode> modes_;
    std::vector<std::vector<std::size_t>> groups_;
    std::vector<std::size_t> host_;
};

inline std::size_t group_capacity(Mode mode, const RadioParams& radio) noexcept
{
    return mode == Mode::Noma ? radio.noma_group_cap : 1;
}

inline bool respects_capacity(const Assignment& asg, const SimConfig& config)
{
    for (std::size_t i = 0; i < asg.num_cue(); ++i) {
        if (asg.group(i).size() > group_capacity(asg.mode(i), config.radio)) {
            return false;
        }
    }
    return true;
}

/// Uplink SINR of C-UE i at the BS; only D-UEs sharing its resource interfere.
inline double cue_sinr(std::size_t i, const Assignment& asg, const GainTable& gains,
                       const SimConfig& config)
{
    const auto& radio = config.radio;
    double interference = 0.0;
    for (const auto j : asg.group(i)) {
        interference += radio.p_due * gains.due_to_bs(j);
    }
    return radio.p_cue * gains.cue_to_bs(i) / (interference + radio.noise_power);
}

/// SINR at the receiver of admitted D-UE j. Cellular interference comes from
/// the host C-UE (or every C-UE when literal_c2_sum is set); NOMA co-tenants
/// add beta_noma_coupling times their received power.
inline double due_sinr(std::size_t j, const Assignment& asg, const GainTable& gains,
                       const SimConfig& config)
{
    const auto host = asg.host(j);
    if (!host) {
        throw std::invalid_argument("due_sinr: D-UE is not assigned");
    }
    const auto& radio = config.radio;
    double cellular = 0.0;
    if (radio.literal_c2_sum) {
        for (std::size_t i = 0; i < gains.num_cue(); ++i) {
            cellular += radio.p_cue * gains.cue_to_rx(i, j);
        }
    } else {
        cellular = radio.p_cue * gains.cue_to_rx(*host, j);
    }
    double intra = 0.0;
    if (asg.mode(*host) == Mode::Noma) {
        for (const auto k : asg.group(*host)) {
            if (k != j) {
                intra += radio.beta_noma_coupling * radio.p_due * gains.due_to_rx(k, j);
            }
        }
    }
    return radio.p_due * gains.own_link(j) / (cellular + intra + radio.noise_power);
}

/// C1 for C-UE i and C2 for every D-UE in its group. Constraints of distinct
/// resources are independent, so feasibility is the conjunction over groups.
/// An idle resource carries no C1 obligation.
inline bool group_feasible(std::size_t i, const Assignment& asg, const GainTable& gains,
                           const SimConfig& config)
{
    const auto& group = asg.group(i);
    if (group.empty()) {
        return true;
    }
    if (!(cue_sinr(i, asg, gains, config) >= config.radio.sinr_min_c)) {
        return false;
    }
    return std::all_of(group.begin(), group.end(), [&](std::size_t j) {
        return due_sinr(j, asg, gains, config) >= config.radio.sinr_min_d;
    });
}

inline bool is_feasible(const Assignment& asg, const GainTable& gains, const SimConfig& config)
{
    for (std::size_t i = 0; i < asg.num_cue(); ++i) {
        if (!group_feasible(i, asg, gains, config)) {
            return false;
        }
    }
    return true;
}

/// Per-slot revenue rate sum_j phi_{mode(host(j))}, before multiplying by the
/// slot duration.
inline double revenue_rate(const Assignment& asg, const EconomicParams& econ)
{
    std::size_t noma = 0;
    std::size_t oma = 0;
    for (std::size_t i = 0; i < asg.num_cue(); ++i) {
        (asg.mode(i) == Mode::Noma ? noma : oma) += asg.group(i).size();
    }
    return static_cast<double>(noma) * econ.phi_noma + static_cast<double>(oma) * econ.phi_oma;
}

struct SinrReport {
    std::vector<double> cue;
    std::vector<std::optional<double>> due;
};

inline SinrReport sinr_report(const Assignment& asg, const GainTable& gains, const SimConfig& config)
{
    SinrReport report;
    report.cue.reserve(asg.num_cue());
    for (std::size_t i = 0; i < asg.num_cue(); ++i) {
        report.cue.push_back(cue_sinr(i, asg, gains, config));
    }
    report.due.resize(asg.num_due());
    for (std::size_t j = 0; j < asg.num_due(); ++j) {
        if (asg.host(j)) {
            report.due[j] = due_sinr(j, asg, gains, config);
        }
    }
    return report;
}

struct Admission {
    Assignment assignment;
    SinrReport sinr;
};

/// Greedy interference-aware admission. D-UEs are visited by descending own
/// link gain; each tries C-UEs by ascending cellular interference
/// p_cue * g(cue -> rx) and joins the first one with spare capacity whose
/// resource stays feasible. Ties keep index order.
inline Admission greedy_admit(std::span<const Mode> modes, const GainTable& gains,
                              const SimConfig& config)
{
    const std::size_t m = gains.num_cue();
    const std::size_t n = gains.num_due();
    if (modes.size() != m) {
        throw std::invalid_argument("greedy_admit: one mode per C-UE required");
    }
    Assignment asg(std::vector<Mode>(modes.begin(), modes.end()), n);

    std::vector<std::size_t> dues(n);
    std::iota(dues.begin(), dues.end(), std::size_t{0});
    std::stable_sort(dues.begin(), dues.end(), [&](std::size_t a, std::size_t b) {
        return gains.own_link(a) > gains.own_link(b);
    });

    std::vector<std::size_t> cues(m);
    for (const auto j : dues) {
        std::iota(cues.begin(), cues.end(), std::size_t{0});
        std::stable_sort(cues.begin(), cues.end(), [&](std::size_t a, std::size_t b) {
            return gains.cue_to_rx(a, j) < gains.cue_to_rx(b, j);
        });
        for (const auto i : cues) {
            if (asg.group(i).size() >= group_capacity(asg.mode(i), config.radio)) {
                continue;
            }
            asg.assign(j, i);
            if (group_feasible(i, asg, gains, config)) {
                break;
            }
            asg.unassign(j);
        }
    }

    SinrReport report = sinr_report(asg, gains, config);
    return {std::move(asg), std::move(report)};
}

/// Exhaustive search over every capacity-respecting host vector. Returns a
/// feasible assignment of maximal revenue; among ties, the lexicographically
/// smallest host vector (unassigned counts as index num_cue).
inline Assignment optimal_admit_bruteforce(std::span<const Mode> modes, const GainTable& gains,
                                           const SimConfig& config)
{
    const std::size_t m = gains.num_cue();
    const std::size_t n = gains.num_due();
    if (modes.size() != m) {
        throw std::invalid_argument("optimal_admit_bruteforce: one mode per C-UE required");
    }
    if (m > 3 || n > 4) {
        throw std::invalid_argument("optimal_admit_bruteforce: instance too large");
    }
    const std::vector<Mode> mode_vec(modes.begin(), modes.end());

    // Odometer over host values 0..m, where m means unassigned; the digit
    // for D-UE 0 is most significant, so iteration is lexicographic.
    std::vector<std::size_t> digits(n, 0);
    std::optional<Assignment> best;
    double best_revenue = -1.0;
    while (true) {
        Assignment asg(mode_vec, n);
        for (std::size_t j = 0; j < n; ++j) {
            if (digits[j] < m) {
                asg.assign(j, digits[j]);
            }
        }
        if (respects_capacity(asg, config) && is_feasible(asg, gains, config)) {
            const double rev = revenue_rate(asg, config.econ);
            if (rev > best_revenue) {
                best_revenue = rev;
                best = std::move(asg);
            }
        }
        std::size_t pos = n;
        while (pos > 0) {
            --pos;
            if (++digits[pos] <= m) {
                break;
            }
            digits[pos] = 0;
            if (pos == 0) {
                pos = n + 1;
                break;
            }
        }
        if (n == 0 || pos == n + 1) {
            break;
        }
    }
    return best ? *best : Assignment(mode_vec, n);
}

} // namespace d2dsim
