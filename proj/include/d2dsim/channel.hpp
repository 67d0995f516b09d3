#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "d2dsim/config.hpp"
#include "d2dsim/rng.hpp"

namespace d2dsim {

struct Point {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Point&) const = default;
};

inline double distance(Point a, Point b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

enum class NodeKind { Bs, Cue, DueTx, DueRx };

struct NodeId {
    NodeKind kind;
    std::size_t index = 0;
};

struct D2dPair {
    Point tx;
    Point rx;

    bool operator==(const D2dPair&) const = default;
};

/// Cell geometry. Positions are fixed for an episode; pairs are appended as
/// they arrive.
struct Topology {
    Point bs;
    std::vector<Point> cues;
    std::vector<D2dPair> pairs;

    std::size_t num_cue() const noexcept { return cues.size(); }
    std::size_t active_due_count() const noexcept { return pairs.size(); }

    bool operator==(const Topology&) const = default;
};

/// Uniform point on the disc of the given radius.
inline Point uniform_in_disc(Point center, double radius, Rng& rng)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(rng));
    const double theta = 2.0 * std::numbers::pi * u(rng);
    return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

/// Transmitter uniform on the cell, receiver uniform within d2d_max_sep_m of
/// it; the receiver is redrawn until it also falls inside the cell.
inline D2dPair place_pair(const SimConfig& config, Point bs, Rng& rng)
{
    const auto& radio = config.radio;
    D2dPair pair;
    pair.tx = uniform_in_disc(bs, radio.cell_radius_m, rng);
    do {
        pair.rx = uniform_in_disc(pair.tx, radio.d2d_max_sep_m, rng);
    } while (distance(pair.rx, bs) > radio.cell_radius_m);
    if (distance(pair.tx, pair.rx) > radio.d2d_max_sep_m) {
        throw std::logic_error("D2D pair placed beyond d2d_max_sep_m");
    }
    return pair;
}

inline Topology place_topology(const SimConfig& config, Rng& rng)
{
    Topology topo;
    topo.cues.reserve(config.experiment.num_cue_m);
    for (std::uint32_t i = 0; i < config.experiment.num_cue_m; ++i) {
        topo.cues.push_back(uniform_in_disc(topo.bs, config.radio.cell_radius_m, rng));
    }
    return topo;
}

/// 10^(-PL/10) with PL = intercept + coeff * log10(d_km); d is clamped to 1 m.
inline double path_loss_linear(double distance_m, const SimConfig& config)
{
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("path_loss_linear: distance must be > 0");
    }
    const double d = std::max(distance_m, 1.0);
    const double pl_db = config.radio.pathloss_intercept_db
                         + config.radio.pathloss_exponent_coeff * std::log10(d / 1000.0);
    return std::pow(10.0, -pl_db / 10.0);
}

/// Rayleigh power fading, Exp(1).
inline double draw_fading(Rng& rng)
{
    std::exponential_distribution<double> exp1(1.0);
    double v = exp1(rng);
    // Exactly 0 is possible when the underlying uniform draw is 0.
    while (!(v > 0.0)) {
        v = exp1(rng);
    }
    return v;
}

/// Linear power gains |g_ab|^2 for the links the admission model reads:
/// C-UE -> BS, D-UE tx -> BS, C-UE -> D-UE rx, D-UE tx -> D-UE rx (own and
/// cross). Also used to hold deterministic path-loss tables.
class GainTable {
  public:
    GainTable() = default;

    GainTable(std::size_t num_cue, std::size_t num_due)
        : cue_bs_(num_cue, 0.0), due_bs_(num_due, 0.0),
          cue_rx_(num_due, std::vector<double>(num_cue, 0.0)),
          due_rx_(num_due, std::vector<double>(num_due, 0.0))
    {
    }

    std::size_t num_cue() const noexcept { return cue_bs_.size(); }
    std::size_t num_due() const noexcept { return due_bs_.size(); }

    double cue_to_bs(std::size_t i) const { return cue_bs_.at(i); }
    double due_to_bs(std::size_t j) const { return due_bs_.at(j); }
    double cue_to_rx(std::size_t i, std::size_t j) const { return cue_rx_.at(j).at(i); }
    double due_to_rx(std::size_t tx, std::size_t rx) const { return due_rx_.at(rx).at(tx); }
    double own_link(std::size_t j) const { return due_to_rx(j, j); }

    void set_cue_to_bs(std::size_t i, double g) { cue_bs_.at(i) = g; }
    void set_due_to_bs(std::size_t j, double g) { due_bs_.at(j) = g; }
    void set_cue_to_rx(std::size_t i, std::size_t j, double g) { cue_rx_.at(j).at(i) = g; }
    void set_due_to_rx(std::size_t tx, std::size_t rx, double g) { due_rx_.at(rx).at(tx) = g; }

    /// Generic lookup over the supported link set; throws for anything else.
    double gain(NodeId from, NodeId to) const
    {
        if (to.kind == NodeKind::Bs) {
            if (from.kind == NodeKind::Cue) {
                return cue_to_bs(from.index);
            }
            if (from.kind == NodeKind::DueTx) {
                return due_to_bs(from.index);
            }
        } else if (to.kind == NodeKind::DueRx) {
            if (from.kind == NodeKind::Cue) {
                return cue_to_rx(from.index, to.index);
            }
            if (from.kind == NodeKind::DueTx) {
                return due_to_rx(from.index, to.index);
            }
        }
        throw std::invalid_argument("GainTable: link not modelled");
    }

    /// Appends path-loss entries for pairs [num_due(), topology.pairs.size()).
    void extend_path_loss(const Topology& topo, const SimConfig& config)
    {
        const std::size_t m = topo.num_cue();
        const std::size_t old_n = num_due();
        const std::size_t n = topo.active_due_count();
        if (cue_bs_.size() != m) {
            cue_bs_.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                cue_bs_[i] = path_loss_linear(distance(topo.cues[i], topo.bs), config);
            }
        }
        for (auto& row : due_rx_) {
            row.resize(n);
        }
        for (std::size_t j = old_n; j < n; ++j) {
            const auto& pair = topo.pairs[j];
            due_bs_.push_back(path_loss_linear(distance(pair.tx, topo.bs), config));
            auto& cue_row = cue_rx_.emplace_back(m);
            for (std::size_t i = 0; i < m; ++i) {
                cue_row[i] = path_loss_linear(distance(topo.cues[i], pair.rx), config);
            }
            due_rx_.emplace_back(n);
        }
        for (std::size_t rx = 0; rx < n; ++rx) {
            const std::size_t first_tx = rx < old_n ? old_n : 0;
            for (std::size_t tx = first_tx; tx < n; ++tx) {
                due_rx_[rx][tx] = path_loss_linear(
                    distance(topo.pairs[tx].tx, topo.pairs[rx].rx), config);
            }
        }
    }

    /// Copy with every entry multiplied by an independent Exp(1) draw, in a
    /// fixed order: C-UE->BS, D-UE->BS, C-UE->rx (by rx), D-UE->rx (by rx).
    GainTable with_fading(Rng& rng) const
    {
        GainTable out = *this;
        for (auto& g : out.cue_bs_) {
            g *= draw_fading(rng);
        }
        for (auto& g : out.due_bs_) {
            g *= draw_fading(rng);
        }
        for (auto& row : out.cue_rx_) {
            for (auto& g : row) {
                g *= draw_fading(rng);
            }
        }
        for (auto& row : out.due_rx_) {
            for (auto& g : row) {
                g *= draw_fading(rng);
            }
        }
        return out;
    }

  private:
    std::vector<double> cue_bs_;
    std::vector<double> due_bs_;
    std::vector<std::vector<double>> cue_rx_; // [rx][cue]
    std::vector<std::vector<double>> due_rx_; // [rx][tx]
};

inline GainTable path_loss_table(const Topology& topo, const SimConfig& config)
{
    GainTable table;
    table.extend_path_loss(topo, config);
    return table;
}

/// One slot's gains: path loss times fresh fading on every link.
inline GainTable sample_gains(const Topology& topo, const SimConfig& config, Rng& rng)
{
    return path_loss_table(topo, config).with_fading(rng);
}

} // namespace d2dsim
