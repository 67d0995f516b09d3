#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "d2dsim/config.hpp"
#include "d2dsim/engine.hpp"
#include "d2dsim/policy.hpp"

namespace d2dsim::cli {

enum class Command { Run, Compare, Threshold };

struct RunRequest {
    Command command = Command::Run;
    std::optional<std::string> config_path;
    std::vector<std::string> overrides;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
    PolicyKind policy = PolicyKind::Proposed;
    unsigned threads = 1;
};

/// Shortest round-trip decimal, always with '.' regardless of locale.
inline std::string format_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// File (if any), then --set overrides, then --seed. `full` selects the full
/// invariant check; the threshold report only needs the bandit block.
inline SimConfig resolve_config(const RunRequest& req, bool full = true)
{
    SimConfig c = req.config_path ? parse_config_unchecked(read_file(*req.config_path))
                                  : default_config();
    for (const auto& o : req.overrides) {
        apply_override(c, o);
    }
    if (req.seed) {
        c.experiment.seed = *req.seed;
    }
    if (full) {
        validate(c);
    } else {
        validate_bandit(c);
    }
    return c;
}

inline void write_threshold_report(const SimConfig& c, std::ostream& out)
{
    const auto th = compute_threshold(c.bandit, c.econ);
    const auto sw = closed_form_switch_slot(c.bandit, th);
    out << "omega " << format_number(th.omega) << "\n";
    out << "rho_star " << format_number(th.rho_star) << "\n";
    out << "switch_slot " << (sw ? std::to_string(*sw) : std::string("never")) << "\n";
}

inline void write_episode_csv(const EpisodeResult& ep, std::ostream& out)
{
    out << "slot,policy,active_due,admitted,revenue,r_max,eta,cum_eta\n";
    for (std::size_t t = 0; t < ep.per_slot.size(); ++t) {
        const auto& s = ep.per_slot[t];
        out << s.slot << ',' << to_string(ep.policy) << ',' << s.active_due << ','
            << s.admitted_count << ',' << format_number(s.revenue) << ','
            << format_number(s.r_max) << ',' << format_number(s.eta) << ','
            << format_number(ep.cumulative_eta[t]) << '\n';
    }
}

inline void write_summary_csv(const McSummary& mc, std::ostream& out)
{
    out << "policy,slot,mean_cum_eta,std_cum_eta,reps\n";
    for (const auto& s : mc.series) {
        for (std::size_t t = 0; t < s.mean_cum_eta.size(); ++t) {
            out << to_string(s.policy) << ',' << t << ',' << format_number(s.mean_cum_eta[t])
                << ',' << format_number(s.std_cum_eta[t]) << ',' << mc.reps << '\n';
        }
    }
}

/// Final-slot mean cumulative eta per policy, best first.
inline void write_summary_table(const McSummary& mc, std::ostream& out)
{
    std::vector<std::size_t> order(mc.series.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        order[p] = p;
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return mc.series[a].final_mean() > mc.series[b].final_mean();
    });
    out << "policy    final_mean_cum_eta  std         stderr      (reps=" << mc.reps
        << ", slots=" << mc.num_slots << ")\n";
    for (const auto p : order) {
        const auto& s = mc.series[p];
        std::ostringstream row;
        row.setf(std::ios::fixed);
        row.precision(6);
        row.imbue(std::locale::classic());
        row.width(10);
        row << std::left << to_string(s.policy);
        row.width(20);
        row << s.final_mean();
        row.width(12);
        row << s.final_std();
        row << mc.final_standard_error(p);
        out << row.str() << "\n";
    }
    out << "constraint_violations " << mc.constraint_violations << "\n";
}

/// Writes to out_path when given, otherwise to `fallback`.
template <class Writer>
void emit(const std::optional<std::string>& out_path, std::ostream& fallback, Writer&& write)
{
    if (!out_path) {
        write(fallback);
        return;
    }
    std::ofstream file(*out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot write output file '" + *out_path + "'");
    }
    file.imbue(std::locale::classic());
    write(file);
    file.flush();
    if (!file) {
        throw std::runtime_error("failed writing output file '" + *out_path + "'");
    }
}

inline void cmd_threshold(const RunRequest& req, std::ostream& console)
{
    write_threshold_report(resolve_config(req, false), console);
}

inline EpisodeResult cmd_run(const RunRequest& req, std::ostream& console)
{
    const auto cfg = resolve_config(req);
    auto ep = run_episode(cfg, req.policy, cfg.experiment.seed);
    emit(req.out_path, console, [&](std::ostream& os) { write_episode_csv(ep, os); });
    return ep;
}

inline McSummary cmd_compare(const RunRequest& req, std::ostream& console)
{
    const auto cfg = resolve_config(req);
    auto mc = run_monte_carlo(cfg, kAllPolicies, req.threads);
    if (req.out_path) {
        emit(req.out_path, console, [&](std::ostream& os) { write_summary_csv(mc, os); });
    }
    write_summary_table(mc, console);
    return mc;
}

} // namespace d2dsim::cli
