// Acceptance gate. One PASS/FAIL line per criterion; nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "d2dsim/admission.hpp"
#include "d2dsim/cli.hpp"
#include "d2dsim/engine.hpp"
#include "d2dsim/policy.hpp"
#include "../instances.hpp"

using namespace d2dsim;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail)
{
    std::printf("[%s] criterion %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) {
        ++failures;
    }
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::size_t index_of(const McSummary& mc, PolicyKind p)
{
    for (std::size_t k = 0; k < mc.series.size(); ++k) {
        if (mc.series[k].policy == p) {
            return k;
        }
    }
    return mc.series.size();
}

void threshold_value()
{
    const auto c = default_config();
    const auto th = compute_threshold(c.bandit, c.econ);
    // 0.5 * 1 / (1.5 * 0.5 + 0.5 * 1) = 0.4
    const bool ok = std::abs(th.rho_star - 0.4) <= 1e-12 && std::abs(th.omega - 0.5) <= 1e-12;
    report(1, "threshold", ok, fmt("rho_star=%.15g omega=%.15g", th.rho_star, th.omega));
}

// Slot index of the first OMA action by direct iteration; -1 if none within cap.
long long simulated_switch_slot(const BanditParams& b, const Threshold& th, long long cap)
{
    auto s = initial_bandit_state(b);
    for (long long t = 0; t <= cap; ++t) {
        if (s.mode == Mode::Oma) {
            return t;
        }
        s = step_bandit(s, b, th);
    }
    return -1;
}

void belief_trajectory()
{
    const auto c = default_config();
    const auto th = compute_threshold(c.bandit, c.econ);
    const auto s1 = step_bandit(initial_bandit_state(c.bandit), c.bandit, th);
    // odds 1 * exp(-0.06) -> rho = 1 / (1 + e^0.06)
    const double rho1_oracle = 1.0 / (1.0 + std::exp(0.06));
    const long long first_oma = simulated_switch_slot(c.bandit, th, 1000);

    Rng rng(20261015);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int checked = 0;
    int mismatched = 0;
    while (checked < 1000) {
        BanditParams b;
        b.discounted_reward_r = 0.01 + 0.5 * u(rng);
        b.intensity_beta = 0.05 + 0.5 * u(rng);
        b.time_step_eps = 0.05 + 0.95 * u(rng);
        b.initial_belief_rho0 = 0.02 + 0.96 * u(rng);
        b.initial_mode = Mode::Noma;
        EconomicParams e;
        e.phi_oma = 0.5 + u(rng);
        e.phi_noma = e.phi_oma * (1.05 + 2.0 * u(rng));
        const auto t = compute_threshold(b, e);
        const double rho0 = b.initial_belief_rho0;
        if (rho0 > t.rho_star) {
            // Skip draws that land within rounding of an integer step count.
            const double x = (std::log(rho0 / (1 - rho0)) - std::log(t.rho_star / (1 - t.rho_star)))
                             / (b.intensity_beta * b.time_step_eps);
            if (std::abs(x - std::round(x)) < 1e-6) {
                continue;
            }
        }
        const auto closed = closed_form_switch_slot(b, t);
        const long long sim = simulated_switch_slot(b, t, 100000);
        if (!closed || static_cast<long long>(*closed) != sim) {
            ++mismatched;
        }
        ++checked;
    }

    const bool ok = std::abs(s1.rho - 0.48500) <= 1e-5 && std::abs(s1.rho - rho1_oracle) <= 1e-12
                    && first_oma == 7 && mismatched == 0;
    report(2, "belief trajectory", ok,
           fmt("rho(1)=%.6f first_oma_slot=%lld closed_form_mismatches=%d/%d", s1.rho, first_oma,
               mismatched, checked));
}

void oracle_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(4242);
    int infeasible = 0;
    int exceeded = 0;
    double ratio_sum = 0.0;
    int ratio_count = 0;
    for (int k = 0; k < 1000; ++k) {
        const auto inst = test_support::random_small_instance(rng, 3, 4);
        const auto g = greedy_admit(inst.modes, inst.gains, inst.config);
        const auto opt = optimal_admit_bruteforce(inst.modes, inst.gains, inst.config);
        if (!is_feasible(g.assignment, inst.gains, inst.config)
            || !respects_capacity(g.assignment, inst.config)) {
            ++infeasible;
        }
        const double rg = revenue_rate(g.assignment, inst.config.econ);
        const double ro = revenue_rate(opt, inst.config.econ);
        if (rg > ro + 1e-12) {
            ++exceeded;
        }
        if (ro > 0.0) {
            ratio_sum += rg / ro;
            ++ratio_count;
        }
    }
    const double mean_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 1.0;
    const bool ok = infeasible == 0 && exceeded == 0 && mean_ratio >= 0.70;
    report(4, "greedy vs brute force", ok,
           fmt("infeasible=%d above_optimum=%d mean_ratio=%.4f over %d nonzero instances (%.1fs)",
               infeasible, exceeded, mean_ratio, ratio_count, seconds_since(t0)));
}

void figure_ordering(const McSummary& mc, double elapsed)
{
    const auto ip = index_of(mc, PolicyKind::Proposed);
    const auto in = index_of(mc, PolicyKind::AllNoma);
    const auto ir = index_of(mc, PolicyKind::Random);
    const double mp = mc.series[ip].final_mean();
    const double mn = mc.series[in].final_mean();
    const double mr = mc.series[ir].final_mean();
    // Independent standard errors of each mean, combined in quadrature.
    const double se_pn = std::hypot(mc.final_standard_error(ip), mc.final_standard_error(in));
    const double se_nr = std::hypot(mc.final_standard_error(in), mc.final_standard_error(ir));
    const bool order_pn = mp - mn > 2.0 * se_pn;
    const bool order_nr = mn - mr > 2.0 * se_nr;

    const auto c = default_config();
    std::size_t prefix_mismatch = 0;
    const PolicyKind pair[] = {PolicyKind::Proposed, PolicyKind::AllNoma};
    for (std::uint32_t rep = 0; rep < c.experiment.num_reps; ++rep) {
        const auto eps = run_episodes(c, pair, c.experiment.seed, rep);
        for (std::size_t t = 0; t < 7 && t < eps[0].per_slot.size(); ++t) {
            if (!(eps[0].per_slot[t] == eps[1].per_slot[t])
                || eps[0].cumulative_eta[t] != eps[1].cumulative_eta[t]) {
                ++prefix_mismatch;
            }
        }
    }

    report(5, "final-slot ordering and pre-switch prefix", order_pn && order_nr && prefix_mismatch == 0,
           fmt("proposed=%.5f all-noma=%.5f random=%.5f all-oma=%.5f; "
               "proposed-allnoma=%+.5f (2se=%.5f, %s); allnoma-random=%+.5f (2se=%.5f, %s); "
               "prefix mismatches=%zu (mc %.1fs)",
               mp, mn, mr, mc.series[index_of(mc, PolicyKind::AllOma)].final_mean(), mp - mn,
               2.0 * se_pn, order_pn ? "ok" : "not separated", mn - mr, 2.0 * se_nr,
               order_nr ? "ok" : "not separated", prefix_mismatch, elapsed));
}

// Checks eta and revenue columns of emitted run CSVs for every policy.
std::size_t run_csv_violations(std::size_t& rows)
{
    std::size_t bad = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        for (const auto p : kAllPolicies) {
            cli::RunRequest req;
            req.seed = seed;
            req.policy = p;
            std::ostringstream out;
            cli::cmd_run(req, out);
            std::istringstream in(out.str());
            std::string line;
            std::getline(in, line);
            while (std::getline(in, line)) {
                std::vector<std::string> cells;
                std::istringstream row(line);
                for (std::string cell; std::getline(row, cell, ',');) {
                    cells.push_back(cell);
                }
                ++rows;
                if (cells.size() != 8) {
                    ++bad;
                    continue;
                }
                const double revenue = std::stod(cells[4]);
                const double r_max = std::stod(cells[5]);
                const double eta = std::stod(cells[6]);
                const double cum = std::stod(cells[7]);
                if (!(eta >= 0.0 && eta <= 1.0) || !(cum >= 0.0 && cum <= 1.0) || revenue > r_max) {
                    ++bad;
                }
            }
        }
    }
    return bad;
}

} // namespace

int main()
{
    threshold_value();
    belief_trajectory();

    const auto hw = std::max(2u, std::thread::hardware_concurrency());
    const auto a = fs::temp_directory_path() / "d2dsim_acceptance_compare_1.csv";
    const auto b = fs::temp_directory_path() / "d2dsim_acceptance_compare_n.csv";

    cli::RunRequest req;
    req.command = cli::Command::Compare;
    req.out_path = a.string();
    req.threads = 1;
    std::ostringstream console_a;
    auto t0 = std::chrono::steady_clock::now();
    const auto mc = cli::cmd_compare(req, console_a);
    const double elapsed = seconds_since(t0);

    report(3, "constraint safety", mc.constraint_violations == 0 && mc.slots_simulated == 400000,
           fmt("violations=%zu over %zu policy-slots (%u reps x %u slots, %.1fs)",
               mc.constraint_violations, mc.slots_simulated, mc.reps, mc.num_slots, elapsed));

    oracle_equivalence();
    figure_ordering(mc, elapsed);

    std::size_t rows = 0;
    const auto csv_bad = run_csv_violations(rows);
    report(6, "normalization", mc.normalization_violations == 0 && csv_bad == 0,
           fmt("monte carlo violations=%zu; run csv rows checked=%zu bad=%zu",
               mc.normalization_violations, rows, csv_bad));

    req.out_path = b.string();
    req.threads = hw;
    std::ostringstream console_b;
    t0 = std::chrono::steady_clock::now();
    cli::cmd_compare(req, console_b);
    const auto text_a = slurp(a);
    const auto text_b = slurp(b);
    const bool same = !text_a.empty() && text_a == text_b && console_a.str() == console_b.str();
    report(7, "determinism", same,
           fmt("threads 1 vs %u: %zu vs %zu bytes, %s (%.1fs)", hw, text_a.size(), text_b.size(),
               same ? "identical" : "different", seconds_since(t0)));
    fs::remove(a);
    fs::remove(b);

    std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
