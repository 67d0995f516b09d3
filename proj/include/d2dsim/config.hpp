#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include "json.hpp"

#include "d2dsim/mode.hpp"

namespace d2dsim {

/// Threshold-bandit parameters (r, beta, rho(0), eps, A(0)).
struct BanditParams {
    double discounted_reward_r = 0.1;
    double intensity_beta = 0.2;
    double initial_belief_rho0 = 0.5;
    double time_step_eps = 0.3;
    Mode initial_mode = Mode::Noma;

    bool operator==(const BanditParams&) const = default;
};

/// Rental rates per admitted D-UE per time unit, and the time a slot lasts.
struct EconomicParams {
    double phi_oma = 1.0;
    double phi_noma = 1.5;
    double slot_duration = 1.0;

    bool operator==(const EconomicParams&) const = default;
};

/// Link-budget and admission parameters. Powers and noise are linear mW,
/// SINR thresholds are linear ratios.
struct RadioParams {
    double p_cue = 200.0;
    double p_due = 10.0;
    double noise_power = 3.981071705534972e-12; // -114 dBm
    double sinr_min_c = 2.0;
    double sinr_min_d = 2.0;
    double beta_noma_coupling = 0.5;
    std::uint32_t noma_group_cap = 2;
    double pathloss_intercept_db = 128.1;
    double pathloss_exponent_coeff = 37.6;
    double cell_radius_m = 500.0;
    double d2d_max_sep_m = 20.0;
    // Sum cellular interference in C2 over every C-UE instead of the host only.
    bool literal_c2_sum = false;

    bool operator==(const RadioParams&) const = default;
};

struct ExperimentParams {
    std::uint32_t num_cue_m = 10;
    double due_arrival_rate = 0.5;
    // Per-slot probability that an active D2D pair leaves. Zero keeps every
    // pair until the end of the episode.
    double due_departure_prob = 0.0;
    std::uint32_t num_slots = 100;
    std::uint32_t num_reps = 1000;
    std::uint64_t seed = 1;

    bool operator==(const ExperimentParams&) const = default;
};

struct SimConfig {
    BanditParams bandit;
    EconomicParams econ;
    RadioParams radio;
    ExperimentParams experiment;

    bool operator==(const SimConfig&) const = default;
};

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline SimConfig default_config() { return SimConfig{}; }

/// Calls f(section, key, field&) for every configurable field in a fixed
/// order. Keys are unique across sections.
template <class Cfg, class F>
    requires std::is_same_v<std::remove_const_t<Cfg>, SimConfig>
void for_each_field(Cfg& c, F&& f)
{
    f("bandit", "discounted_reward_r", c.bandit.discounted_reward_r);
    f("bandit", "intensity_beta", c.bandit.intensity_beta);
    f("bandit", "initial_belief_rho0", c.bandit.initial_belief_rho0);
    f("bandit", "time_step_eps", c.bandit.time_step_eps);
    f("bandit", "initial_mode", c.bandit.initial_mode);
    f("econ", "phi_oma", c.econ.phi_oma);
    f("econ", "phi_noma", c.econ.phi_noma);
    f("econ", "slot_duration", c.econ.slot_duration);
    f("radio", "p_cue", c.radio.p_cue);
    f("radio", "p_due", c.radio.p_due);
    f("radio", "noise_power", c.radio.noise_power);
    f("radio", "sinr_min_c", c.radio.sinr_min_c);
    f("radio", "sinr_min_d", c.radio.sinr_min_d);
    f("radio", "beta_noma_coupling", c.radio.beta_noma_coupling);
    f("radio", "noma_group_cap", c.radio.noma_group_cap);
    f("radio", "pathloss_intercept_db", c.radio.pathloss_intercept_db);
    f("radio", "pathloss_exponent_coeff", c.radio.pathloss_exponent_coeff);
    f("radio", "cell_radius_m", c.radio.cell_radius_m);
    f("radio", "d2d_max_sep_m", c.radio.d2d_max_sep_m);
    f("radio", "literal_c2_sum", c.radio.literal_c2_sum);
    f("experiment", "num_cue_m", c.experiment.num_cue_m);
    f("experiment", "due_arrival_rate", c.experiment.due_arrival_rate);
    f("experiment", "due_departure_prob", c.experiment.due_departure_prob);
    f("experiment", "num_slots", c.experiment.num_slots);
    f("experiment", "num_reps", c.experiment.num_reps);
    f("experiment", "seed", c.experiment.seed);
}

namespace detail {

[[noreturn]] inline void fail(std::string_view field, std::string_view what)
{
    throw ConfigError(std::string(field) + " " + std::string(what));
}

inline void require_finite(std::string_view field, double v)
{
    if (!std::isfinite(v)) {
        fail(field, "must be finite");
    }
}

inline void require_positive(std::string_view field, double v)
{
    require_finite(field, v);
    if (!(v > 0.0)) {
        fail(field, "must be > 0");
    }
}

inline void require_unit_closed(std::string_view field, double v)
{
    if (!(v >= 0.0 && v <= 1.0)) {
        fail(field, "must lie in [0, 1]");
    }
}

inline void assign_json(std::string_view key, const nlohmann::json& j, double& out)
{
    if (!j.is_number()) {
        fail(key, "must be a number");
    }
    out = j.get<double>();
}

inline void assign_json(std::string_view key, const nlohmann::json& j, bool& out)
{
    if (!j.is_boolean()) {
        fail(key, "must be a boolean");
    }
    out = j.get<bool>();
}

template <class U>
    requires(std::is_unsigned_v<U> && !std::is_same_v<U, bool>)
void assign_json(std::string_view key, const nlohmann::json& j, U& out)
{
    if (j.is_number_unsigned()) {
        const auto v = j.get<std::uint64_t>();
        if (v > std::numeric_limits<U>::max()) {
            fail(key, "is out of range");
        }
        out = static_cast<U>(v);
        return;
    }
    if (j.is_number_integer()) {
        fail(key, "must be a non-negative integer");
    }
    if (j.is_number_float()) {
        const double d = j.get<double>();
        if (d >= 0.0 && d == std::floor(d) && d <= static_cast<double>(std::numeric_limits<U>::max())) {
            out = static_cast<U>(d);
            return;
        }
    }
    fail(key, "must be a non-negative integer");
}

inline void assign_json(std::string_view key, const nlohmann::json& j, Mode& out)
{
    if (j.is_number()) {
        const double d = j.get<double>();
        if (d == 0.0) {
            out = Mode::Oma;
            return;
        }
        if (d == 1.0) {
            out = Mode::Noma;
            return;
        }
    } else if (j.is_string()) {
        try {
            out = parse_mode(j.get<std::string>());
            return;
        } catch (const std::invalid_argument&) {
        }
    }
    fail(key, "must be 0/1 or \"oma\"/\"noma\"");
}


} // namespace detail

/// Checks only the bandit block, plus the rate ordering the threshold needs
/// (phi_noma >= phi_oma > 0). Equal rates are allowed here.
inline void validate_bandit(const SimConfig& c)
{
    using namespace detail;
    const auto& b = c.bandit;
    require_finite("discounted_reward_r", b.discounted_reward_r);
    if (!(b.discounted_reward_r >= 0.0)) {
        fail("discounted_reward_r", "must be >= 0");
    }
    require_positive("intensity_beta", b.intensity_beta);
    require_unit_closed("initial_belief_rho0", b.initial_belief_rho0);
    require_positive("time_step_eps", b.time_step_eps);
    require_positive("phi_oma", c.econ.phi_oma);
    require_finite("phi_noma", c.econ.phi_noma);
    if (!(c.econ.phi_noma >= c.econ.phi_oma)) {
        throw ConfigError("phi_oma <= phi_noma violated");
    }
}

/// Full invariant check. Throws ConfigError naming the first offending field.
inline void validate(const SimConfig& c)
{
    using namespace detail;
    const auto& e = c.econ;
    if (std::isfinite(e.phi_oma) && std::isfinite(e.phi_noma) && !(e.phi_oma < e.phi_noma)) {
        throw ConfigError("phi_oma < phi_noma violated");
    }
    validate_bandit(c);
    require_positive("slot_duration", e.slot_duration);

    const auto& r = c.radio;
    require_positive("p_cue", r.p_cue);
    require_positive("p_due", r.p_due);
    require_positive("noise_power", r.noise_power);
    require_positive("sinr_min_c", r.sinr_min_c);
    require_positive("sinr_min_d", r.sinr_min_d);
    if (!(r.beta_noma_coupling > 0.0 && r.beta_noma_coupling < 1.0)) {
        fail("beta_noma_coupling", "must lie in (0, 1)");
    }
    if (r.noma_group_cap < 2) {
        fail("noma_group_cap", "must be >= 2");
    }
    require_finite("pathloss_intercept_db", r.pathloss_intercept_db);
    require_finite("pathloss_exponent_coeff", r.pathloss_exponent_coeff);
    require_positive("d2d_max_sep_m", r.d2d_max_sep_m);
    require_finite("cell_radius_m", r.cell_radius_m);
    if (!(r.cell_radius_m > r.d2d_max_sep_m)) {
        throw ConfigError("cell_radius_m > d2d_max_sep_m violated");
    }

    const auto& x = c.experiment;
    if (x.num_cue_m < 1) {
        fail("num_cue_m", "must be >= 1");
    }
    require_finite("due_arrival_rate", x.due_arrival_rate);
    if (!(x.due_arrival_rate >= 0.0)) {
        fail("due_arrival_rate", "must be >= 0");
    }
    require_unit_closed("due_departure_prob", x.due_departure_prob);
    if (x.num_reps < 1) {
        fail("num_reps", "must be >= 1");
    }
}

/// Sets one field from a JSON value. Accepts a bare key ("intensity_beta")
/// or a dotted one ("bandit.intensity_beta").
inline void set_field(SimConfig& c, std::string_view key, const nlohmann::json& value)
{
    std::string_view section;
    std::string_view name = key;
    if (const auto dot = key.find('.'); dot != std::string_view::npos) {
        section = key.substr(0, dot);
        name = key.substr(dot + 1);
    }
    bool found = false;
    for_each_field(c, [&](std::string_view sec, std::string_view k, auto& field) {
        if (k == name && (section.empty() || section == sec)) {
            detail::assign_json(k, value, field);
            found = true;
        }
    });
    if (!found) {
        throw ConfigError("unknown config key '" + std::string(key) + "'");
    }
}

/// Parses a flat JSON object over the defaults without checking invariants.
/// Key and type errors still throw.
inline SimConfig parse_config_unchecked(std::string_view text)
{
    SimConfig c = default_config();
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        return c;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    for (const auto& [key, value] : doc.items()) {
        set_field(c, key, value);
    }
    return c;
}

/// Parses a flat JSON object; absent keys keep their defaults.
inline SimConfig load_config(std::string_view text)
{
    SimConfig c = parse_config_unchecked(text);
    validate(c);
    return c;
}

inline std::string serialize_config(const SimConfig& c)
{
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for_each_field(c, [&](std::string_view, std::string_view k, const auto& field) {
        if constexpr (std::is_same_v<std::remove_cvref_t<decltype(field)>, Mode>) {
            doc[std::string(k)] = std::string(to_string(field));
        } else {
            doc[std::string(k)] = field;
        }
    });
    return doc.dump(2) + "\n";
}

/// Parses "key=value". The value is read as a JSON literal when possible,
/// otherwise as a bare string (so `initial_mode=oma` works).
inline void apply_override(SimConfig& c, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not key=value");
    }
    const auto key = assignment.substr(0, eq);
    const auto raw = std::string(assignment.substr(eq + 1));
    nlohmann::json value = nlohmann::json::parse(raw, nullptr, false);
    if (value.is_discarded()) {
        value = raw;
    }
    set_field(c, key, value);
}

} // namespace d2dsim
