#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace d2dsim {

/// Resource-reuse mode a C-UE offers to D2D tenants. OMA is the safe
/// single-tenant arm, NOMA the shared higher-rate arm.
enum class Mode : std::uint8_t { Oma = 0, Noma = 1 };

constexpr int to_action(Mode m) noexcept { return m == Mode::Noma ? 1 : 0; }

constexpr std::string_view to_string(Mode m) noexcept
{
    return m == Mode::Noma ? "noma" : "oma";
}

inline Mode parse_mode(std::string_view s)
{
    if (s == "noma" || s == "NOMA" || s == "1") {
        return Mode::Noma;
    }
    if (s == "oma" || s == "OMA" || s == "0") {
        return Mode::Oma;
    }
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

} // namespace d2dsim
