#include "units.hpp"

#include <fmt/format.h>

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace oamsim
{
namespace
{
constexpr double two_pi = 6.283185307179586;

struct Unit
{
    std::string_view name;
    double scale;
};

// angular rates in rad/s
constexpr std::array<Unit, 9> abs_rates{{{"rad/s", 1.0},
                                         {"/s", 1.0},
                                         {"/ms", 1e3},
                                         {"/us", 1e6},
                                         {"/ns", 1e9},
                                         {"Hz", two_pi},
                                         {"kHz", two_pi * 1e3},
                                         {"MHz", two_pi * 1e6},
                                         {"GHz", two_pi * 1e9}}};
constexpr std::array<Unit, 5> abs_times{{{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}}};
constexpr std::array<Unit, 4> lengths{{{"m", 1.0}, {"cm", 1e-2}, {"mm", 1e-3}, {"um", 1e-6}}};

std::pair<double, std::string> split(std::string_view text)
{
    const std::string s = trim(text);
    if (s.empty()) {
        throw std::invalid_argument("empty value");
    }
    const char *first = s.data();
    const char *last = s.data() + s.size();
    if (*first == '+') {
        ++first;
    }
    double v = 0.0;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || !std::isfinite(v)) {
        throw std::invalid_argument(fmt::format("'{}' does not start with a number", s));
    }
    return {v, trim(std::string_view(res.ptr, static_cast<std::size_t>(last - res.ptr)))};
}

template <std::size_t N>
const Unit *lookup(const std::array<Unit, N> &table, std::string_view name)
{
    for (const auto &u : table) {
        if (u.name == name) {
            return &u;
        }
    }
    return nullptr;
}

double need_kappa(const KappaScale &kappa, std::string_view unit)
{
    if (!kappa) {
        throw std::invalid_argument(
            fmt::format("unit '{}' is absolute but lattice.kappa is given in kappa units", unit));
    }
    return *kappa;
}
} // namespace

const char *kind_name(Kind k)
{
    switch (k) {
    case Kind::Rate: return "rate";
    case Kind::Time: return "time";
    case Kind::Phase: return "phase";
    case Kind::Length: return "length";
    case Kind::Number: return "number";
    case Kind::Integer: return "integer";
    case Kind::Bool: return "bool";
    case Kind::Text: return "text";
    }
    return "?";
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::optional<double> absolute_rate(std::string_view text)
{
    const auto [v, unit] = split(text);
    if (unit == "kappa") {
        return std::nullopt;
    }
    if (const Unit *u = lookup(abs_rates, unit)) {
        return v * u->scale;
    }
    throw std::invalid_argument(fmt::format("'{}' needs a rate unit (kappa, /us, MHz, ...)", trim(text)));
}

double parse_quantity(std::string_view text, Kind kind, const KappaScale &kappa)
{
    switch (kind) {
    case Kind::Rate: {
        const auto [v, unit] = split(text);
        if (unit == "kappa") {
            return v;
        }
        if (const Unit *u = lookup(abs_rates, unit)) {
            return v * u->scale / need_kappa(kappa, unit);
        }
        throw std::invalid_argument(fmt::format("'{}' needs a rate unit (kappa, /us, MHz, ...)", trim(text)));
    }
    case Kind::Time: {
        const auto [v, unit] = split(text);
        if (unit == "/kappa") {
            return v;
        }
        if (const Unit *u = lookup(abs_times, unit)) {
            return v * u->scale * need_kappa(kappa, unit);
        }
        throw std::invalid_argument(fmt::format("'{}' needs a time unit (/kappa, ns, us, ...)", trim(text)));
    }
    case Kind::Phase: {
        const auto [v, unit] = split(text);
        if (unit.empty() || unit == "rad") {
            return v;
        }
        if (unit == "pi") {
            return v * 3.141592653589793;
        }
        if (unit == "deg") {
            return v * 3.141592653589793 / 180.0;
        }
        throw std::invalid_argument(fmt::format("'{}' has an unknown phase unit (rad, pi, deg)", trim(text)));
    }
    case Kind::Length: {
        const auto [v, unit] = split(text);
        if (const Unit *u = lookup(lengths, unit)) {
            return v * u->scale;
        }
        throw std::invalid_argument(fmt::format("'{}' needs a length unit (m, cm, mm)", trim(text)));
    }
    case Kind::Number: {
        const auto [v, unit] = split(text);
        if (!unit.empty()) {
            throw std::invalid_argument(fmt::format("'{}' should be a plain number", trim(text)));
        }
        return v;
    }
    case Kind::Integer: return static_cast<double>(parse_integer(text));
    case Kind::Bool: return parse_bool(text) ? 1.0 : 0.0;
    case Kind::Text: break;
    }
    throw std::invalid_argument("not a numeric key");
}

bool parse_bool(std::string_view text)
{
    const std::string s = trim(text);
    if (s == "true" || s == "yes" || s == "on" || s == "1") {
        return true;
    }
    if (s == "false" || s == "no" || s == "off" || s == "0") {
        return false;
    }
    throw std::invalid_argument(fmt::format("'{}' is not a boolean", s));
}

long parse_integer(std::string_view text)
{
    const std::string s = trim(text);
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw std::invalid_argument(fmt::format("'{}' is not an integer", s));
    }
    return v;
}

} // namespace oamsim
