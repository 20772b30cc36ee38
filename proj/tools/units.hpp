#ifndef OAMSIM_UNITS_HPP
#define OAMSIM_UNITS_HPP

#include <optional>
#include <string>
#include <string_view>

namespace oamsim
{
// Kinds of value a config key can hold.
enum class Kind
{
    Rate,   // angular frequency; stored in units of kappa
    Time,   // stored in units of 1/kappa
    Phase,  // radians
    Length, // metres
    Number,
    Integer,
    Bool,
    Text,
};

const char *kind_name(Kind k);

// Absolute scale of kappa in rad/s when the config gives one.
using KappaScale = std::optional<double>;

// Parses "<number> [unit]" into the stored unit of `kind`.
//   rates:   kappa | /s /ms /us /ns (angular) | Hz kHz MHz GHz (cyclic, times 2 pi)
//   times:   /kappa | s ms us ns ps
//   phases:  bare number (rad) | rad | pi | deg
//   lengths: m cm mm um
// Absolute rate and time units need `kappa`. Throws std::invalid_argument.
double parse_quantity(std::string_view text, Kind kind, const KappaScale &kappa);

// Absolute angular frequency of a rate written in absolute units, or nullopt
// for "kappa" units. Used to pin the scale itself.
std::optional<double> absolute_rate(std::string_view text);

bool parse_bool(std::string_view text);
long parse_integer(std::string_view text);

std::string trim(std::string_view s);

} // namespace oamsim

#endif
