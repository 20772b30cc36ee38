#ifndef OAMSIM_COMMANDS_HPP
#define OAMSIM_COMMANDS_HPP

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace oamsim
{
using Metrics = std::vector<std::pair<std::string, double>>;

struct Output
{
    std::filesystem::path dir;
    bool svg = true;
};

// Runs settings.command. Artifacts go to `out` when given; a sweep passes
// nullptr and only keeps the metrics.
Metrics run_command(const Settings &settings, const Output *out);

// Metric names run_command reports for these settings, in order.
std::vector<std::string> metric_names(const Settings &settings);

// Entire command line; returns the process exit code.
int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err);

enum ExitCode
{
    exit_ok = 0,
    exit_validation = 2,
    exit_numerical = 3,
    exit_partial_sweep = 4,
};

} // namespace oamsim

#endif
