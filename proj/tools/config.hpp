#ifndef OAMSIM_CONFIG_HPP
#define OAMSIM_CONFIG_HPP

#include "units.hpp"

#include <oam/errors.hpp>
#include <oam/lattice.hpp>

#include <map>
#include <string>
#include <vector>

namespace oamsim
{
struct KeyDef
{
    std::string section; // "stage" stands for stage1, stage2, ...
    std::string key;
    Kind kind;
    bool list = false;
    std::string fallback; // empty: unset unless given
};

const std::vector<KeyDef> &schema();
// nullptr for unknown keys. Accepts "stageN.key" for N in 1..max_stages.
const KeyDef *find_key(const std::string &dotted);
inline constexpr int max_stages = 8;

struct Issue
{
    std::string key;
    std::string message;
};

// Config problems, all of them at once.
class ValidationError : public oam::ConfigError
{
public:
    explicit ValidationError(std::vector<Issue> issues);
    ValidationError(const std::string &key, const std::string &message);
    const std::vector<Issue> &issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

// Text values as written by the user, keyed "section.key".
class RawConfig
{
public:
    static RawConfig from_yaml(const std::string &text);
    static RawConfig from_file(const std::string &path);

    // --set section.key=value; lists are comma separated.
    void set(const std::string &dotted, const std::string &value);
    void set_list(const std::string &dotted, std::vector<std::string> values);

    bool has(const std::string &dotted) const { return values_.count(dotted) != 0; }
    std::string text(const std::string &dotted) const;
    std::vector<std::string> list(const std::string &dotted) const;
    std::vector<int> stages() const;

    // YAML echo of every key (given or defaulted), with values resolved to
    // the internal units added as comments.
    std::string manifest() const;

private:
    std::map<std::string, std::vector<std::string>> values_;
};

std::vector<std::string> split_list(const std::string &s);

// ---------------------------------------------------------------------------
// Resolved settings. Rates are in units of kappa, times in 1/kappa.

struct StageSettings
{
    int index = 0;
    bool has_offset = false;
    double absorb_offset = 0.0;
    double port = 0.0;
    double near_port = 0.0;
    double uniform = 0.0;
};

struct Settings
{
    std::string command;
    KappaScale kappa_abs; // rad/s

    int half_width = 0;
    int num_aux = 1;
    int step_index = 1;
    double omega0 = 0.0;

    oam::LossModel losses;

    std::string pulse_shape;
    double amplitude = 1.0;
    double pulse_width = 0.0;
    double pulse_center = 0.0;
    double detuning = 0.0;

    double t_start = 0.0;
    double t_end = 0.0;
    double dt = 0.0;
    bool rotating = true;

    std::vector<double> schedule_times, schedule_phases, schedule_ramps;
    oam::RampShape ramp_shape = oam::RampShape::RaisedCosine;

    std::string memory_variant;
    double t_io = 0.0, t_s = 0.0, ramp = 0.0, readout = 0.0, memory_pulse = 0.0, memory_dt = 0.0;
    int l_max = 0;

    std::vector<double> band_phis;
    int band_num_aux = 1;
    int band_points = 0;

    double filter_min = 0.0, filter_max = 0.0;
    int filter_points = 0;
    int filter_threads = 1;
    int filter_max_sites = 1 << 15;
    std::string filter_combine;
    std::vector<StageSettings> stages;

    double design_center = 0.0, design_width = 0.0, design_rejection = 0.0;
    double design_near_port = 0.0, design_uniform = 0.0;
    int design_points = 0;

    double cavity_length = 0.0, reflectivity = 0.0;

    bool svg = true;
};

// Throws ValidationError listing every bad key.
Settings resolve(const RawConfig &raw);

} // namespace oamsim

#endif
