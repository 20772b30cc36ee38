#include "commands.hpp"
#include "presets.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <thread>

namespace oamsim
{
namespace
{
using json = nlohmann::ordered_json;

struct Options
{
    std::string config;
    std::string preset;
    std::string out_dir = "oamsim-out";
    std::vector<std::string> sets;
    std::vector<std::string> sweeps;
    int jobs = 1;
    bool no_svg = false;
    std::string phi;
    std::string num_aux;
};

struct Axis
{
    std::string key;
    std::vector<std::string> values;
};

std::pair<std::string, std::string> split_assignment(const std::string &s, const char *flag)
{
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ValidationError(flag, fmt::format("'{}' is not of the form key=value", s));
    }
    return {trim(s.substr(0, eq)), s.substr(eq + 1)};
}

RawConfig load(const Options &o)
{
    RawConfig raw;
    if (!o.preset.empty()) {
        const auto it = embedded_presets().find(o.preset);
        if (it == embedded_presets().end()) {
            std::string names;
            for (const auto &[k, v] : embedded_presets()) {
                names += (names.empty() ? "" : ", ") + k;
            }
            throw ValidationError("--preset", fmt::format("unknown preset '{}' (available: {})", o.preset, names));
        }
        raw = RawConfig::from_yaml(std::string(it->second));
    } else if (!o.config.empty()) {
        raw = RawConfig::from_file(o.config);
    }
    std::vector<Issue> issues;
    for (const auto &s : o.sets) {
        try {
            const auto [k, v] = split_assignment(s, "--set");
            raw.set(k, v);
        } catch (const ValidationError &e) {
            issues.insert(issues.end(), e.issues().begin(), e.issues().end());
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    if (!o.phi.empty()) {
        raw.set("bands.phi", o.phi);
    }
    if (!o.num_aux.empty()) {
        raw.set("bands.num_aux", o.num_aux);
    }
    return raw;
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') {
            q += '"';
        }
    }
    return q + "\"";
}

std::string format_value(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "nan"; }

void print_metrics(std::ostream &out, const Metrics &m)
{
    for (const auto &[k, v] : m) {
        out << fmt::format("  {:<24} {}\n", k, format_value(v));
    }
}

void prepare_dir(const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw ValidationError("--out", fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
    }
}

void write_manifest(const std::filesystem::path &dir, const RawConfig &raw, const std::vector<Axis> &axes)
{
    std::ofstream f(dir / "manifest.yaml", std::ios::binary);
    for (const auto &a : axes) {
        std::string vals;
        for (const auto &v : a.values) {
            vals += (vals.empty() ? "" : ",") + v;
        }
        f << "# sweep " << a.key << "=" << vals << "\n";
    }
    f << raw.manifest();
}

int run_single(const std::string &command, const Options &o, std::ostream &out)
{
    RawConfig raw = load(o);
    raw.set("run.command", command);
    const Settings s = resolve(raw);
    const std::filesystem::path dir = o.out_dir;
    prepare_dir(dir);
    write_manifest(dir, raw, {});
    const Output target{dir, s.svg && !o.no_svg};
    const Metrics m = run_command(s, &target);
    out << fmt::format("{}: wrote {}\n", command, dir.string());
    print_metrics(out, m);
    return exit_ok;
}

int run_sweep(const Options &o, std::ostream &out)
{
    const RawConfig base = load(o);
    if (o.sweeps.empty()) {
        throw ValidationError("--sweep", "sweep needs at least one --sweep key=v1,v2,...");
    }
    std::vector<Axis> axes;
    std::vector<Issue> issues;
    for (const auto &s : o.sweeps) {
        const auto [key, vals] = split_assignment(s, "--sweep");
        const KeyDef *def = find_key(key);
        if (def == nullptr) {
            issues.push_back({key, "unknown key"});
        } else if (def->list) {
            issues.push_back({key, "list-valued keys cannot be swept"});
        } else if (key == "run.command") {
            issues.push_back({key, "the command cannot be swept"});
        }
        axes.push_back({key, split_list(vals)});
        if (axes.back().values.empty()) {
            issues.push_back({key, "no values"});
        }
    }
    if (o.jobs < 1) {
        issues.push_back({"--jobs", "must be at least 1"});
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    const auto names = metric_names(resolve(base));

    std::size_t total = 1;
    for (const auto &a : axes) {
        total *= a.values.size();
    }
    // point index -> value index per axis, last axis fastest
    auto point = [&](std::size_t idx) {
        std::vector<std::size_t> pos(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            pos[k] = idx % axes[k].values.size();
            idx /= axes[k].values.size();
        }
        return pos;
    };

    struct Row
    {
        Metrics metrics;
        std::string error;
    };
    std::vector<Row> rows(total);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                RawConfig raw = base;
                const auto pos = point(i);
                for (std::size_t k = 0; k < axes.size(); ++k) {
                    raw.set(axes[k].key, axes[k].values[pos[k]]);
                }
                Settings s = resolve(raw);
                s.filter_threads = 1;
                rows[i].metrics = run_command(s, nullptr);
            } catch (const std::exception &e) {
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                rows[i].error = msg;
            }
        }
    };
    const int workers = std::min<int>(o.jobs, static_cast<int>(total));
    std::vector<std::thread> pool;
    for (int t = 1; t < workers; ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }

    const std::filesystem::path dir = o.out_dir;
    prepare_dir(dir);
    write_manifest(dir, base, axes);
    std::size_t failed = 0;
    std::ofstream f(dir / "sweep.csv", std::ios::binary);
    for (const auto &a : axes) {
        f << csv_field(a.key) << ",";
    }
    for (const auto &n : names) {
        f << csv_field(n) << ",";
    }
    f << "error\n";
    for (std::size_t i = 0; i < total; ++i) {
        const auto pos = point(i);
        for (std::size_t k = 0; k < axes.size(); ++k) {
            f << csv_field(axes[k].values[pos[k]]) << ",";
        }
        for (const auto &n : names) {
            if (rows[i].error.empty()) {
                double v = std::nan("");
                for (const auto &[k, val] : rows[i].metrics) {
                    if (k == n) {
                        v = val;
                    }
                }
                f << format_value(v);
            }
            f << ",";
        }
        f << csv_field(rows[i].error) << "\n";
        failed += rows[i].error.empty() ? 0 : 1;
    }
    out << fmt::format("sweep: {} points, {} failed, wrote {}\n", total, failed, (dir / "sweep.csv").string());
    return failed == 0 ? exit_ok : exit_partial_sweep;
}

void report_error(std::ostream &err, const std::string &out_dir, int code, const std::string &kind,
                  const std::string &message, const std::vector<Issue> &issues, const std::string &suggestion)
{
    json j;
    j["status"] = "error";
    j["exit_code"] = code;
    j["kind"] = kind;
    j["message"] = message;
    json list = json::array();
    for (const auto &i : issues) {
        list.push_back({{"key", i.key}, {"message", i.message}});
    }
    j["issues"] = list;
    j["suggestion"] = suggestion;
    err << j.dump() << "\n";
    std::error_code ec;
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir, ec);
    }
    if (!out_dir.empty() && !ec) {
        std::ofstream(std::filesystem::path(out_dir) / "error.json") << j.dump(2) << "\n";
    }
}
} // namespace

int cli_main(int argc, char **argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"OAM synthetic-lattice simulator"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App *sub) {
        auto *cfg = sub->add_option("--config", o.config, "scenario file (YAML)");
        auto *pre = sub->add_option("--preset", o.preset, "built-in scenario");
        cfg->excludes(pre);
        sub->add_option("--out", o.out_dir, "output directory");
        sub->add_option("--set", o.sets, "override, section.key=value (repeatable)");
        sub->add_flag("--no-svg", o.no_svg, "skip SVG plots");
    };

    std::vector<std::pair<std::string, CLI::App *>> subs;
    for (const char *name : {"simulate", "memory", "bands", "filter", "design", "params"}) {
        CLI::App *sub = app.add_subcommand(name);
        common(sub);
        if (std::string(name) == "bands") {
            sub->add_option("--phi", o.phi, "comma separated phases (rad)");
            sub->add_option("--num-aux", o.num_aux, "1 or 2 auxiliary cavities");
        }
        subs.emplace_back(name, sub);
    }
    CLI::App *sweep = app.add_subcommand("sweep", "run the configured command over a grid of values");
    common(sweep);
    sweep->add_option("--sweep", o.sweeps, "axis, section.key=v1,v2,... (repeatable)");
    sweep->add_option("--jobs", o.jobs, "parallel points");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        report_error(err, "", exit_validation, "usage", e.what(), {}, "see --help");
        return exit_validation;
    }

    try {
        if (sweep->parsed()) {
            return run_sweep(o, out);
        }
        for (const auto &[name, sub] : subs) {
            if (sub->parsed()) {
                return run_single(name, o, out);
            }
        }
        return exit_validation;
    } catch (const ValidationError &e) {
        report_error(err, o.out_dir, exit_validation, "validation", e.what(), e.issues(), "");
        return exit_validation;
    } catch (const oam::NumericalError &e) {
        report_error(err, o.out_dir, exit_numerical, "numerical", e.what(), {}, e.suggestion());
        return exit_numerical;
    } catch (const std::logic_error &e) {
        // bad input caught by the library: ConfigError, IndexError, BandEdgeError
        report_error(err, o.out_dir, exit_validation, "validation", e.what(), {}, "");
        return exit_validation;
    } catch (const std::exception &e) {
        report_error(err, o.out_dir, exit_numerical, "runtime", e.what(), {}, "");
        return exit_numerical;
    }
}

} // namespace oamsim
