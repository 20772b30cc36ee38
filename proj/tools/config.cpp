#include "config.hpp"

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace oamsim
{
const std::vector<KeyDef> &schema()
{
    static const std::vector<KeyDef> keys{
        {"run", "command", Kind::Text, false, "memory"},

        {"lattice", "kappa", Kind::Rate, false, "1 kappa"},
        {"lattice", "omega0", Kind::Rate, false, "0 kappa"},
        {"lattice", "half_width", Kind::Integer, false, "0"},
        {"lattice", "num_aux", Kind::Integer, false, "1"},
        {"lattice", "step_index", Kind::Integer, false, "1"},

        {"losses", "port", Kind::Rate, false, "4 kappa"},
        {"losses", "near_port", Kind::Rate, false, "0 kappa"},
        {"losses", "decay_length", Kind::Number, false, "1"},
        {"losses", "uniform", Kind::Rate, false, "0 kappa"},

        {"pulse", "shape", Kind::Text, false, "gaussian"},
        {"pulse", "amplitude", Kind::Number, false, "1"},
        {"pulse", "width", Kind::Time, false, "2.5 /kappa"},
        {"pulse", "center", Kind::Time, false, "10 /kappa"},
        {"pulse", "detuning", Kind::Rate, false, "0 kappa"},

        {"time", "start", Kind::Time, false, "0 /kappa"},
        {"time", "end", Kind::Time, false, "40 /kappa"},
        {"time", "dt", Kind::Time, false, "0.001 /kappa"},
        {"time", "frame", Kind::Text, false, "rotating"},

        {"schedule", "times", Kind::Time, true, "0 /kappa"},
        {"schedule", "phases", Kind::Phase, true, "0"},
        {"schedule", "ramps", Kind::Time, true, "0 /kappa"},
        {"schedule", "shape", Kind::Text, false, "raised_cosine"},

        {"memory", "variant", Kind::Text, false, "preset_echo"},
        {"memory", "t_io", Kind::Time, false, "20 /kappa"},
        {"memory", "t_s", Kind::Time, false, "10 /kappa"},
        {"memory", "ramp", Kind::Time, false, "1 /kappa"},
        {"memory", "readout", Kind::Time, false, "0 /kappa"},
        {"memory", "pulse_width", Kind::Time, false, "2.5 /kappa"},
        {"memory", "dt", Kind::Time, false, "0.001 /kappa"},
        {"memory", "l_max", Kind::Integer, false, "0"},

        {"bands", "phi", Kind::Phase, true, "0"},
        {"bands", "num_aux", Kind::Integer, false, "1"},
        {"bands", "points", Kind::Integer, false, "256"},

        {"filter", "omega_min", Kind::Rate, false, "-3 kappa"},
        {"filter", "omega_max", Kind::Rate, false, "3 kappa"},
        {"filter", "points", Kind::Integer, false, "2001"},
        {"filter", "threads", Kind::Integer, false, "1"},
        {"filter", "max_sites", Kind::Integer, false, "32768"},
        {"filter", "combine", Kind::Text, false, "cascade"},

        {"stage", "absorb_offset", Kind::Rate, false, ""},
        {"stage", "port", Kind::Rate, false, ""},
        {"stage", "near_port", Kind::Rate, false, "0.1 kappa"},
        {"stage", "uniform", Kind::Rate, false, "0.1 kappa"},

        {"design", "center", Kind::Rate, false, "0 kappa"},
        {"design", "width", Kind::Rate, false, "4.4 kappa"},
        {"design", "rejection", Kind::Number, false, "25"},
        {"design", "near_port", Kind::Rate, false, "0.1 kappa"},
        {"design", "uniform", Kind::Rate, false, "0.1 kappa"},
        {"design", "points", Kind::Integer, false, "2001"},

        {"params", "length", Kind::Length, false, "0.3 m"},
        {"params", "reflectivity", Kind::Number, false, "0.25"},

        {"output", "svg", Kind::Bool, false, "true"},
    };
    return keys;
}

namespace
{
// "stage3" -> 3, anything else -> 0
int stage_number(const std::string &section)
{
    if (section.rfind("stage", 0) != 0 || section.size() == 5) {
        return 0;
    }
    try {
        const long n = parse_integer(section.substr(5));
        return n >= 1 && n <= max_stages ? static_cast<int>(n) : 0;
    } catch (const std::invalid_argument &) {
        return 0;
    }
}

std::string template_section(const std::string &section) { return stage_number(section) > 0 ? "stage" : section; }

bool known_section(const std::string &section)
{
    const std::string t = template_section(section);
    return std::any_of(schema().begin(), schema().end(), [&](const KeyDef &k) { return k.section == t; });
}
} // namespace

const KeyDef *find_key(const std::string &dotted)
{
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) {
        return nullptr;
    }
    const std::string section = template_section(dotted.substr(0, dot));
    const std::string key = dotted.substr(dot + 1);
    for (const auto &k : schema()) {
        if (k.section == section && k.key == key) {
            return &k;
        }
    }
    return nullptr;
}

ValidationError::ValidationError(std::vector<Issue> issues)
    : oam::ConfigError([&] {
          std::string msg = "invalid configuration:";
          for (const auto &i : issues) {
              msg += fmt::format("\n  {}: {}", i.key, i.message);
          }
          return msg;
      }()),
      issues_(std::move(issues))
{
}

ValidationError::ValidationError(const std::string &key, const std::string &message)
    : ValidationError(std::vector<Issue>{{key, message}})
{
}

std::vector<std::string> split_list(const std::string &s)
{
    std::string body = trim(s);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
        body = body.substr(1, body.size() - 2);
    }
    std::vector<std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

RawConfig RawConfig::from_yaml(const std::string &text)
{
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception &e) {
        throw ValidationError("<file>", e.what());
    }
    RawConfig cfg;
    if (!root || root.IsNull()) {
        return cfg;
    }
    if (!root.IsMap()) {
        throw ValidationError("<file>", "top level must be a mapping of sections");
    }
    std::vector<Issue> issues;
    for (const auto &sec : root) {
        const std::string section = sec.first.as<std::string>();
        if (!known_section(section)) {
            issues.push_back({section, "unknown section"});
            continue;
        }
        if (!sec.second.IsMap()) {
            issues.push_back({section, "section must be a mapping of keys"});
            continue;
        }
        for (const auto &kv : sec.second) {
            const std::string dotted = section + "." + kv.first.as<std::string>();
            const KeyDef *def = find_key(dotted);
            if (def == nullptr) {
                issues.push_back({dotted, "unknown key"});
                continue;
            }
            const YAML::Node &v = kv.second;
            if (v.IsSequence()) {
                if (!def->list) {
                    issues.push_back({dotted, "expects a single value, got a list"});
                    continue;
                }
                std::vector<std::string> items;
                bool ok = true;
                for (const auto &item : v) {
                    if (!item.IsScalar()) {
                        ok = false;
                        break;
                    }
                    items.push_back(trim(item.Scalar()));
                }
                if (!ok) {
                    issues.push_back({dotted, "list items must be scalars"});
                    continue;
                }
                cfg.values_[dotted] = std::move(items);
            } else if (v.IsScalar()) {
                cfg.values_[dotted] = def->list ? split_list(v.Scalar()) : std::vector<std::string>{trim(v.Scalar())};
            } else {
                issues.push_back({dotted, "value must be a scalar or a list"});
            }
        }
    }
    if (!issues.empty()) {
        throw ValidationError(std::move(issues));
    }
    return cfg;
}

RawConfig RawConfig::from_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("--config", fmt::format("cannot read '{}'", path));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return from_yaml(ss.str());
}

void RawConfig::set(const std::string &dotted, const std::string &value)
{
    const KeyDef *def = find_key(dotted);
    if (def == nullptr) {
        throw ValidationError(dotted, "unknown key");
    }
    values_[dotted] = def->list ? split_list(value) : std::vector<std::string>{trim(value)};
}

void RawConfig::set_list(const std::string &dotted, std::vector<std::string> values)
{
    if (find_key(dotted) == nullptr) {
        throw ValidationError(dotted, "unknown key");
    }
    values_[dotted] = std::move(values);
}

std::string RawConfig::text(const std::string &dotted) const
{
    const auto it = values_.find(dotted);
    if (it != values_.end()) {
        std::string joined;
        for (std::size_t i = 0; i < it->second.size(); ++i) {
            joined += (i ? "," : "") + it->second[i];
        }
        return joined;
    }
    const KeyDef *def = find_key(dotted);
    return def ? def->fallback : std::string{};
}

std::vector<std::string> RawConfig::list(const std::string &dotted) const
{
    const auto it = values_.find(dotted);
    if (it != values_.end()) {
        return it->second;
    }
    const KeyDef *def = find_key(dotted);
    if (def == nullptr || def->fallback.empty()) {
        return {};
    }
    return split_list(def->fallback);
}

std::vector<int> RawConfig::stages() const
{
    std::set<int> found;
    for (const auto &kv : values_) {
        const int n = stage_number(kv.first.substr(0, kv.first.find('.')));
        if (n > 0) {
            found.insert(n);
        }
    }
    return {found.begin(), found.end()};
}

std::string RawConfig::manifest() const
{
    KappaScale kappa;
    try {
        kappa = absolute_rate(text("lattice.kappa"));
    } catch (const std::invalid_argument &) {
    }

    std::vector<std::string> sections;
    for (const auto &k : schema()) {
        if (k.section == "stage") {
            continue;
        }
        if (std::find(sections.begin(), sections.end(), k.section) == sections.end()) {
            sections.push_back(k.section);
        }
    }
    for (int n : stages()) {
        sections.push_back(fmt::format("stage{}", n));
    }

    auto resolved = [&](const KeyDef &def, const std::string &v) -> std::string {
        if (def.kind == Kind::Rate || def.kind == Kind::Time || def.kind == Kind::Phase || def.kind == Kind::Length) {
            try {
                return fmt::format("{:.17g}", parse_quantity(v, def.kind, kappa));
            } catch (const std::invalid_argument &) {
            }
        }
        return {};
    };

    YAML::Emitter out;
    out << YAML::Comment("fully resolved configuration; rates in kappa, times in 1/kappa, phases in rad");
    out << YAML::BeginMap;
    for (const auto &section : sections) {
        out << YAML::Key << section << YAML::Value << YAML::BeginMap;
        const std::string tmpl = template_section(section);
        for (const auto &def : schema()) {
            if (def.section != tmpl) {
                continue;
            }
            const std::string dotted = section + "." + def.key;
            if (!has(dotted) && def.fallback.empty()) {
                continue;
            }
            out << YAML::Key << def.key << YAML::Value;
            if (def.list) {
                const auto items = list(dotted);
                out << YAML::Flow << YAML::BeginSeq;
                for (const auto &i : items) {
                    out << YAML::DoubleQuoted << i;
                }
                out << YAML::EndSeq;
                std::string note;
                for (const auto &i : items) {
                    const std::string r = resolved(def, i);
                    if (!r.empty()) {
                        note += (note.empty() ? "" : ", ") + r;
                    }
                }
                if (!note.empty()) {
                    out << YAML::Comment(note);
                }
            } else {
                const std::string v = text(dotted);
                out << YAML::DoubleQuoted << v;
                const std::string r = resolved(def, v);
                if (!r.empty()) {
                    out << YAML::Comment(r);
                }
            }
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

// ---------------------------------------------------------------------------

namespace
{
class Resolver
{
public:
    explicit Resolver(const RawConfig &raw) : raw_(raw) {}

    KappaScale kappa;
    std::vector<Issue> issues;

    double num(const std::string &dotted)
    {
        const KeyDef *def = find_key(dotted);
        try {
            return parse_quantity(raw_.text(dotted), def->kind, kappa);
        } catch (const std::invalid_argument &e) {
            issues.push_back({dotted, e.what()});
            return 0.0;
        }
    }

    int integer(const std::string &dotted, long lo, long hi)
    {
        try {
            const long v = parse_integer(raw_.text(dotted));
            if (v < lo || v > hi) {
                issues.push_back({dotted, fmt::format("must lie in [{}, {}] (got {})", lo, hi, v)});
                return static_cast<int>(lo);
            }
            return static_cast<int>(v);
        } catch (const std::invalid_argument &e) {
            issues.push_back({dotted, e.what()});
            return static_cast<int>(lo);
        }
    }

    bool boolean(const std::string &dotted)
    {
        try {
            return parse_bool(raw_.text(dotted));
        } catch (const std::invalid_argument &e) {
            issues.push_back({dotted, e.what()});
            return false;
        }
    }

    std::vector<double> nums(const std::string &dotted)
    {
        const KeyDef *def = find_key(dotted);
        std::vector<double> out;
        for (const auto &item : raw_.list(dotted)) {
            try {
                out.push_back(parse_quantity(item, def->kind, kappa));
            } catch (const std::invalid_argument &e) {
                issues.push_back({dotted, e.what()});
            }
        }
        return out;
    }

    std::string choice(const std::string &dotted, std::initializer_list<const char *> allowed)
    {
        const std::string v = raw_.text(dotted);
        for (const char *a : allowed) {
            if (v == a) {
                return v;
            }
        }
        std::string opts;
        for (const char *a : allowed) {
            opts += (opts.empty() ? "" : ", ") + std::string(a);
        }
        issues.push_back({dotted, fmt::format("'{}' is not one of: {}", v, opts)});
        return *allowed.begin();
    }

    bool already_flagged(const std::string &dotted) const
    {
        for (const auto &i : issues) {
            if (i.key == dotted) {
                return true;
            }
        }
        return false;
    }

    void nonnegative(const std::string &dotted, double v)
    {
        if (v < 0.0 && !already_flagged(dotted)) {
            issues.push_back({dotted, "must not be negative"});
        }
    }

    void positive(const std::string &dotted, double v)
    {
        if (!(v > 0.0) && !already_flagged(dotted)) {
            issues.push_back({dotted, "must be positive"});
        }
    }

private:
    const RawConfig &raw_;
};
} // namespace

Settings resolve(const RawConfig &raw)
{
    Resolver r(raw);
    Settings s;

    s.command = r.choice("run.command", {"memory", "simulate", "bands", "filter", "design", "params"});

    try {
        r.kappa = absolute_rate(raw.text("lattice.kappa"));
        const double k = r.kappa ? *r.kappa : parse_quantity(raw.text("lattice.kappa"), Kind::Rate, std::nullopt);
        if (!(k > 0.0)) {
            r.issues.push_back({"lattice.kappa", "must be positive"});
        } else if (!r.kappa && k != 1.0) {
            r.issues.push_back({"lattice.kappa", "in kappa units the only meaningful value is 1 kappa"});
        }
    } catch (const std::invalid_argument &e) {
        r.issues.push_back({"lattice.kappa", e.what()});
    }
    s.kappa_abs = r.kappa;
    s.omega0 = r.num("lattice.omega0");
    s.half_width = r.integer("lattice.half_width", 0, 1 << 20);
    s.num_aux = r.integer("lattice.num_aux", 1, 2);
    s.step_index = r.integer("lattice.step_index", 1, 1 << 20);

    s.losses.port_rate = r.num("losses.port");
    s.losses.near_port = r.num("losses.near_port");
    s.losses.decay_length = r.num("losses.decay_length");
    s.losses.uniform = r.num("losses.uniform");
    r.nonnegative("losses.port", s.losses.port_rate);
    r.nonnegative("losses.near_port", s.losses.near_port);
    r.positive("losses.decay_length", s.losses.decay_length);
    r.nonnegative("losses.uniform", s.losses.uniform);

    s.pulse_shape = r.choice("pulse.shape", {"gaussian", "none"});
    s.amplitude = r.num("pulse.amplitude");
    s.pulse_width = r.num("pulse.width");
    s.pulse_center = r.num("pulse.center");
    s.detuning = r.num("pulse.detuning");
    r.positive("pulse.width", s.pulse_width);

    s.t_start = r.num("time.start");
    s.t_end = r.num("time.end");
    s.dt = r.num("time.dt");
    s.rotating = r.choice("time.frame", {"rotating", "lab"}) == "rotating";
    r.positive("time.dt", s.dt);
    if (s.t_end <= s.t_start) {
        r.issues.push_back({"time.end", "must be later than time.start"});
    }

    s.schedule_times = r.nums("schedule.times");
    s.schedule_phases = r.nums("schedule.phases");
    s.schedule_ramps = r.nums("schedule.ramps");
    if (s.schedule_phases.size() != s.schedule_times.size() || s.schedule_ramps.size() != s.schedule_times.size()) {
        r.issues.push_back({"schedule", fmt::format("times, phases and ramps must have equal length ({}, {}, {})",
                                                    s.schedule_times.size(), s.schedule_phases.size(),
                                                    s.schedule_ramps.size())});
    }
    s.ramp_shape =
        r.choice("schedule.shape", {"raised_cosine", "linear"}) == "linear" ? oam::RampShape::Linear
                                                                            : oam::RampShape::RaisedCosine;

    s.memory_variant = r.choice("memory.variant", {"preset_echo", "on_demand"});
    s.t_io = r.num("memory.t_io");
    s.t_s = r.num("memory.t_s");
    s.ramp = r.num("memory.ramp");
    s.readout = r.num("memory.readout");
    s.memory_pulse = r.num("memory.pulse_width");
    s.memory_dt = r.num("memory.dt");
    s.l_max = r.integer("memory.l_max", 0, 1 << 20);
    r.positive("memory.t_io", s.t_io);
    r.positive("memory.t_s", s.t_s);
    r.nonnegative("memory.ramp", s.ramp);
    r.nonnegative("memory.readout", s.readout);
    r.positive("memory.pulse_width", s.memory_pulse);
    r.positive("memory.dt", s.memory_dt);

    s.band_phis = r.nums("bands.phi");
    s.band_num_aux = r.integer("bands.num_aux", 1, 2);
    s.band_points = r.integer("bands.points", 2, 1 << 24);
    if (s.band_phis.empty()) {
        r.issues.push_back({"bands.phi", "needs at least one phase"});
    }

    s.filter_min = r.num("filter.omega_min");
    s.filter_max = r.num("filter.omega_max");
    s.filter_points = r.integer("filter.points", 3, 1 << 24);
    s.filter_threads = r.integer("filter.threads", 1, 256);
    s.filter_max_sites = r.integer("filter.max_sites", 16, 1 << 24);
    s.filter_combine = r.choice("filter.combine", {"cascade", "separate"});
    if (s.filter_max <= s.filter_min) {
        r.issues.push_back({"filter.omega_max", "must exceed filter.omega_min"});
    }
    for (int n : raw.stages()) {
        const std::string sec = fmt::format("stage{}", n);
        StageSettings st;
        st.index = n;
        const bool has_offset = raw.has(sec + ".absorb_offset");
        const bool has_port = raw.has(sec + ".port");
        if (has_offset == has_port) {
            r.issues.push_back({sec, "give exactly one of absorb_offset and port"});
        }
        st.has_offset = has_offset;
        if (has_offset) {
            st.absorb_offset = r.num(sec + ".absorb_offset");
        }
        if (has_port) {
            st.port = r.num(sec + ".port");
            r.nonnegative(sec + ".port", st.port);
        }
        st.near_port = r.num(sec + ".near_port");
        st.uniform = r.num(sec + ".uniform");
        r.nonnegative(sec + ".near_port", st.near_port);
        r.nonnegative(sec + ".uniform", st.uniform);
        s.stages.push_back(st);
    }

    s.design_center = r.num("design.center");
    s.design_width = r.num("design.width");
    s.design_rejection = r.num("design.rejection");
    s.design_near_port = r.num("design.near_port");
    s.design_uniform = r.num("design.uniform");
    s.design_points = r.integer("design.points", 101, 1 << 24);
    r.positive("design.width", s.design_width);

    s.cavity_length = r.num("params.length");
    s.reflectivity = r.num("params.reflectivity");
    r.positive("params.length", s.cavity_length);
    if (s.reflectivity < 0.0 || s.reflectivity >= 1.0) {
        r.issues.push_back({"params.reflectivity", "must lie in [0, 1)"});
    }

    s.svg = r.boolean("output.svg");

    if (!r.issues.empty()) {
        throw ValidationError(std::move(r.issues));
    }
    return s;
}

} // namespace oamsim
