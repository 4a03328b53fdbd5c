#include "bacsim/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "bacsim/error.hpp"

namespace bacsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Reader
{
public:
    explicit Reader(std::vector<std::string>& issues) : issues_(issues) {}

    void known_keys(const YAML::Node& node, const std::string& section, const std::set<std::string>& keys)
    {
        if (!node.IsMap()) {
            issues_.push_back(fmt::format("'{}' must be a mapping", section));
            return;
        }
        for (const auto& kv : node) {
            const auto key = kv.first.as<std::string>();
            if (!keys.contains(key))
                issues_.push_back(fmt::format("unknown key '{}' in {}", key, section));
        }
    }

    template <typename T>
    void get(const YAML::Node& node, const char* key, const std::string& where, T& out)
    {
        const auto child = node[key];
        if (!child)
            return;
        try {
            out = child.as<T>();
        } catch (const YAML::Exception&) {
            issues_.push_back(fmt::format("{}.{}: expected {}", where, key, type_name<T>()));
        }
    }

    double number(const YAML::Node& node, const std::string& where)
    {
        if (node.IsScalar()) {
            const auto text = node.as<std::string>();
            if (text == "inf" || text == "infinity" || text == ".inf")
                return kInf;
            try {
                return node.as<double>();
            } catch (const YAML::Exception&) {
            }
        }
        issues_.push_back(fmt::format("{}: expected a number", where));
        return std::nan("");
    }

    std::vector<double> numbers(const YAML::Node& node, const std::string& where)
    {
        std::vector<double> out;
        if (!node.IsSequence()) {
            issues_.push_back(fmt::format("{}: expected a list of numbers", where));
            return out;
        }
        for (std::size_t i = 0; i < node.size(); ++i)
            out.push_back(number(node[i], fmt::format("{}[{}]", where, i)));
        return out;
    }

    // A list of integers, or a range string "lo..hi".
    std::vector<int> integers(const YAML::Node& node, const std::string& where)
    {
        std::vector<int> out;
        if (node.IsScalar()) {
            const auto text = node.as<std::string>();
            const auto dots = text.find("..");
            int lo = 0, hi = 0;
            if (dots != std::string::npos && parse(text.substr(0, dots), lo) && parse(text.substr(dots + 2), hi) &&
                lo <= hi) {
                for (int v = lo; v <= hi; ++v)
                    out.push_back(v);
                return out;
            }
        } else if (node.IsSequence()) {
            for (std::size_t i = 0; i < node.size(); ++i) {
                try {
                    out.push_back(node[i].as<int>());
                } catch (const YAML::Exception&) {
                    issues_.push_back(fmt::format("{}[{}]: expected an integer", where, i));
                }
            }
            return out;
        }
        issues_.push_back(fmt::format("{}: expected a list of integers or a range like 0..10", where));
        return out;
    }

private:
    static bool parse(const std::string& s, int& v)
    {
        try {
            std::size_t used = 0;
            v = std::stoi(s, &used);
            return used == s.size();
        } catch (...) {
            return false;
        }
    }

    template <typename T>
    static const char* type_name()
    {
        if constexpr (std::is_same_v<T, bool>)
            return "a boolean";
        else if constexpr (std::is_integral_v<T>)
            return "an integer";
        else if constexpr (std::is_floating_point_v<T>)
            return "a number";
        else
            return "a string";
    }

    std::vector<std::string>& issues_;
};

void read_dataset(Reader& rd, const YAML::Node& node, ScenarioConfig& cfg, std::vector<std::string>& issues)
{
    rd.known_keys(node, "dataset", {"path", "flavor", "duration_unit", "connector_column", "columns"});
    if (!node.IsMap())
        return;
    DatasetConfig ds;
    std::string path, flavor = "domestic", unit = "hours", connector;
    rd.get(node, "path", "dataset", path);
    rd.get(node, "flavor", "dataset", flavor);
    rd.get(node, "duration_unit", "dataset", unit);
    rd.get(node, "connector_column", "dataset", connector);
    ds.path = path;
    if (path.empty())
        issues.push_back("dataset.path is required");

    if (flavor == "domestic") {
        ds.kind = DatasetKind::domestic;
        ds.ingest.flavor = Flavor::domestic;
    } else if (flavor == "local_authority") {
        ds.kind = DatasetKind::local_authority;
        ds.ingest.flavor = Flavor::local_authority;
    } else if (flavor == "profiles") {
        ds.kind = DatasetKind::profiles;
    } else {
        issues.push_back(fmt::format("dataset.flavor '{}' is not one of domestic, local_authority, profiles", flavor));
    }

    if (unit == "hours")
        ds.ingest.duration_unit = DurationUnit::hours;
    else if (unit == "minutes")
        ds.ingest.duration_unit = DurationUnit::minutes;
    else
        issues.push_back(fmt::format("dataset.duration_unit '{}' is not hours or minutes", unit));
    if (ds.kind == DatasetKind::domestic && ds.ingest.duration_unit != DurationUnit::hours)
        issues.push_back("dataset.duration_unit must be hours for the domestic flavor");

    if (!connector.empty())
        ds.ingest.connector_column = connector;

    if (const auto cols = node["columns"]) {
        rd.known_keys(cols, "dataset.columns",
                      {"event_id", "cp_id", "start_date", "start_time", "end_date", "end_time", "energy",
                       "plugin_duration"});
        auto& c = ds.ingest.columns;
        if (cols.IsMap()) {
            rd.get(cols, "event_id", "dataset.columns", c.event_id);
            rd.get(cols, "cp_id", "dataset.columns", c.cp_id);
            rd.get(cols, "start_date", "dataset.columns", c.start_date);
            rd.get(cols, "start_time", "dataset.columns", c.start_time);
            rd.get(cols, "end_date", "dataset.columns", c.end_date);
            rd.get(cols, "end_time", "dataset.columns", c.end_time);
            rd.get(cols, "energy", "dataset.columns", c.energy);
            rd.get(cols, "plugin_duration", "dataset.columns", c.plugin_duration);
        }
    }
    cfg.dataset = std::move(ds);
}

void read_lognormal(Reader& rd, const YAML::Node& node, const std::string& where, LogNormal& out)
{
    rd.known_keys(node, where, {"mu", "sigma"});
    if (node.IsMap()) {
        rd.get(node, "mu", where, out.mu);
        rd.get(node, "sigma", where, out.sigma);
    }
}

void read_synth(Reader& rd, const YAML::Node& node, ScenarioConfig& cfg, std::vector<std::string>& issues)
{
    rd.known_keys(node, "synth",
                  {"seed", "cp_count", "sessions_per_cp", "start_hour_weights", "plugin_hours", "min_plugin_hours",
                   "max_plugin_hours", "energy_kwh", "max_energy_kwh", "ev_max_bands", "min_gap_hours",
                   "horizon_days", "start_date"});
    if (!node.IsMap())
        return;
    SynthSpec spec = SynthSpec::domestic_like();
    rd.get(node, "seed", "synth", spec.seed);
    rd.get(node, "cp_count", "synth", spec.cp_count);
    rd.get(node, "sessions_per_cp", "synth", spec.sessions_per_cp);
    rd.get(node, "min_plugin_hours", "synth", spec.min_plugin_hours);
    rd.get(node, "max_plugin_hours", "synth", spec.max_plugin_hours);
    rd.get(node, "max_energy_kwh", "synth", spec.max_energy_kwh);
    rd.get(node, "min_gap_hours", "synth", spec.min_gap_hours);
    rd.get(node, "horizon_days", "synth", spec.horizon_days);
    rd.get(node, "start_date", "synth", spec.start_date);
    if (const auto w = node["start_hour_weights"]) {
        const auto values = rd.numbers(w, "synth.start_hour_weights");
        if (values.size() != 24)
            issues.push_back(fmt::format("synth.start_hour_weights needs 24 values, got {}", values.size()));
        else
            std::copy(values.begin(), values.end(), spec.start_hour_weights.begin());
    }
    if (const auto p = node["plugin_hours"])
        read_lognormal(rd, p, "synth.plugin_hours", spec.plugin_hours);
    if (const auto e = node["energy_kwh"])
        read_lognormal(rd, e, "synth.energy_kwh", spec.energy_kwh);
    if (const auto bands = node["ev_max_bands"]) {
        spec.ev_max_bands.clear();
        if (!bands.IsSequence()) {
            issues.push_back("synth.ev_max_bands must be a list");
        } else {
            for (std::size_t i = 0; i < bands.size(); ++i) {
                const auto where = fmt::format("synth.ev_max_bands[{}]", i);
                rd.known_keys(bands[i], where, {"min_kw", "max_kw", "weight"});
                WeightedBand b;
                if (bands[i].IsMap()) {
                    rd.get(bands[i], "min_kw", where, b.min_kw);
                    rd.get(bands[i], "max_kw", where, b.max_kw);
                    rd.get(bands[i], "weight", where, b.weight);
                }
                spec.ev_max_bands.push_back(b);
            }
        }
    }
    cfg.synth = std::move(spec);
}

void read_initial(Reader& rd, const YAML::Node& node, ScenarioConfig& cfg, std::vector<std::string>& issues)
{
    const auto text = node.IsScalar() ? node.as<std::string>() : std::string{};
    if (text == "full")
        cfg.initial_fraction = 1.0;
    else if (text == "empty")
        cfg.initial_fraction = 0.0;
    else if (node.IsScalar())
        cfg.initial_fraction = rd.number(node, "battery.initial");
    else
        issues.push_back("battery.initial must be full, empty or a fraction in [0, 1]");
}

bool strictly_increasing(const std::vector<double>& v)
{
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            return false;
    return true;
}

}  // namespace

Flavor ScenarioConfig::flavor() const
{
    if (dataset && dataset->kind == DatasetKind::local_authority)
        return Flavor::local_authority;
    return Flavor::domestic;
}

SpeedBand ScenarioConfig::effective_band() const
{
    return speed_band.value_or(default_band(flavor()));
}

std::vector<double> ScenarioConfig::effective_speed_edges() const
{
    if (speed_edges)
        return *speed_edges;
    if (flavor() == Flavor::local_authority)
        return {0.0, 7.0, 22.0, 100.0, kInf};
    return {0.0, 1.0, 2.3, 3.0, 7.0, 22.0, 100.0, kInf};
}

std::vector<double> ScenarioConfig::effective_energy_edges() const
{
    if (energy_edges)
        return *energy_edges;
    if (flavor() == Flavor::local_authority)
        return {0.0, 11.0, 22.0, 50.0, kInf};
    return {0.0, 3.0, 7.0, 11.0, 22.0};
}

LoadedConfig parse_config(std::string_view yaml_text)
{
    LoadedConfig loaded;
    auto& cfg = loaded.config;
    auto& issues = loaded.issues;

    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw ConfigError(fmt::format("config is not valid YAML: {}", e.what()));
    }
    if (!root.IsMap())
        throw ConfigError("config must be a YAML mapping");

    Reader rd(issues);
    rd.known_keys(root, "config",
                  {"dataset", "synth", "speed_band", "sweep", "battery", "parity_epsilon", "tables", "output",
                   "workers"});

    if (const auto n = root["dataset"])
        read_dataset(rd, n, cfg, issues);
    if (const auto n = root["synth"])
        read_synth(rd, n, cfg, issues);

    if (const auto n = root["speed_band"]) {
        const auto v = rd.numbers(n, "speed_band");
        if (v.size() == 2)
            cfg.speed_band = SpeedBand{v[0], v[1]};
        else
            issues.push_back("speed_band must be [min_kw, max_kw]");
    }

    if (const auto n = root["sweep"]) {
        rd.known_keys(n, "sweep", {"grid_kw", "packs"});
        if (n.IsMap()) {
            if (const auto g = n["grid_kw"])
                cfg.grid_kw = rd.numbers(g, "sweep.grid_kw");
            if (const auto p = n["packs"])
                cfg.pack_counts = rd.integers(p, "sweep.packs");
        }
    }

    if (const auto n = root["battery"]) {
        rd.known_keys(n, "battery", {"pack_capacity_kwh", "pack_power_kw", "initial"});
        if (n.IsMap()) {
            rd.get(n, "pack_capacity_kwh", "battery", cfg.pack_unit.pack_capacity_kwh);
            rd.get(n, "pack_power_kw", "battery", cfg.pack_unit.pack_power_kw);
            if (const auto i = n["initial"])
                read_initial(rd, i, cfg, issues);
        }
    }

    rd.get(root, "parity_epsilon", "config", cfg.parity_epsilon_kwh);
    rd.get(root, "workers", "config", cfg.workers);

    if (const auto n = root["tables"]) {
        rd.known_keys(n, "tables", {"speed_edges", "energy_edges"});
        if (n.IsMap()) {
            if (const auto e = n["speed_edges"])
                cfg.speed_edges = rd.numbers(e, "tables.speed_edges");
            if (const auto e = n["energy_edges"])
                cfg.energy_edges = rd.numbers(e, "tables.energy_edges");
        }
    }

    if (const auto n = root["output"]) {
        rd.known_keys(n, "output", {"dir", "profiles", "synthetic_csv"});
        if (n.IsMap()) {
            std::string dir = cfg.output_dir.string();
            rd.get(n, "dir", "output", dir);
            cfg.output_dir = dir;
            rd.get(n, "profiles", "output", cfg.write_profiles);
            rd.get(n, "synthetic_csv", "output", cfg.keep_synthetic_csv);
        }
    }
    return loaded;
}

LoadedConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::vector<std::string> validate(const ScenarioConfig& cfg)
{
    std::vector<std::string> issues;
    if (cfg.dataset && cfg.synth)
        issues.push_back("dataset and synth are mutually exclusive; configure exactly one");
    if (!cfg.dataset && !cfg.synth)
        issues.push_back("one of dataset or synth is required");

    if (cfg.dataset) {
        std::error_code ec;
        if (cfg.dataset->path.empty())
            issues.push_back("dataset.path is empty");
        else if (!std::filesystem::is_regular_file(cfg.dataset->path, ec))
            issues.push_back(fmt::format("dataset file '{}' does not exist or is not a file",
                                         cfg.dataset->path.string()));
    }
    if (cfg.synth)
        for (auto& issue : validate(*cfg.synth))
            issues.push_back(std::move(issue));

    if (cfg.grid_kw.empty())
        issues.push_back("sweep.grid_kw must list at least one grid power");
    for (const double g : cfg.grid_kw)
        if (!(g > 0.0) || !std::isfinite(g))
            issues.push_back(fmt::format("sweep.grid_kw value {} must be > 0", g));
    if (cfg.pack_counts.empty())
        issues.push_back("sweep.packs must list at least one pack count");
    for (const int p : cfg.pack_counts)
        if (p < 0)
            issues.push_back(fmt::format("sweep.packs value {} must be >= 0", p));

    if (!(cfg.pack_unit.pack_capacity_kwh > 0.0) || !std::isfinite(cfg.pack_unit.pack_capacity_kwh))
        issues.push_back(fmt::format("battery.pack_capacity_kwh must be > 0, got {}", cfg.pack_unit.pack_capacity_kwh));
    if (!(cfg.pack_unit.pack_power_kw > 0.0) || !std::isfinite(cfg.pack_unit.pack_power_kw))
        issues.push_back(fmt::format("battery.pack_power_kw must be > 0, got {}", cfg.pack_unit.pack_power_kw));
    if (!(cfg.initial_fraction >= 0.0 && cfg.initial_fraction <= 1.0))
        issues.push_back(fmt::format("battery.initial fraction {} must be in [0, 1]", cfg.initial_fraction));
    if (!(cfg.parity_epsilon_kwh >= 0.0))
        issues.push_back(fmt::format("parity_epsilon must be >= 0, got {}", cfg.parity_epsilon_kwh));

    if (cfg.speed_band && !(cfg.speed_band->min_kw < cfg.speed_band->max_kw))
        issues.push_back(fmt::format("speed_band [{}, {}) is empty", cfg.speed_band->min_kw, cfg.speed_band->max_kw));
    if (cfg.speed_edges && (cfg.speed_edges->size() < 2 || !strictly_increasing(*cfg.speed_edges)))
        issues.push_back("tables.speed_edges must have at least two strictly increasing values");
    if (cfg.energy_edges && (cfg.energy_edges->size() < 2 || !strictly_increasing(*cfg.energy_edges)))
        issues.push_back("tables.energy_edges must have at least two strictly increasing values");

    if (cfg.output_dir.empty())
        issues.push_back("output.dir must not be empty");
    if (cfg.workers < 1)
        issues.push_back(fmt::format("workers must be >= 1, got {}", cfg.workers));
    return issues;
}

}  // namespace bacsim
