#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bacsim/charge_model.hpp"
#include "bacsim/ingest.hpp"
#include "bacsim/synth.hpp"

namespace bacsim {

enum class DatasetKind { domestic, local_authority, profiles };

struct DatasetConfig
{
    std::filesystem::path path;
    DatasetKind kind = DatasetKind::domestic;
    IngestOptions ingest;
};

struct ScenarioConfig
{
    std::optional<DatasetConfig> dataset;
    std::optional<SynthSpec> synth;

    std::optional<SpeedBand> speed_band;  // defaults by flavor
    std::vector<double> grid_kw{3.0};
    std::vector<int> pack_counts{0, 1, 2, 3, 4};
    PackSpec pack_unit;                   // pack_count unused
    double initial_fraction = 1.0;        // "full" = 1, "empty" = 0
    double parity_epsilon_kwh = 1e-9;

    std::optional<std::vector<double>> speed_edges;
    std::optional<std::vector<double>> energy_edges;

    std::filesystem::path output_dir = "out";
    bool write_profiles = true;
    bool keep_synthetic_csv = false;
    int workers = 1;

    // Flavor used for defaults; synthetic data uses the domestic schema.
    Flavor flavor() const;
    SpeedBand effective_band() const;
    std::vector<double> effective_speed_edges() const;
    std::vector<double> effective_energy_edges() const;
};

struct LoadedConfig
{
    ScenarioConfig config;
    // Problems found while reading the file (unknown keys, wrong types).
    std::vector<std::string> issues;
};

LoadedConfig parse_config(std::string_view yaml_text);
// Throws ConfigError only when the file cannot be read or is not YAML.
LoadedConfig load_config(const std::filesystem::path& path);

// Every semantic violation, including missing dataset files. Empty when valid.
std::vector<std::string> validate(const ScenarioConfig& config);

}  // namespace bacsim
