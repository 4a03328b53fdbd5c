#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bacsim {

struct LogNormal
{
    double mu = 0.0;     // mean of log(value)
    double sigma = 1.0;  // stddev of log(value)
};

struct WeightedBand
{
    double min_kw = 3.0;
    double max_kw = 7.0;
    double weight = 1.0;
};

// Synthetic session log description. Sessions at each charge point are laid
// out one after another with at least `min_gap_hours` between them, each
// starting at an hour drawn from `start_hour_weights`.
struct SynthSpec
{
    std::uint64_t seed = 42;
    int cp_count = 100;
    int sessions_per_cp = 50;
    std::array<double, 24> start_hour_weights{};
    LogNormal plugin_hours{2.3, 0.6};
    double min_plugin_hours = 0.05;
    double max_plugin_hours = 48.0;
    LogNormal energy_kwh{1.9, 0.6};
    double max_energy_kwh = 80.0;
    std::vector<WeightedBand> ev_max_bands{{3.0, 7.0, 3.0}, {7.0, 11.0, 1.5}, {11.0, 22.0, 0.5}};
    double min_gap_hours = 0.25;
    int horizon_days = 365;
    // DD/MM/YYYY; the first day on which sessions may start.
    std::string start_date = "01/01/2017";

    // Evening-heavy home charging shape.
    static std::array<double, 24> domestic_start_weights();
    static SynthSpec domestic_like();
};

// Every problem with `spec`, empty when valid.
std::vector<std::string> validate(const SynthSpec& spec);

// Writes the dataset as domestic-schema CSV. Deterministic for a given spec.
// Throws SynthError if `spec` is invalid or the sessions do not fit the horizon.
void generate(const SynthSpec& spec, std::ostream& out);
std::string generate(const SynthSpec& spec);

}  // namespace bacsim
