#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "bacsim/config.hpp"
#include "bacsim/ingest.hpp"
#include "bacsim/metrics.hpp"

namespace bacsim {

enum class ExitCode : int {
    ok = 0,
    internal = 1,
    config = 2,
    dataset_io = 3,
    simulation = 4,
};

struct RunSummary
{
    IngestReport ingest;
    std::vector<SweepCell> cells;
    std::vector<std::string> monotonicity_violations;
    std::filesystem::path output_dir;
};

// ingest -> sweep -> report. Outputs are staged next to the output directory
// and only moved into place once everything has been written; on failure the
// staging directory is removed and the exception propagates.
// Throws ConfigError, SynthError, IngestError or SimulationError.
RunSummary run(const ScenarioConfig& config, std::ostream& progress);

void print_summary(std::ostream& out, const RunSummary& summary);

// Maps an exception from run() to the CLI exit code.
ExitCode exit_code_for(const std::exception& e);

// Names of the files run() writes into the output directory.
std::vector<std::string> output_files(const ScenarioConfig& config);

}  // namespace bacsim
