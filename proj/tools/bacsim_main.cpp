// bacsim: replay charging-session logs through the battery-assisted charge
// point model and write sweep tables.

#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bacsim/config.hpp"
#include "bacsim/error.hpp"
#include "bacsim/run.hpp"

int main(int argc, char** argv)
{
    CLI::App app{"Battery-assisted EV charge point simulator"};
    std::string config_path;
    std::optional<int> workers;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool validate_only = false;

    app.add_option("config", config_path, "Scenario config file (YAML)")->required();
    app.add_option("--workers", workers, "Worker threads for per-charge-point simulation");
    app.add_flag("--validate", validate_only, "Check the config and exit without running");
    app.add_option("--seed", seed, "Override the synthetic dataset seed");
    app.add_option("--out", out_dir, "Override the output directory");
    CLI11_PARSE(app, argc, argv);

    using bacsim::ExitCode;
    try {
        auto loaded = bacsim::load_config(config_path);
        auto& config = loaded.config;
        auto issues = loaded.issues;

        if (workers)
            config.workers = *workers;
        if (out_dir)
            config.output_dir = *out_dir;
        if (seed) {
            if (config.synth)
                config.synth->seed = *seed;
            else
                issues.emplace_back("--seed given but the config has no synth section");
        }
        for (auto& issue : bacsim::validate(config))
            issues.push_back(std::move(issue));

        if (validate_only) {
            if (issues.empty()) {
                fmt::print("ok\n");
                return static_cast<int>(ExitCode::ok);
            }
            for (const auto& issue : issues)
                fmt::print("{}\n", issue);
            return static_cast<int>(ExitCode::config);
        }
        if (!issues.empty()) {
            for (const auto& issue : issues)
                fmt::print(std::cerr, "config error: {}\n", issue);
            return static_cast<int>(ExitCode::config);
        }

        const auto summary = bacsim::run(config, std::cerr);
        bacsim::print_summary(std::cout, summary);
        return static_cast<int>(ExitCode::ok);
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return static_cast<int>(bacsim::exit_code_for(e));
    }
}
