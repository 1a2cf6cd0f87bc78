#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "uwnav/dwa.hpp"
#include "uwnav/env_config.hpp"
#include "uwnav/trainer.hpp"

namespace uwnav {

/// Candidate values for the exhaustive DWA weight search.
struct TuneGrid {
    std::vector<double> alpha{1.0};
    std::vector<double> beta{0.5, 1.0, 2.0, 4.0};
    std::vector<double> gamma{0.0, 0.5};
    std::vector<double> d_max{2.0, 5.0, 10.0};
};

/// Everything a harness command needs. Loaded from a YAML file with the
/// top-level sections env, reward, dwa, train, tune; unknown keys are errors.
struct RunConfig {
    EnvConfig env;
    dwa::DwaConfig dwa;
    ppo::TrainConfig train;
    TuneGrid tune;

    /// DWA config with r_robot and safety margin taken from the env.
    dwa::DwaConfig planner() const { return dwa::with_env(dwa, env); }
    void validate() const;
};

/// `env.preset: reduced` selects EnvConfig::reduced() before other env keys
/// apply. If the workspace changes and d_max is not given, d_max becomes the
/// workspace diameter. Throws std::invalid_argument on bad input.
RunConfig parse_run_config(const std::string& yaml_text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Full round-trippable dump (17 significant digits).
std::string to_yaml(const RunConfig& cfg);

}  // namespace uwnav
