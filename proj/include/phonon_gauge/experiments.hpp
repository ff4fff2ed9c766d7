#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "phonon_gauge/config.hpp"

namespace phonon_gauge {

struct RunOptions {
    std::filesystem::path out_dir;
    /// Overrides the config's output.format when non-empty.
    std::string format;
    unsigned jobs = 1;
};

struct RunReport {
    std::vector<std::filesystem::path> files;  ///< data files, manifest last
    std::vector<std::string> warnings;
    double wall_seconds = 0.0;
};

/// Runs a validated experiment and writes its data files plus manifest.json.
RunReport run_experiment(const ExperimentConfig& config, const RunOptions& options);

/// Library version string.
std::string version();

}  // namespace phonon_gauge
