// experiments.hpp — JSON-configured experiment runner behind the CLI.
// Each experiment writes deterministic CSV artifacts plus a manifest with
// the config echo, config hash and per-file checksums.

#pragma once

#include "cgl/io.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace cgl {

struct RunOptions {
    // Restores the publication-scale trajectory count where it applies.
    bool paper_scale = false;
    int threads = 1;
    // Overrides the config's output_path when nonempty.
    std::filesystem::path out_dir;
};

struct RunResult {
    std::string experiment;
    std::filesystem::path out_dir;
    std::filesystem::path manifest_path;
    std::vector<std::filesystem::path> files;
};

// Known experiment names, in the order the runner dispatches them.
const std::vector<std::string>& experiment_names();

// Schema validation only; throws io::ConfigError on any problem.
void validate_config(const io::json& config);

RunResult run_experiment(const io::json& config, const RunOptions& opts = {});

}  // namespace cgl
