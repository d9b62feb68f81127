// cglangevin — coarse-grained linear Langevin toolbox CLI.
//
//   cglangevin run --config path.json [--paper-scale] [--threads k] [--out dir]
//   cglangevin validate-config path.json

#include "cgl/experiments.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

// Best-effort line number for a key inside the raw config text.
long line_of_key(const std::string& text, const std::string& key) {
    if (key.empty()) return -1;
    const std::string needle = "\"" + key + "\"";
    const auto pos = text.find(needle);
    if (pos == std::string::npos) return -1;
    return 1 + static_cast<long>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

long line_of_offset(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<long>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
}

struct LoadedConfig {
    std::string raw;
    cgl::io::json parsed;
};

LoadedConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    LoadedConfig cfg;
    cfg.raw = ss.str();
    try {
        cfg.parsed = cgl::io::json::parse(cfg.raw);
    } catch (const cgl::io::json::parse_error& err) {
        std::ostringstream msg;
        msg << path << ":" << line_of_offset(cfg.raw, err.byte) << ": " << err.what();
        throw std::runtime_error(msg.str());
    }
    return cfg;
}

int report_config_error(const std::string& path, const LoadedConfig& cfg,
                        const cgl::io::ConfigError& err) {
    const long line = line_of_key(cfg.raw, err.where);
    std::cerr << path;
    if (line > 0) std::cerr << ":" << line;
    std::cerr << ": " << err.what() << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markovian coarse-graining of linear overdamped Langevin dynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    int threads = 0;
    bool paper_scale = false;

    CLI::App* run = app.add_subcommand("run", "run an experiment from a JSON config");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_flag("--paper-scale", paper_scale, "use publication-scale trajectory counts");
    run->add_option("--threads", threads, "worker threads (default 1)");
    run->add_option("--out", out_dir, "output directory (overrides config output_path)");

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate-config", "check a config file and exit");
    validate->add_option("path", validate_path, "config file")->required();

    CLI11_PARSE(app, argc, argv);

    if (validate->parsed()) {
        try {
            const LoadedConfig cfg = load_config(validate_path);
            try {
                cgl::validate_config(cfg.parsed);
            } catch (const cgl::io::ConfigError& err) {
                return report_config_error(validate_path, cfg, err);
            }
        } catch (const std::exception& err) {
            std::cerr << err.what() << "\n";
            return 2;
        }
        std::cout << "config OK: " << validate_path << "\n";
        return 0;
    }

    try {
        const LoadedConfig cfg = load_config(config_path);
        cgl::RunOptions opts;
        opts.paper_scale = paper_scale;
        opts.threads = threads;
        opts.out_dir = out_dir;
        try {
            const cgl::RunResult result = cgl::run_experiment(cfg.parsed, opts);
            std::cout << result.experiment << ": wrote " << result.files.size()
                      << " file(s) to " << result.out_dir.string() << "\n";
            std::cout << "manifest: " << result.manifest_path.string() << "\n";
        } catch (const cgl::io::ConfigError& err) {
            return report_config_error(config_path, cfg, err);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
