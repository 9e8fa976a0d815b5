// Experiment runner for the time-of-arrival laboratory.
//
//   qtoa <experiment> [--config FILE] [--out DIR] [--override k=v]...
//        [--threads N] [--validate-only]
//
// Exit codes: 0 success, 2 config error, 3 numerical-tolerance failure.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qtoa/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"qtoa - quantum time-of-arrival laboratory"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    std::vector<std::string> overrides;
    int threads = 0;
    bool validate_only = false;
    app.add_option("--config", config_path, "key = value file or JSON object")
        ->expected(1);
    app.add_option("--out", out_dir, "output directory (default: out)");
    app.add_option("--override", overrides, "override a config key, key=value")
        ->take_all();
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_flag("--validate-only", validate_only, "check the config and exit");

    std::vector<CLI::App*> subs;
    for (const auto& name : qtoa::experiment_names())
        subs.push_back(app.add_subcommand(name, ""));

    CLI11_PARSE(app, argc, argv);

    qtoa::ExperimentConfig cfg;
    cfg.name = app.get_subcommands().front()->get_name();
    cfg.out_dir = out_dir;
    cfg.threads = threads;
    cfg.validate_only = validate_only;

    try {
        if (!config_path.empty()) cfg.params = qtoa::parse_config_file(config_path);
        for (const auto& ov : overrides) {
            const auto eq = ov.find('=');
            if (eq == std::string::npos || eq == 0) {
                std::fprintf(stderr, "error: --override expects key=value, got '%s'\n",
                             ov.c_str());
                return 2;
            }
            cfg.params[ov.substr(0, eq)] = ov.substr(eq + 1);
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }

    try {
        return qtoa::run(cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
