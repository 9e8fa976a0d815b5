#pragma once

#include <map>
#include <string>
#include <vector>

#include "qtoa/clock_model.hpp"

namespace qtoa {

// Named, config-driven experiments; each maps onto the module operations and
// emits CSV data plus a JSON manifest echoing the fully resolved config.

struct ExperimentConfig {
    std::string name;
    std::map<std::string, std::string> params;  // overrides on the defaults
    std::string out_dir = "out";
    int threads = 0;  // 0 = hardware concurrency
    bool validate_only = false;
};

struct ValidationIssue {
    std::string key;
    std::string message;
    bool fatal = true;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const {
        for (const auto& i : issues)
            if (i.fatal) return false;
        return true;
    }
};

const std::vector<std::string>& experiment_names();

// Dry-run schema and physical-regime checks; no heavy computation.
ValidationReport validate(const ExperimentConfig& cfg);

// Exit status: 0 success, 2 config error, 3 numerical-tolerance failure.
int run(const ExperimentConfig& cfg);

// Flat key=value text (# comments) or a JSON object.
std::map<std::string, std::string> parse_config_file(const std::string& path);

// Quadrature readout vs grid-oracle reconstruction on shared clock nodes;
// also a single-channel flux comparison against the closed-form amplitudes.
struct OracleCrosscheck {
    ClockHistogram quadrature;
    ClockHistogram oracle;
    double l2_density_error = 0.0;
    double single_channel_flux_error = 0.0;
    double max_ledger_error = 0.0;
};

struct OracleCrosscheckParams {
    PacketSpec spec{1.0, 5.0, 2.0, 30.0, 0.4, 5.0};
    int p_nodes = 48;
    int pts_per_wavelength = 20;
    double dt = 1.5e-3;
    int bins = 400;
    int threads = 0;
};

OracleCrosscheck run_oracle_crosscheck(const OracleCrosscheckParams& p);

}  // namespace qtoa
