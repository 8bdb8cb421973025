#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinbath/spectral.hpp"

namespace spinbath::harness {

// Raised for malformed configuration (unknown experiment, missing seed, bad
// keys); run() maps it to exit status 2 before any file is written.
struct config_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    std::string experiment;

    // physical parameters
    double gamma = 1.0;
    double kappa = 1.0;
    double sigma = 0.1;

    // numerics
    double dt = 1e-3;
    double t_final = 100.0;
    std::size_t output_stride = 1;
    int n_paths = 100;
    std::optional<std::uint64_t> seed;  // mandatory

    // experiment-specific knobs
    double y_level = 0.0;                          // fpt
    double kappa_sigma = 0.05;                     // gap-study
    std::vector<double> gamma_list = {0.25, 1.0, 4.0};  // gap-study
    double rescale_factor = 0.0;                   // avg-compare; 0 = T*/2
    double t_compare = 0.0;                        // avg-compare; 0 = T*
    int n_points = 100;                            // brackets
    double fd_step = 1e-5;                         // brackets
    spectral::GalerkinSpec galerkin;

    std::string out_dir = ".";

    void validate() const;
};

// Parse a JSON config file; unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);

// Run one experiment: writes CSV artifacts plus <experiment>_summary.json
// into out_dir. Returns 0 on a completed run (assertion outcomes live in the
// summary), 1 on numerical failure, 2 on invalid configuration.
int run(const ExperimentConfig& config);

} // namespace spinbath::harness
