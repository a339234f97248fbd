#pragma once

#include <string>
#include <vector>

#include "sqc/config_io.hpp"

namespace sqc::cli {

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    int ncut = 10;
    int n_levels = 0;       // 0: module defaults
    double dt = 0.002;      // propagation step, ns
    double t_gate = 22.0;   // ns
    double sigma = 0.5;     // filter, ns
    double window_shape = 6.0;
    std::string waveform_path;  // optional pre-calibrated waveform

    // experiment-specific grids
    double sweep_start = 0.0;
    double sweep_stop = 0.6;
    int sweep_points = 101;
    int n_eigs = 6;
    double phi = 0.0;
    double bracket_lo = 0.25;
    double bracket_hi = 0.95;
    std::vector<double> asymmetries{0.0, 0.1, 0.2, 0.5, 1.0};
    std::vector<double> delta_ejc{0.0, 0.04, 0.08, 0.12, 0.16};
    std::vector<double> sum_ejc{0.2, 0.4, 0.8, 1.2, 1.6};
    std::vector<double> t1_ms{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<int> trunc_levels{28, 32, 36, 40, 44, 48};
    double offset_span = 3.6e-5;
    int offset_points = 5;
    double spectator_wlo = 5.9;
    double spectator_whi = 6.6;
    int spectator_points = 15;
    std::vector<double> cpara_aF{10.0, 20.0, 30.0, 60.0, 120.0};
    bool with_map = false;
};

// Runs one registered experiment; returns the list of artifact files written
// (relative to out_dir). Throws the library error types on failure.
std::vector<std::string> run_experiment(const std::string& name, const RunOptions& opts);

const std::vector<std::string>& experiment_names();

} // namespace sqc::cli
