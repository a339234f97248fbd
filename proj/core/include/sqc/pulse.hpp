#pragma once

#include <string>
#include <vector>

#include "sqc/circuit.hpp"
#include "sqc/spectrum.hpp"

namespace sqc {

// Sampled flux control signal phi_e1(t), fluxes in Phi0, time in ns.
struct Waveform {
    double dt = 0.01;
    std::vector<double> samples;

    double duration() const {
        return samples.size() < 2 ? 0.0 : dt * (static_cast<double>(samples.size()) - 1.0);
    }
    // Catmull-Rom interpolation with clamped ends.
    double sample(double t) const;
    void validate() const;
};

struct PulseConfig {
    double t_gate = 22.0;      // ns
    double beta = 0.5;         // square fraction in (0, 1)
    double sigma_filter = 0.5; // ns
    double phi_on = 0.0;       // Phi0
    double phi_off = 0.5;      // Phi0
    double dt = 0.01;          // ns
    double window_shape = 6.0; // Kaiser shape parameter

    void validate() const;
};

// Two-level mixing angle 0.5*atan2(2*coupling, detuning).
double mixing_angle(double coupling, double detuning);

// Signed mixing angle of the |11>/|02> bare pair against flux, tabulated over
// the grid at the operating condition. The sign follows the continuous branch
// of the coupling matrix element, so the table stays monotone through a
// coupling zero-crossing. Throws physics_error on bare degeneracy or a
// non-monotone result.
struct ThetaTable {
    std::vector<double> phi;    // Phi0, strictly monotone
    std::vector<double> theta;  // radians, strictly monotone

    // monotone cubic (Fritsch-Carlson) inverse interpolation phi(theta)
    double phi_of_theta(double theta_value) const;
};

ThetaTable mixing_angle_table(const CircuitParams& params,
                              const std::vector<double>& flux_grid,
                              const SolveOptions& opts = {});

// Kaiser window of n samples, unit sum.
std::vector<double> kaiser_window(int n, double shape);

// Square pulse of duration beta*T convolved with a unit-sum Kaiser window of
// duration (1-beta)*T, mapped through the theta table onto flux. Starts and
// ends at phi_off; reaches phi_on only when the square covers the window
// (beta >= 0.5).
Waveform synthesize(const PulseConfig& config, const ThetaTable& table);

// Discrete Gaussian low-pass, kernel truncated at 5 sigma and renormalized to
// unit sum; boundary samples are held so the ends stay at phi_off.
Waveform gaussian_filter(const Waveform& wf, double sigma);

struct CalibrationResult {
    double beta = 0.0;
    Waveform waveform;
    double phase = 0.0;  // entangling phase reached, radians
    int iterations = 0;
};

struct PropagateOptions;  // dynamics.hpp

// Calibrates beta so the full-propagation entangling phase hits pi, then
// returns the filtered waveform. Throws infeasible_gate when t_gate is below
// 1/(2|zeta_on|) or the phase cannot bracket pi.
CalibrationResult calibrate_beta(const CircuitParams& params, double t_gate,
                                 const PulseConfig& config_template,
                                 const PropagateOptions& prop_opts);
CalibrationResult calibrate_beta(const CircuitParams& params, double t_gate,
                                 const PulseConfig& config_template);

// Two-column CSV (t_ns, phi_e1) round trip.
void write_waveform_csv(const Waveform& wf, const std::string& path);
Waveform read_waveform_csv(const std::string& path);

} // namespace sqc
