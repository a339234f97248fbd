#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "sqc/circuit.hpp"
#include "sqc/spectrum.hpp"

namespace sqc {

struct Waveform;  // pulse.hpp

struct PropagateOptions {
    int ncut = 10;
    int n_levels = 40;      // retained eigenstates of H(phi_start)
    double dt = 0.002;      // propagation step, ns
    // static flux offsets added to the inner-loop and differential outer-loop
    // channels; the waveform drives phi_e1 = wf(t) + delta_inner and
    // phi_e2 = (delta_outer - phi_e1)/2
    double delta_inner = 0.0;
    double delta_outer = 0.0;
};

struct Propagation {
    Eigen::MatrixXcd u;  // propagator in the retained eigenbasis of H(start)
    Spectrum spectrum;   // labeled spectrum at the waveform start point
};

// Time-ordered product of exact midpoint step exponentials of the full
// Hamiltonian in the truncated start-point eigenbasis. No rotating-wave
// approximation. Checks ||U U^dag - 1|| < 1e-9.
Propagation propagate_unitary(const CircuitParams& params, const Waveform& wf,
                              const PropagateOptions& opts = {});

// 4x4 block of the propagator on the labeled computational states, basis
// order (00, 01, 10, 11).
Eigen::Matrix4cd project_computational(const Propagation& prop);

// arg U(11,11) - arg U(10,10) - arg U(01,01) + arg U(00,00), wrapped to (-pi, pi].
double entangling_phase(const Eigen::Matrix4cd& u_proj);

struct VZResult {
    double phi1 = 0.0;
    double phi2 = 0.0;
    double error = 0.0;  // 1 - F_G at the optimum
};

// Minimizes the coherent error over virtual-Z angles
// U -> U exp(-i phi1 Z1) exp(-i phi2 Z2), deterministic closed-form search.
VZResult virtual_z_optimize(const Eigen::Matrix4cd& u_proj);

// Same, against an arbitrary conditional-phase target diag(1,1,1,e^{i tau}).
VZResult virtual_z_optimize_cphase(const Eigen::Matrix4cd& u_proj, double target_phase);

// Average gate fidelity against CZ without any phase freedom.
double gate_fidelity_cz(const Eigen::Matrix4cd& u_proj);

struct GateResult {
    Eigen::Matrix4cd projected;
    double phase1 = 0.0;
    double phase2 = 0.0;
    double coherent_error = 0.0;
    double leakage = 0.0;  // 1 - Tr(M^dag M)/4
};

GateResult coherent_error(const Propagation& prop);
GateResult coherent_error_fixed_phases(const Propagation& prop, double phi1, double phi2);

enum class LindbladIntegrator {
    split,  // exact midpoint unitary sandwich around the dissipator step
    rk4,    // classical fixed-step RK4 on the vectorized density matrices
};

struct LindbladOptions {
    int ncut = 10;
    int n_levels = 28;
    double dt = 0.002;
    LindbladIntegrator integrator = LindbladIntegrator::split;
};

struct NoisyGateResult {
    std::vector<Eigen::Matrix4cd> kraus;  // computational-subspace Kraus set
    double infidelity = 0.0;              // after virtual-Z optimization
    double phase1 = 0.0;
    double phase2 = 0.0;
    double trace_defect = 0.0;            // max |tr rho - tr rho_0| seen
};

// Lindblad evolution with bare-transmon lowering jump operators at rates
// 1/t1; the process matrix is reconstructed from the 16 computational-basis
// outer products and converted to a Kraus set via the Choi eigendecomposition.
NoisyGateResult propagate_lindblad(const CircuitParams& params, const Waveform& wf,
                                   const std::array<double, 2>& t1_ns,
                                   const LindbladOptions& opts = {});

struct LinearFit {
    double a = 0.0;  // slope of 1-F against t_gate/t1
    double b = 0.0;  // intercept
    double max_rel_residual = 0.0;
};

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y);

// Infidelity against t_gate/t1 over a grid of equal-t1 values, fit to
// 1-F = a*(t_gate/t1) + b.
LinearFit t1_sweep_fit(const CircuitParams& params, const Waveform& wf,
                       const std::vector<double>& t1_grid_ns,
                       const LindbladOptions& opts = {},
                       std::vector<double>* infidelities = nullptr);

// Coherent error against static flux offsets with virtual-Z phases frozen
// from the zero-offset gate. Row i, column j corresponds to
// (d_inner[i], d_outer[j]).
Eigen::MatrixXd offset_error_map(const CircuitParams& params, const Waveform& wf,
                                 const std::vector<double>& d_inner,
                                 const std::vector<double>& d_outer,
                                 const PropagateOptions& opts = {}, int threads = 0);

} // namespace sqc
