#pragma once

#include <array>
#include <vector>

#include "sqc/circuit.hpp"
#include "sqc/spectrum.hpp"

namespace sqc {

// 1/f flux noise model S(f) = A^2/f per loop; amplitudes in Phi0.
struct FluxNoiseModel {
    double a_inner = 0.0;
    double a_outer = 0.0;
    double a_outer_prime = 0.0;
    double correlation = -1.0;  // outer-loop noise correlation in [-1, 1]

    void validate() const;
};

// Sensitivities of a labeled state's transition frequency (relative to the
// ground state) to the three loop fluxes of the gradiometric coupler,
// evaluated at the operating condition. Cyclic GHz per Phi0.
struct StateFluxSensitivity {
    std::array<double, 3> hellmann_feynman{};   // inner, outer, outer'
    std::array<double, 3> finite_difference{};  // central differences, step 1e-5
    bool consistent = true;                     // methods agree within 2%
};

StateFluxSensitivity flux_derivatives(const CircuitParams& params,
                                      const GradiometricBias& bias,
                                      const BareTuple& state,
                                      const SolveOptions& opts = {},
                                      double fd_step = 1e-5);

struct DephasingTime {
    double t_echo_us = 0.0;
    bool unbounded = false;
};

// Echo dephasing time under band-limited 1/f noise,
// 1/T = sqrt(ln 2) * sqrt(Ai^2 Di^2 + Ao^2 Do^2 + Ao'^2 Do'^2 + 2 c Ao Ao' Do Do'),
// derivatives converted to angular rad/s per Phi0 before the formula.
DephasingTime echo_dephasing(const std::array<double, 3>& derivs_GHz_per_Phi0,
                             const FluxNoiseModel& noise);

struct DephasingRow {
    double delta_ejc = 0.0;   // GHz
    double phi_off = 0.0;     // Phi0
    DephasingTime t_10;       // state |10>
    DephasingTime t_01;       // state |01>
};

// Echo dephasing of the single-excitation states against junction asymmetry
// at fixed total coupler energy, each point at its own idle flux.
std::vector<DephasingRow> asymmetry_dephasing_sweep(const CircuitParams& base,
                                                    const std::vector<double>& delta_ejc,
                                                    const FluxNoiseModel& noise,
                                                    const SolveOptions& opts = {},
                                                    int threads = 0);

struct TradeoffRow {
    double sum_ejc = 0.0;     // GHz
    double phi_off = 0.0;     // Phi0
    double zeta_on = 0.0;     // GHz
    double min_t_gate = 0.0;  // ns, 1/(2 |zeta_on|)
    DephasingTime t_10;
    DephasingTime t_01;
};

// Dephasing-vs-gate-speed trade-off against total coupler energy for a
// symmetric coupler; the idle flux is re-solved per point.
std::vector<TradeoffRow> coupler_energy_tradeoff(const CircuitParams& base,
                                                 const std::vector<double>& sum_ejc,
                                                 const FluxNoiseModel& noise,
                                                 const SolveOptions& opts = {},
                                                 int threads = 0);

// RMS flux deviation of band-limited 1/f noise over a drift period:
// sigma = A sqrt(2 ln(t_total/t_min)).
double rms_drift(double amplitude_phi0, double t_total_s, double t_min_s);

} // namespace sqc
