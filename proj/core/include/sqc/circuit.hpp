#pragma once

#include <vector>

#include <Eigen/Dense>

namespace sqc {

// Physical description of two transmons joined by a flux-tunable
// two-junction coupler. Energies are E/h in GHz (cyclic), capacitances in fF.
struct CircuitParams {
    double ej1 = 0.0;  // transmon 1 Josephson energy, GHz
    double ej2 = 0.0;  // transmon 2 Josephson energy, GHz
    double c1 = 0.0;   // transmon 1 shunt capacitance, fF
    double c2 = 0.0;   // transmon 2 shunt capacitance, fF
    double ejc1 = 0.0; // coupler junction 1 (top) energy, GHz
    double ejc2 = 0.0; // coupler junction 2 (bottom) energy, GHz
    double cc1 = 0.0;  // coupler junction 1 capacitance, fF
    double cc2 = 0.0;  // coupler junction 2 capacitance, fF

    double cc() const { return cc1 + cc2; }
    double c_sq() const { return c1 * c2 + cc() * (c1 + c2); }
    double d_c() const { return cc() > 0.0 ? (cc1 - cc2) / cc() : 0.0; }
    double sum_ejc() const { return ejc1 + ejc2; }
    double delta_ejc() const { return ejc1 - ejc2; }

    // Throws parameter_error unless all energies/capacitances are admissible.
    void validate() const;

    // Same total coupler energy and capacitance, junction asymmetry set to
    // `asymmetry` = dEJC/sum EJC, with the capacitance asymmetry tied equal.
    CircuitParams with_coupler_asymmetry(double asymmetry) const;
};

// External fluxes threading the inner coupler loop (phi_e1) and the outer
// ground-connection loop (phi_e2), in units of the flux quantum.
struct FluxBias {
    double phi_e1 = 0.0;
    double phi_e2 = 0.0;

    // The even-parity operating condition phi_e1 + 2*phi_e2 = 0.
    static FluxBias operating(double phi_e1) { return {phi_e1, -phi_e1 / 2.0}; }
};

// Flux parameterization of the coupler with two ground-connection inductors:
// one inner loop and two outer loops. Fluxes in Phi0, inductive energies in GHz.
struct GradiometricBias {
    double phi_ei = 0.0;
    double phi_eo = 0.0;
    double phi_eo_prime = 0.0;
    double el = 1.0;
    double el_prime = 1.0;
};

// Maps the three-loop bias onto the two-flux parameterization:
// phi_e1 = phi_ei, phi_e2 = phi_eo - el'/(el+el') * (phi_ei+phi_eo+phi_eo').
FluxBias gradiometric_to_bias(const GradiometricBias& grad);

// Closed-form charging energies and charge coupling of the two-mode circuit.
struct DerivedEnergies {
    double ec1 = 0.0; // GHz
    double ec2 = 0.0; // GHz
    double g = 0.0;   // GHz
    double d_c = 0.0;
};

DerivedEnergies derive_energies(const CircuitParams& params);

// External flux drops across the four junction branches, in radians.
struct FluxDrops {
    double phi_top = 0.0;
    double phi_bot = 0.0;
    double phi_j1 = 0.0;
    double phi_j2 = 0.0;
};

// Voltage-divider allocation of the loop fluxes onto branches. Satisfies
// phi_top - phi_bot = 2*pi*phi_e1 and phi_j1 + phi_j2 + phi_bot = 2*pi*phi_e2.
FluxDrops flux_drops(const CircuitParams& params, const FluxBias& bias);

// One cosine potential term: -ej * cos(sum_i signs[i]*phi_i + offset).
struct Branch {
    double ej = 0.0;           // GHz
    std::vector<int> signs;    // per-mode coefficient in {-1, 0, +1}
    double offset = 0.0;       // radians, reduced to (-pi, pi]
};

// Mode-level description consumed by the operator builder:
// H = sum_i 4*ec[i]*n_i^2 + sum_{i<j} g(i,j)*n_i*n_j + sum_b branch_b.
struct HamiltonianSpec {
    int n_modes = 0;
    std::vector<double> ec;   // GHz
    Eigen::MatrixXd g;        // symmetric, zero diagonal, GHz
    std::vector<Branch> branches;

    void validate() const;
};

HamiltonianSpec compile_two_qubit(const CircuitParams& params, const FluxBias& bias);

// Chain of three transmons with a coupler on each nearest-neighbor bond.
struct ChainParams {
    double ej[3] = {0, 0, 0};  // GHz
    double c[3] = {0, 0, 0};   // fF
    double ejc12_1 = 0, ejc12_2 = 0, cc12_1 = 0, cc12_2 = 0;
    double ejc23_1 = 0, ejc23_2 = 0, cc23_1 = 0, cc23_2 = 0;
    FluxBias bias12;
    FluxBias bias23;

    void validate() const;
    double sum_ejc12() const { return ejc12_1 + ejc12_2; }
    double sum_ejc23() const { return ejc23_1 + ejc23_2; }
    double delta_ejc12() const { return ejc12_1 - ejc12_2; }
    double delta_ejc23() const { return ejc23_1 - ejc23_2; }
};

HamiltonianSpec compile_chain(const ChainParams& chain);

// Two coupled transmons plus a spectator attached to transmon 2 through a
// parasitic capacitance (c_para in attofarads).
struct SpectatorParams {
    CircuitParams base;
    double ejs = 0.0;     // spectator Josephson energy, GHz
    double cs = 0.0;      // spectator shunt capacitance, fF
    double c_para = 0.0;  // aF

    void validate() const;
};

HamiltonianSpec compile_spectator(const SpectatorParams& params, const FluxBias& bias);

// Charging energies and pairwise charge couplings from numerically inverting
// an n-mode capacitance matrix (fF). Throws parameter_error when singular.
struct MultiModeEnergies {
    std::vector<double> ec;  // GHz
    Eigen::MatrixXd g;       // GHz, symmetric, zero diagonal
};

MultiModeEnergies invert_capacitance_matrix(const Eigen::MatrixXd& cap_fF);

} // namespace sqc
