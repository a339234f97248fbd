#pragma once

#include <vector>

#include "sqc/circuit.hpp"

namespace sqc {

// Bare-transmon quantities entering the perturbative expressions. The
// normalization phi_zpf * n_zpf = 1/2 holds exactly; omega and eta come from
// exact diagonalization of the bare transmon, not the harmonic approximation.
struct TransmonPert {
    double phi_zpf = 0.0;
    double n_zpf = 0.0;
    double omega = 0.0;           // 0-1 transition, GHz
    double eta = 0.0;             // anharmonicity, GHz
    std::vector<double> levels;   // bare energies relative to the ground state
};

// Solves (phi^4) e^{-phi^2/2} = 2*ec/ej for the zero-point phase spread on the
// transmon branch (phi^2 < 4). Throws physics_error outside the transmon regime.
TransmonPert solve_zpf(double ej, double ec, int ncut = 10);

// Exact bare 0-1 transition frequency of a transmon (charge-basis diagonalization).
double transmon_frequency(double ej, double ec, int ncut = 10);

// Normal-order-corrected total coupler energy sum_ejc * exp(-(p1^2+p2^2)/2).
double normal_ordered_sum_ejc(const CircuitParams& params, const TransmonPert& p1,
                              const TransmonPert& p2);

// Effective linear coupling <10|H_int|01>:
// -sum_ejc' cos(phi_e1/2) p1 p2 + g n1 n2, phi_e1 in Phi0.
double g_eff(const CircuitParams& params, const TransmonPert& p1,
             const TransmonPert& p2, double phi_e1);

// First-order ZZ rate -sum_ejc' cos(phi_e1/2) p1^2 p2^2, the leading
// closed-form expression in the zero-point fluctuations.
double zeta1(const CircuitParams& params, const TransmonPert& p1,
             const TransmonPert& p2, double phi_e1);

// First-order ZZ rate with the diagonal coupler matrix elements evaluated in
// the exact bare-transmon eigenstates instead of the harmonic closed form.
// This is what zeta_pert uses; the closed form en route keeps a few-percent
// anharmonicity offset.
double zeta1_exact(const CircuitParams& params, double phi_e1, int ncut = 10);

// Hybridization-induced second-order ZZ rate 4 g_eff^2 eta / (delta^2 - eta^2),
// eta the mean anharmonicity. Throws resonance_error at |delta| ~ |eta|.
double zeta2_conserving(double g_eff_val, const TransmonPert& p1,
                        const TransmonPert& p2);

// Odd-parity second-order ZZ rate: the exact signed 12-term sum over
// single-excitation-difference matrix elements. Zero identically at
// delta_ejc = 0 or phi_e1 = 0.
double zeta2_odd(const CircuitParams& params, const TransmonPert& p1,
                 const TransmonPert& p2, double phi_e1);

// The collapsed six-term approximation of zeta2_odd, kept for comparison.
double zeta2_odd_collapsed(const CircuitParams& params, const TransmonPert& p1,
                           const TransmonPert& p2, double phi_e1);

// zeta1 + zeta2_conserving + zeta2_odd at the operating condition.
double zeta_pert(const CircuitParams& params, double phi_e1);

// Root of zeta_pert on [lo, hi]; throws no_idle_point without a sign change.
double predict_phi_off_pert(const CircuitParams& params, double lo, double hi);

// Next-nearest-neighbor ZZ rate of a chain via the longitudinal interaction:
// zeta13 = -2 J12 J23 / omega2 with J12, J23 the parity-dependent drive rates.
double zeta13_pert(const ChainParams& chain, double phi_e12, double phi_e23);

struct SpectatorZZ {
    double zeta_1s = 0.0;  // GHz
    double gamma = 0.0;    // hybridization amplitude g_para/(omega2 - omega_s)
};

// Indirect spectator crosstalk zeta_1S = zeta1 * |gamma|^2. Throws
// resonance_error when |omega2 - omega_s| <= |g_para|.
SpectatorZZ zeta_spectator(const SpectatorParams& params, double phi_e1);

struct TwoPhotonDrive {
    double eps_d = 0.0;    // flux drive amplitude, radians
    double omega_d = 0.0;  // drive frequency, GHz
};

// Two-photon exchange rate g2 = (1/8) eps_d sum_ejc' p1^2 p2 under the
// odd-parity operating condition.
double two_photon_g2(const CircuitParams& params, const TransmonPert& p1,
                     const TransmonPert& p2, const TwoPhotonDrive& drive);

// Normal-ordered expansion coefficient of (a^dag)^k a^(m-k) in cos(phi) (even m)
// or sin(phi) (odd m): e^{-phi^2/2} (-1)^{floor(m/2)} phi^m / (k! (m-k)!).
double normal_ordered_coeff(double phi_zpf, int m, int k);

struct ExpansionTerm {
    int m = 0;       // total operator order
    int k = 0;       // creation-operator power
    double value = 0.0;
};

// All expansion terms up to max_order (<= 8; factorial growth beyond).
std::vector<ExpansionTerm> normal_ordered_coeffs(double phi_zpf, int max_order);

} // namespace sqc
