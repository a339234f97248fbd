#pragma once

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "sqc/circuit.hpp"

namespace sqc {

// Excitation-number tuple of a bare product state, one entry per mode.
using BareTuple = std::vector<int>;

// Bare eigenbasis of a single mode: ascending eigenvalues (GHz) and
// eigenvector columns in the charge basis.
struct ModeSpectrum {
    Eigen::VectorXd evals;
    Eigen::MatrixXcd evecs;
};

struct Spectrum {
    int n_modes = 0;
    Eigen::VectorXd evals;   // ascending, GHz
    Eigen::MatrixXcd evecs;  // columns, in the assembly basis
    std::map<BareTuple, int> labels;      // bare tuple -> eigenstate index
    std::map<BareTuple, double> overlaps; // bare tuple -> |<bare|dressed>|^2

    bool labeled() const { return !labels.empty(); }
    // Eigenfrequency of the state labeled by the tuple; throws labeling_error.
    double energy(const BareTuple& t) const;
};

// Lowest n_levels eigenpairs of a dense Hermitian matrix. Checks the
// eigenpair residual against 1e-9 * ||H||.
Spectrum diagonalize(const Eigen::MatrixXcd& h, int n_levels);

// Per-mode bare spectra of the spec's single-mode Hamiltonians.
std::vector<ModeSpectrum> bare_mode_spectra(const HamiltonianSpec& spec, int ncut);

// Assigns bare labels to dressed eigenstates by descending-overlap greedy
// matching with uniqueness. The dressed eigenvectors must be expressed in the
// charge product basis built from the same ncut as `modes`. Throws
// labeling_error when a computational state has no overlap above 0.5.
void label_dressed(Spectrum& spec, const std::vector<ModeSpectrum>& modes,
                   int max_label_level = 6);

// Same, for eigenvectors expressed directly in a truncated bare product basis
// with `levels_per_mode` retained bare levels per mode (mode 0 slowest).
void label_dressed_product_basis(Spectrum& spec, const std::vector<int>& levels_per_mode,
                                 int max_label_level = 6);

// ZZ interaction rate of the mode pair (i, j), all other modes in the ground
// state: zeta = w(0..0) - w(e_i) - w(e_j) + w(e_i + e_j).
double zz_rate(const Spectrum& spec, int mode_i, int mode_j);

// Mean of 1 - P over the computational bare tuples {0,1}^n.
double avg_hybridization(const Spectrum& spec);

struct SolveOptions {
    int ncut = 10;
    int n_levels = 0;      // 0: 40 for two modes, 60 for three
    int method = 0;        // 0: auto (full for <=2 modes), 1: full, 2: hierarchical
    int bare_levels = 8;   // per-mode truncation of the hierarchical basis
    int max_label_level = 6;

    int resolved_levels(int n_modes) const {
        return n_levels > 0 ? n_levels : (n_modes <= 2 ? 40 : 60);
    }
    bool use_hierarchical(int n_modes) const {
        return method == 2 || (method == 0 && n_modes >= 3);
    }
};

// Assemble, diagonalize, and label in one step.
Spectrum solve_spectrum(const HamiltonianSpec& spec, const SolveOptions& opts = {});

// ZZ rate of a two-qubit circuit at the operating condition phi_e2 = -phi_e1/2.
double zz_at(const CircuitParams& params, double phi_e1, const SolveOptions& opts = {});

// Idle flux where the ZZ rate crosses zero, searched on [lo, hi] (Phi0).
// Throws no_idle_point when the rate does not change sign on the bracket.
double find_phi_off(const CircuitParams& params, double lo, double hi,
                    const SolveOptions& opts = {}, double flux_tol = 1e-6,
                    double zeta_tol = 1e-7);

struct SweepRow {
    double phi = 0.0;
    double zeta = 0.0;           // GHz
    double hybridization = 0.0;
    std::vector<double> eigs;    // lowest eigenfrequencies, GHz
    bool label_ok = true;
};

// Per-point ZZ rate, average hybridization and lowest-k eigenfrequencies over
// a monotone flux grid at the operating condition. Labeling failures are
// flagged per point and the sweep continues.
std::vector<SweepRow> sweep_flux(const CircuitParams& params,
                                 const std::vector<double>& grid, int n_eigs,
                                 const SolveOptions& opts = {}, int threads = 0);

// Largest excursion of the transition frequencies eig_k - eig_0 (k = 1..n)
// across sweep rows with valid labels.
double eig_excursion(const std::vector<SweepRow>& rows, int n_transitions);

struct ChainIdleResult {
    double phi12 = 0.0;
    double phi23 = 0.0;
    double zeta13 = 0.0;  // GHz, at the joint idle bias
    int iterations = 0;
};

// Simultaneous idle biases zeta12 = zeta23 = 0 by alternating 1D solves, then
// zeta13 at the joint bias.
ChainIdleResult idle_chain_biases(const ChainParams& chain, double lo, double hi,
                                  const SolveOptions& opts = {},
                                  double zeta_tol = 1e-7, int max_outer = 12);

// Pairwise ZZ rates of a chain at given biases (couplers at their operating
// conditions).
double chain_zz(const ChainParams& chain, double phi12, double phi23,
                int mode_i, int mode_j, const SolveOptions& opts = {});

} // namespace sqc
