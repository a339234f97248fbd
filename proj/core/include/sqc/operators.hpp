#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "sqc/circuit.hpp"

namespace sqc {

// Single-mode operators in the charge basis n in [-ncut, ncut].
// exp_iphi is the charge-lowering shift: <n-1| e^{i phi} |n> = 1.
struct ChargeBasisOps {
    int ncut = 0;
    Eigen::MatrixXcd n;
    Eigen::MatrixXcd exp_iphi;
    Eigen::MatrixXcd cos_phi;
    Eigen::MatrixXcd sin_phi;

    int dim() const { return 2 * ncut + 1; }
};

ChargeBasisOps charge_ops(int ncut);

// Flux-independent pieces of an assembled Hamiltonian, so that
// H = kinetic - sum_b ej[b] * (cos(offset_b)*branch_cos[b] - sin(offset_b)*branch_sin[b]).
// branch_cos[b] = cos(sum_i signs_i phi_i), branch_sin[b] = sin(sum_i signs_i phi_i).
struct HamiltonianTerms {
    Eigen::MatrixXcd kinetic;
    std::vector<Eigen::MatrixXcd> branch_cos;
    std::vector<Eigen::MatrixXcd> branch_sin;
    std::vector<double> ej;
    std::vector<double> offsets;
    long dim = 0;
};

HamiltonianTerms assemble_terms(const HamiltonianSpec& spec, int ncut,
                                long dim_cap = 100000);

// Dense Hermitian Hamiltonian of the spec on the truncated charge product
// space, in cyclic GHz.
Eigen::MatrixXcd assemble_hamiltonian(const HamiltonianSpec& spec, int ncut,
                                      long dim_cap = 100000);

// Single-mode Hamiltonian 4*ec*n^2 - sum of this mode's own branches,
// offsets included. Used for bare-state labeling and jump operators.
Eigen::MatrixXcd mode_hamiltonian(const HamiltonianSpec& spec, int mode, int ncut);

// Kronecker product embedding of per-mode operators (mode 0 slowest index).
Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& factors);

} // namespace sqc
