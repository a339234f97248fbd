#include "sqc/operators.hpp"

#include <cmath>
#include <sstream>

#include "sqc/errors.hpp"

namespace sqc {

using complexd = std::complex<double>;

ChargeBasisOps charge_ops(int ncut) {
    if (ncut < 1) throw parameter_error("charge_ops: ncut must be >= 1");
    const int dim = 2 * ncut + 1;
    ChargeBasisOps ops;
    ops.ncut = ncut;
    ops.n = Eigen::MatrixXcd::Zero(dim, dim);
    ops.exp_iphi = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) ops.n(k, k) = static_cast<double>(k - ncut);
    // e^{i phi} lowers the charge index by one; the row above the diagonal.
    for (int k = 1; k < dim; ++k) ops.exp_iphi(k - 1, k) = 1.0;
    const Eigen::MatrixXcd exp_m = ops.exp_iphi.adjoint();
    ops.cos_phi = 0.5 * (ops.exp_iphi + exp_m);
    ops.sin_phi = (ops.exp_iphi - exp_m) / complexd(0.0, 2.0);
    return ops;
}

Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& factors) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (const auto& f : factors) {
        Eigen::MatrixXcd next(out.rows() * f.rows(), out.cols() * f.cols());
        for (long i = 0; i < out.rows(); ++i)
            for (long j = 0; j < out.cols(); ++j)
                next.block(i * f.rows(), j * f.cols(), f.rows(), f.cols()) = out(i, j) * f;
        out.swap(next);
    }
    return out;
}

namespace {

// e^{i s phi} for s in {-1, 0, +1}
Eigen::MatrixXcd shift_power(const ChargeBasisOps& ops, int s) {
    if (s == 0) return Eigen::MatrixXcd::Identity(ops.dim(), ops.dim());
    if (s == 1) return ops.exp_iphi;
    return ops.exp_iphi.adjoint();
}

} // namespace

HamiltonianTerms assemble_terms(const HamiltonianSpec& spec, int ncut, long dim_cap) {
    spec.validate();
    if (ncut < 1) throw parameter_error("assemble_terms: ncut must be >= 1");
    const long mode_dim = 2L * ncut + 1L;
    long dim = 1;
    for (int m = 0; m < spec.n_modes; ++m) {
        dim *= mode_dim;
        if (dim > dim_cap) {
            std::ostringstream msg;
            msg << "assemble_terms: product dimension exceeds cap " << dim_cap;
            throw numerical_error(msg.str());
        }
    }
    const ChargeBasisOps ops = charge_ops(ncut);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(mode_dim, mode_dim);

    HamiltonianTerms terms;
    terms.dim = dim;
    terms.kinetic = Eigen::MatrixXcd::Zero(dim, dim);

    // kinetic: charge terms are diagonal in the charge basis
    std::vector<Eigen::VectorXd> ndiag(spec.n_modes, Eigen::VectorXd::Zero(dim));
    for (int m = 0; m < spec.n_modes; ++m) {
        for (long idx = 0; idx < dim; ++idx) {
            long rest = idx;
            for (int k = spec.n_modes - 1; k > m; --k) rest /= mode_dim;
            ndiag[m](idx) = static_cast<double>(rest % mode_dim - ncut);
        }
    }
    for (long idx = 0; idx < dim; ++idx) {
        double val = 0.0;
        for (int m = 0; m < spec.n_modes; ++m) {
            val += 4.0 * spec.ec[m] * ndiag[m](idx) * ndiag[m](idx);
            for (int l = m + 1; l < spec.n_modes; ++l)
                val += spec.g(m, l) * ndiag[m](idx) * ndiag[l](idx);
        }
        terms.kinetic(idx, idx) = val;
    }

    for (const auto& branch : spec.branches) {
        std::vector<Eigen::MatrixXcd> factors;
        factors.reserve(spec.n_modes);
        for (int m = 0; m < spec.n_modes; ++m)
            factors.push_back(branch.signs[m] == 0 ? eye : shift_power(ops, branch.signs[m]));
        const Eigen::MatrixXcd prod = kron_all(factors); // e^{i sum s phi}
        const Eigen::MatrixXcd prod_dag = prod.adjoint();
        terms.branch_cos.push_back(0.5 * (prod + prod_dag));
        terms.branch_sin.push_back((prod - prod_dag) / complexd(0.0, 2.0));
        terms.ej.push_back(branch.ej);
        terms.offsets.push_back(branch.offset);
    }
    return terms;
}

Eigen::MatrixXcd assemble_hamiltonian(const HamiltonianSpec& spec, int ncut, long dim_cap) {
    HamiltonianTerms terms = assemble_terms(spec, ncut, dim_cap);
    Eigen::MatrixXcd h = std::move(terms.kinetic);
    for (std::size_t b = 0; b < terms.ej.size(); ++b) {
        const double c = std::cos(terms.offsets[b]);
        const double s = std::sin(terms.offsets[b]);
        h.noalias() -= terms.ej[b] * (c * terms.branch_cos[b] - s * terms.branch_sin[b]);
    }
    return h;
}

Eigen::MatrixXcd mode_hamiltonian(const HamiltonianSpec& spec, int mode, int ncut) {
    spec.validate();
    if (mode < 0 || mode >= spec.n_modes)
        throw parameter_error("mode_hamiltonian: mode index out of range");
    const ChargeBasisOps ops = charge_ops(ncut);
    Eigen::MatrixXcd h = 4.0 * spec.ec[mode] * (ops.n * ops.n);
    for (const auto& branch : spec.branches) {
        bool single = branch.signs[mode] != 0;
        for (int m = 0; single && m < spec.n_modes; ++m)
            if (m != mode && branch.signs[m] != 0) single = false;
        if (!single) continue;
        const Eigen::MatrixXcd prod = shift_power(ops, branch.signs[mode]);
        const complexd phase(std::cos(branch.offset), std::sin(branch.offset));
        h.noalias() -= 0.5 * branch.ej * (phase * prod + std::conj(phase) * prod.adjoint());
    }
    return h;
}

} // namespace sqc
