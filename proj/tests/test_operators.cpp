#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "sqc/circuit.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"

using namespace sqc;
using complexd = std::complex<double>;

namespace {

HamiltonianSpec nominal_spec(double phi_e1 = 0.0) {
    const CircuitParams p{11.5, 20.0, 77.5, 69.2, 0.40, 0.40, 0.78, 0.78};
    return compile_two_qubit(p, FluxBias::operating(phi_e1));
}

HamiltonianSpec random_spec(std::mt19937& rng) {
    std::uniform_real_distribution<double> ec(0.15, 0.4);
    std::uniform_real_distribution<double> ej(5.0, 25.0);
    std::uniform_real_distribution<double> ejc(0.0, 1.0);
    std::uniform_real_distribution<double> g(-0.1, 0.1);
    std::uniform_real_distribution<double> offset(-3.0, 3.0);
    HamiltonianSpec spec;
    spec.n_modes = 2;
    spec.ec = {ec(rng), ec(rng)};
    spec.g = Eigen::MatrixXd::Zero(2, 2);
    spec.g(0, 1) = spec.g(1, 0) = g(rng);
    spec.branches = {
        {ej(rng), {+1, 0}, offset(rng)},
        {ej(rng), {0, +1}, offset(rng)},
        {ejc(rng), {-1, +1}, offset(rng)},
        {ejc(rng), {+1, +1}, offset(rng)},
    };
    return spec;
}

} // namespace

TEST_CASE("charge_ops basic structure") {
    const ChargeBasisOps ops = charge_ops(1);
    CHECK(ops.dim() == 3);
    CHECK(ops.n(0, 0) == complexd(-1.0));
    CHECK(ops.n(1, 1) == complexd(0.0));
    CHECK(ops.n(2, 2) == complexd(1.0));
    CHECK(ops.exp_iphi(0, 1) == complexd(1.0));
    CHECK(ops.exp_iphi(1, 2) == complexd(1.0));
    CHECK(ops.exp_iphi(1, 0) == complexd(0.0));
    CHECK_THROWS_AS(charge_ops(0), parameter_error);
}

TEST_CASE("charge operator commutation identity away from the boundary") {
    const ChargeBasisOps ops = charge_ops(6);
    const Eigen::MatrixXcd lhs = ops.n * ops.exp_iphi - ops.exp_iphi * ops.n;
    const Eigen::MatrixXcd rhs = -ops.exp_iphi;
    for (int r = 1; r < ops.dim() - 1; ++r)
        for (int c = 1; c < ops.dim() - 1; ++c)
            CHECK(std::abs(lhs(r, c) - rhs(r, c)) < 1e-15);
}

TEST_CASE("hermiticity of the charge-basis operators") {
    const ChargeBasisOps ops = charge_ops(5);
    CHECK((ops.n - ops.n.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ops.cos_phi - ops.cos_phi.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ops.sin_phi - ops.sin_phi.adjoint()).cwiseAbs().maxCoeff() == 0.0);
    // shift unitarity holds except at the truncation boundary
    const Eigen::MatrixXcd prod = ops.exp_iphi * ops.exp_iphi.adjoint();
    for (int r = 0; r < ops.dim() - 1; ++r) CHECK(std::abs(prod(r, r) - 1.0) < 1e-15);
}

TEST_CASE("single-transmon gap converges in the charge cutoff") {
    // EJ/EC = 46: ncut = 10 against the ncut = 30 reference
    HamiltonianSpec spec;
    spec.n_modes = 1;
    spec.ec = {0.25};
    spec.g = Eigen::MatrixXd::Zero(1, 1);
    spec.branches = {{11.5, {+1}, 0.0}};
    auto gap = [&](int ncut) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(assemble_hamiltonian(spec, ncut));
        return es.eigenvalues()(1) - es.eigenvalues()(0);
    };
    CHECK(std::abs(gap(10) - gap(30)) < 1e-9);
}

TEST_CASE("assemble_hamiltonian diagonal case") {
    HamiltonianSpec spec;
    spec.n_modes = 2;
    spec.ec = {0.2, 0.3};
    spec.g = Eigen::MatrixXd::Zero(2, 2);
    spec.g(0, 1) = spec.g(1, 0) = 0.05;
    spec.branches = {{0.0, {+1, 0}, 0.0}, {0.0, {0, +1}, 0.0}};
    const int ncut = 3;
    const Eigen::MatrixXcd h = assemble_hamiltonian(spec, ncut);
    const int dim = 2 * ncut + 1;
    for (int m1 = -ncut; m1 <= ncut; ++m1)
        for (int m2 = -ncut; m2 <= ncut; ++m2) {
            const int idx = (m1 + ncut) * dim + (m2 + ncut);
            const double expected = 4.0 * 0.2 * m1 * m1 + 4.0 * 0.3 * m2 * m2 + 0.05 * m1 * m2;
            CHECK(std::abs(h(idx, idx) - expected) < 1e-14);
        }
    CHECK(h.cwiseAbs().sum() == doctest::Approx(h.diagonal().cwiseAbs().sum()));
}

TEST_CASE("assemble_hamiltonian matches a brute-force element loop") {
    std::mt19937 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const HamiltonianSpec spec = random_spec(rng);
        const int ncut = 4;
        const int dim = 2 * ncut + 1;
        const Eigen::MatrixXcd h = assemble_hamiltonian(spec, ncut);

        Eigen::MatrixXcd oracle = Eigen::MatrixXcd::Zero(dim * dim, dim * dim);
        for (int m1 = -ncut; m1 <= ncut; ++m1)
            for (int m2 = -ncut; m2 <= ncut; ++m2) {
                const long row = (m1 + ncut) * dim + (m2 + ncut);
                oracle(row, row) += 4.0 * spec.ec[0] * m1 * m1 + 4.0 * spec.ec[1] * m2 * m2 +
                                    spec.g(0, 1) * m1 * m2;
                for (const auto& b : spec.branches) {
                    // e^{i s phi} lowers the charge by s
                    const int n1 = m1 + b.signs[0];
                    const int n2 = m2 + b.signs[1];
                    const complexd half = -0.5 * b.ej *
                        complexd(std::cos(b.offset), std::sin(b.offset));
                    if (std::abs(n1) <= ncut && std::abs(n2) <= ncut) {
                        const long col = (n1 + ncut) * dim + (n2 + ncut);
                        oracle(row, col) += half;
                        oracle(col, row) += std::conj(half);
                    }
                }
            }
        CHECK((h - oracle).cwiseAbs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("assembled Hamiltonians are Hermitian") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXcd h = assemble_hamiltonian(random_spec(rng), 5);
        const double scale = h.cwiseAbs().maxCoeff();
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12 * scale);
    }
}

TEST_CASE("spectrum invariant under a 2 pi branch-offset shift") {
    // compile reduces stored offsets to (-pi, pi]
    const CircuitParams p{11.5, 20.0, 77.5, 69.2, 0.40, 0.40, 0.78, 0.78};
    const FluxDrops d = flux_drops(p, FluxBias::operating(0.37));
    const HamiltonianSpec spec = nominal_spec(0.37);
    CHECK(std::cos(spec.branches[2].offset) ==
          doctest::Approx(std::cos(d.phi_top)).epsilon(1e-14));

    // assembling with a raw offset shifted by 2 pi leaves the spectrum alone
    HamiltonianSpec shifted = spec;
    shifted.branches[2].offset += 2.0 * std::acos(-1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(assemble_hamiltonian(spec, 6));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(assemble_hamiltonian(shifted, 6));
    for (int k = 0; k < 10; ++k)
        CHECK(std::abs(a.eigenvalues()(k) - b.eigenvalues()(k)) < 1e-12);
}

TEST_CASE("eigenvalues stable against cutoff increase at the working point") {
    const HamiltonianSpec spec = nominal_spec(0.2);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(assemble_hamiltonian(spec, 10));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> b(assemble_hamiltonian(spec, 15));
    for (int k = 0; k < 10; ++k)
        CHECK(std::abs(a.eigenvalues()(k) - b.eigenvalues()(k)) < 1e-6);
}

TEST_CASE("single-excitation gaps reproduce the bare qubit frequencies") {
    // with the coupler dark at the idle flux the lowest transitions sit at
    // the bare transmon frequencies
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        assemble_hamiltonian(nominal_spec(0.516), 10));
    const double w1 = es.eigenvalues()(1) - es.eigenvalues()(0);
    const double w2 = es.eigenvalues()(2) - es.eigenvalues()(0);
    CHECK(w1 == doctest::Approx(4.49).epsilon(10e-3 / 4.49));
    CHECK(w2 == doctest::Approx(6.33).epsilon(10e-3 / 6.33));
}

TEST_CASE("dimension cap guard") {
    const HamiltonianSpec spec = nominal_spec(0.0);
    CHECK_THROWS_AS(assemble_hamiltonian(spec, 10, 100), numerical_error);
}

TEST_CASE("mode_hamiltonian keeps only the mode's own branches") {
    const HamiltonianSpec spec = nominal_spec(0.516);
    const int ncut = 6;
    const Eigen::MatrixXcd h0 = mode_hamiltonian(spec, 0, ncut);
    const ChargeBasisOps ops = charge_ops(ncut);
    const double delta = spec.branches[0].offset;
    const Eigen::MatrixXcd expected =
        4.0 * spec.ec[0] * (ops.n * ops.n) -
        spec.branches[0].ej *
            (std::cos(delta) * ops.cos_phi - std::sin(delta) * ops.sin_phi);
    CHECK((h0 - expected).cwiseAbs().maxCoeff() < 1e-13);
}
