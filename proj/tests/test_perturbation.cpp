#include <doctest.h>

#include <cmath>

#include "sqc/circuit.hpp"
#include "sqc/constants.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"
#include "sqc/perturbation.hpp"
#include "sqc/spectrum.hpp"

using namespace sqc;
using complexd = std::complex<double>;

namespace {

CircuitParams nominal_params() {
    return {11.5, 20.0, 77.5, 69.2, 0.40, 0.40, 0.78, 0.78};
}

struct NominalPerts {
    DerivedEnergies en;
    TransmonPert p1, p2;
    NominalPerts() {
        en = derive_energies(nominal_params());
        p1 = solve_zpf(11.5, en.ec1);
        p2 = solve_zpf(20.0, en.ec2);
    }
};

const NominalPerts& perts() {
    static NominalPerts cached;
    return cached;
}

} // namespace

TEST_CASE("solve_zpf harmonic asymptote and normalization") {
    const double ej = 1e6, ec = 1.0;
    const TransmonPert p = solve_zpf(ej, ec, 30);
    CHECK(p.phi_zpf == doctest::Approx(std::pow(2.0 * ec / ej, 0.25)).epsilon(1e-3));
    CHECK(p.phi_zpf * p.n_zpf == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("solve_zpf residual and consistency identity") {
    const TransmonPert p = solve_zpf(11.5, 0.245113);
    const double phi2 = p.phi_zpf * p.phi_zpf;
    CHECK(std::abs(std::pow(p.phi_zpf, 4) * std::exp(-phi2 / 2.0) - 2.0 * 0.245113 / 11.5) <
          1e-12);
    // elimination condition behind the defining equation
    CHECK(std::abs(8.0 * 0.245113 * p.n_zpf * p.n_zpf -
                   11.5 * std::exp(-phi2 / 2.0) * phi2) < 1e-10);
}

TEST_CASE("solve_zpf reproduces the the reference qubit frequencies") {
    const auto& t = perts();
    CHECK(t.p1.omega == doctest::Approx(4.49).epsilon(10e-3 / 4.49));
    CHECK(t.p1.eta == doctest::Approx(-0.284).epsilon(10e-3 / 0.284));
    CHECK(t.p2.omega == doctest::Approx(6.33).epsilon(10e-3 / 6.33));
    CHECK(t.p2.eta == doctest::Approx(-0.306).epsilon(10e-3 / 0.306));
}

TEST_CASE("solve_zpf root matches a dense scan of the defining function") {
    const double ej = 50.0, ec = 1.0;
    const double rhs = 2.0 * ec / ej;
    double lo = 0.0;
    for (int i = 1; i < 1000000; ++i) {
        const double phi = 2.0 * i / 1000000.0;
        if (std::pow(phi, 4) * std::exp(-phi * phi / 2.0) > rhs) {
            lo = phi;
            break;
        }
    }
    CHECK(std::abs(solve_zpf(ej, ec).phi_zpf - lo) < 4e-6);
}

TEST_CASE("solve_zpf regime errors") {
    CHECK_THROWS_AS(solve_zpf(1.0, 2.0), physics_error);
    CHECK_THROWS_AS(solve_zpf(-1.0, 1.0), parameter_error);
}

TEST_CASE("g_eff at the half-quantum point reduces to the charge term") {
    const auto& t = perts();
    const double ge = g_eff(nominal_params(), t.p1, t.p2, 0.5);
    CHECK(std::abs(ge - t.en.g * t.p1.n_zpf * t.p2.n_zpf) < 1e-15);
}

TEST_CASE("g_eff matches the numerical interaction matrix element") {
    // oracle: <10|H_int|01> with bare product states and the interaction
    // terms assembled directly
    const auto& t = perts();
    const CircuitParams p = nominal_params();
    const int ncut = 10;
    const HamiltonianSpec spec = compile_two_qubit(p, FluxBias::operating(0.0));
    const std::vector<ModeSpectrum> modes = bare_mode_spectra(spec, ncut);
    const ChargeBasisOps ops = charge_ops(ncut);

    const Eigen::MatrixXcd n1n2 = kron_all({ops.n, ops.n});
    const Eigen::MatrixXcd shift = kron_all({Eigen::MatrixXcd(ops.exp_iphi.adjoint()), ops.exp_iphi});
    const Eigen::MatrixXcd cos_chi = 0.5 * (shift + shift.adjoint());
    const Eigen::MatrixXcd h_int = t.en.g * n1n2 - p.sum_ejc() * cos_chi;

    const Eigen::VectorXcd bare10 = kron_all({modes[0].evecs.col(1), modes[1].evecs.col(0)});
    const Eigen::VectorXcd bare01 = kron_all({modes[0].evecs.col(0), modes[1].evecs.col(1)});
    const double elem = std::abs(bare10.dot(h_int * bare01));
    const double ge = std::abs(g_eff(p, t.p1, t.p2, 0.0));
    CHECK(std::abs(ge - elem) / elem < 0.05);
}

TEST_CASE("coupler capacitance exists that cancels the effective coupling") {
    const auto& t = perts();
    const CircuitParams p = nominal_params();
    // g_eff crosses zero inside (0, 0.5): bisect on flux
    double lo = 0.0, hi = 0.5;
    REQUIRE(g_eff(p, t.p1, t.p2, lo) * g_eff(p, t.p1, t.p2, hi) < 0.0);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g_eff(p, t.p1, t.p2, lo) * g_eff(p, t.p1, t.p2, mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    CHECK(std::abs(g_eff(p, t.p1, t.p2, 0.5 * (lo + hi))) < 1e-4);
}

TEST_CASE("zeta1 structure") {
    const auto& t = perts();
    const CircuitParams p = nominal_params();
    CHECK(std::abs(zeta1(p, t.p1, t.p2, 0.5)) < 1e-15);
    CHECK(zeta1(p, t.p1, t.p2, 0.0) < 0.0);
    CHECK(zeta1(p, t.p1, t.p2, 1.2) > 0.0);  // cosine sign flip past one quantum
    // first-order value tracks the full numerical on-rate within 15 percent
    const double numeric_on = -26.88e-3;
    CHECK(std::abs(zeta1(p, t.p1, t.p2, 0.0) - numeric_on) < 0.15 * std::abs(numeric_on));
}

TEST_CASE("zeta2_conserving signs and guards") {
    const auto& t = perts();
    CHECK(zeta2_conserving(0.0, t.p1, t.p2) == 0.0);
    const double ge = g_eff(nominal_params(), t.p1, t.p2, 0.0);
    const double z2 = zeta2_conserving(ge, t.p1, t.p2);
    CHECK(z2 < 0.0);  // far detuned
    CHECK(std::abs(z2) < std::abs(zeta1(nominal_params(), t.p1, t.p2, 0.0)));

    // straddling pair flips the sign
    TransmonPert a = t.p1, b = t.p2;
    b.omega = a.omega - 0.14;
    CHECK(zeta2_conserving(0.01, a, b) > 0.0);

    TransmonPert c = t.p1, d = t.p2;
    d.omega = c.omega - std::abs(0.5 * (c.eta + d.eta));
    CHECK_THROWS_AS(zeta2_conserving(0.05, c, d), resonance_error);
}

TEST_CASE("zeta2_odd vanishes without asymmetry or at zero flux") {
    const auto& t = perts();
    const CircuitParams sym = nominal_params();
    CHECK(zeta2_odd(sym, t.p1, t.p2, 0.37) == 0.0);
    const CircuitParams asym = nominal_params().with_coupler_asymmetry(0.2);
    CHECK(zeta2_odd(asym, t.p1, t.p2, 0.0) == 0.0);
    CHECK(zeta2_odd(asym, t.p1, t.p2, 0.4) != 0.0);
    // the collapsed approximation has the same sign and order of magnitude
    const double exact = zeta2_odd(asym, t.p1, t.p2, 0.4);
    const double approx = zeta2_odd_collapsed(asym, t.p1, t.p2, 0.4);
    CHECK(exact * approx > 0.0);
    CHECK(std::abs(approx) == doctest::Approx(std::abs(exact)).epsilon(0.5));
}

TEST_CASE("zeta_pert idle-point prediction tracks the numerics") {
    const CircuitParams p = nominal_params();
    const double pred = predict_phi_off_pert(p, 0.25, 0.95);
    const double numeric = find_phi_off(p, 0.25, 0.95);
    CHECK(std::abs(pred - numeric) < 0.01);

    const CircuitParams asym = p.with_coupler_asymmetry(0.2);
    CHECK(std::abs(predict_phi_off_pert(asym, 0.25, 0.95) -
                   find_phi_off(asym, 0.25, 0.95)) < 0.02);

    CircuitParams bare = p;
    bare.ejc1 = bare.ejc2 = 0.0;
    bare.cc1 = bare.cc2 = 0.0;
    CHECK(zeta_pert(bare, 0.3) == 0.0);
}

TEST_CASE("perturbation matches numerics at weak coupling") {
    CircuitParams weak = nominal_params();
    weak.ejc1 = weak.ejc2 = 0.1;  // sum 0.2 GHz
    const double numeric = zz_at(weak, 0.0);
    const double pert = zeta_pert(weak, 0.0);
    CHECK(std::abs(pert - numeric) / std::abs(numeric) < 0.05);
}

TEST_CASE("zeta13_pert structure") {
    ChainParams chain;
    chain.ej[0] = 11.5;
    chain.c[0] = 77.5;
    chain.ej[1] = 20.0;
    chain.c[1] = 69.2;
    chain.ej[2] = 8.0;
    chain.c[2] = 77.5;
    chain.ejc12_1 = 0.48;
    chain.ejc12_2 = 0.32;
    chain.cc12_1 = 0.936;
    chain.cc12_2 = 0.624;
    chain.ejc23_1 = 0.48;
    chain.ejc23_2 = 0.32;
    chain.cc23_1 = 0.936;
    chain.cc23_2 = 0.624;

    ChainParams sym = chain;
    sym.ejc12_1 = sym.ejc12_2 = 0.4;
    CHECK(zeta13_pert(sym, 0.5, 0.5) == 0.0);

    const double base = zeta13_pert(chain, 0.51, 0.52);
    CHECK(base != 0.0);

    // swapping the chain end-for-end leaves the rate unchanged
    ChainParams swapped = chain;
    std::swap(swapped.ej[0], swapped.ej[2]);
    std::swap(swapped.c[0], swapped.c[2]);
    std::swap(swapped.ejc12_1, swapped.ejc23_1);
    std::swap(swapped.ejc12_2, swapped.ejc23_2);
    std::swap(swapped.cc12_1, swapped.cc23_1);
    std::swap(swapped.cc12_2, swapped.cc23_2);
    CHECK(zeta13_pert(swapped, 0.52, 0.51) == doctest::Approx(base).epsilon(1e-12));

    // doubling both asymmetries quadruples the rate
    ChainParams doubled = chain;
    doubled.ejc12_1 = 0.56;
    doubled.ejc12_2 = 0.24;
    doubled.ejc23_1 = 0.56;
    doubled.ejc23_2 = 0.24;
    CHECK(zeta13_pert(doubled, 0.51, 0.52) == doctest::Approx(4.0 * base).epsilon(1e-10));
}

TEST_CASE("zeta_spectator") {
    SpectatorParams sp;
    sp.base = nominal_params();
    sp.ejs = 19.0;
    sp.cs = 69.2;
    sp.c_para = 0.0;
    CHECK(zeta_spectator(sp, 0.0).zeta_1s == 0.0);

    sp.c_para = 30.0;
    const SpectatorZZ z = zeta_spectator(sp, 0.0);
    CHECK(z.zeta_1s < 0.0);
    CHECK(std::abs(z.gamma) < 0.1);

    // numeric two-point scaling in the parasitic capacitance
    SolveOptions so;
    auto numeric_1s = [&](double c_para) {
        SpectatorParams q = sp;
        q.c_para = c_para;
        const Spectrum s = solve_spectrum(compile_spectator(q, FluxBias::operating(0.0)), so);
        return zz_rate(s, 0, 2);
    };
    const double z30 = numeric_1s(30.0);
    const double z60 = numeric_1s(60.0);
    CHECK(z60 / z30 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("zeta_spectator resonance guard") {
    SpectatorParams sp;
    sp.base = nominal_params();
    sp.cs = 69.2;
    sp.c_para = 30.0;
    // charging energies of the coupled three-mode network
    const double cc = sp.base.cc();
    const double cp = sp.c_para * 1e-3;
    Eigen::MatrixXd cap(3, 3);
    cap << sp.base.c1 + cc, -cc, 0.0,
           -cc, sp.base.c2 + cc + cp, -cp,
           0.0, -cp, sp.cs + cp;
    const MultiModeEnergies en3 = invert_capacitance_matrix(cap);
    const double target = solve_zpf(sp.base.ej2, en3.ec[1]).omega;
    // place the spectator exactly on the transmon-2 frequency
    double lo = 15.0, hi = 25.0;
    for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (transmon_frequency(mid, en3.ec[2]) < target ? lo : hi) = mid;
    }
    sp.ejs = 0.5 * (lo + hi);
    CHECK_THROWS_AS(zeta_spectator(sp, 0.0), resonance_error);
}

TEST_CASE("two_photon_g2") {
    const auto& t = perts();
    const CircuitParams p = nominal_params();
    CHECK(two_photon_g2(p, t.p1, t.p2, {0.0, 2.5}) == 0.0);
    const double g2 = two_photon_g2(p, t.p1, t.p2, {0.1, 2.5});
    CHECK(two_photon_g2(p, t.p1, t.p2, {0.2, 2.5}) == doctest::Approx(2.0 * g2).epsilon(1e-15));

    // oracle: rebuild the rate from the normal-ordered expansion coefficients,
    // cos(phi1) a^2 coefficient times sin(phi2) a^dag coefficient, with the
    // drive factor eps/2 and the rotating-wave halving
    const double cos_a2 = normal_ordered_coeff(t.p1.phi_zpf, 2, 0);
    const double sin_adag = normal_ordered_coeff(t.p2.phi_zpf, 1, 1);
    const double oracle = 0.1 / 2.0 * p.sum_ejc() * (-cos_a2) * sin_adag / 2.0;
    CHECK(g2 == doctest::Approx(oracle).epsilon(1e-14));
}

TEST_CASE("normal-ordered expansion coefficients") {
    const double phi = 0.43;
    CHECK(normal_ordered_coeff(phi, 0, 0) ==
          doctest::Approx(std::exp(-phi * phi / 2.0)).epsilon(1e-15));
    CHECK(normal_ordered_coeff(phi, 1, 0) ==
          doctest::Approx(std::exp(-phi * phi / 2.0) * phi).epsilon(1e-15));
    CHECK(normal_ordered_coeff(phi, 1, 1) ==
          doctest::Approx(std::exp(-phi * phi / 2.0) * phi).epsilon(1e-15));
    CHECK(normal_ordered_coeff(phi, 2, 1) ==
          doctest::Approx(-std::exp(-phi * phi / 2.0) * phi * phi).epsilon(1e-15));
    CHECK_THROWS_AS(normal_ordered_coeff(phi, 2, 3), parameter_error);
    CHECK_THROWS_AS(normal_ordered_coeffs(phi, 9), parameter_error);
    CHECK(normal_ordered_coeffs(phi, 4).size() == 1 + 2 + 3 + 4 + 5);
}

TEST_CASE("vacuum cosine expectation against a Fock-basis oracle") {
    const double phi = 0.4669;
    const int dim = 60;
    Eigen::MatrixXcd phi_op = Eigen::MatrixXcd::Zero(dim, dim);
    for (int n = 0; n + 1 < dim; ++n) {
        phi_op(n, n + 1) = phi * std::sqrt(n + 1.0);
        phi_op(n + 1, n) = phi * std::sqrt(n + 1.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(phi_op);
    Eigen::VectorXcd cos_diag(dim);
    for (int k = 0; k < dim; ++k) cos_diag(k) = std::cos(es.eigenvalues()(k));
    const Eigen::MatrixXcd cos_op =
        es.eigenvectors() * cos_diag.asDiagonal() * es.eigenvectors().adjoint();
    CHECK(std::abs(cos_op(0, 0).real() - normal_ordered_coeff(phi, 0, 0)) < 1e-10);
}
