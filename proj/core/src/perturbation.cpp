#include "sqc/perturbation.hpp"

#include <cmath>

#include "sqc/constants.hpp"
#include "sqc/detail/math.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"
#include "sqc/spectrum.hpp"

namespace sqc {

namespace {

Eigen::VectorXd bare_levels(double ej, double ec, int ncut, int count) {
    HamiltonianSpec spec;
    spec.n_modes = 1;
    spec.ec = {ec};
    spec.g = Eigen::MatrixXd::Zero(1, 1);
    spec.branches = {{ej, {+1}, 0.0}};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mode_hamiltonian(spec, 0, ncut));
    if (es.info() != Eigen::Success)
        throw numerical_error("bare transmon eigensolver failed");
    Eigen::VectorXd lv = es.eigenvalues().head(count);
    lv.array() -= lv(0);
    return lv;
}

// division guarded against near-resonant denominators: the result of a
// second-order term must stay perturbative (|num/den| < 0.1)
double guarded_div(double num, double den, const char* what) {
    if (std::abs(den) < 10.0 * std::abs(num))
        throw resonance_error(std::string(what) + ": near-resonant denominator");
    return num / den;
}

} // namespace

double transmon_frequency(double ej, double ec, int ncut) {
    return bare_levels(ej, ec, ncut, 2)(1);
}

TransmonPert solve_zpf(double ej, double ec, int ncut) {
    if (!(ej > 0.0) || !(ec > 0.0)) throw parameter_error("solve_zpf: ej, ec must be positive");
    if (ej / ec <= 1.0)
        throw physics_error("solve_zpf: EJ/EC <= 1 is outside the transmon regime");
    const double rhs = 2.0 * ec / ej;
    auto f = [rhs](double phi) {
        return std::pow(phi, 4) * std::exp(-phi * phi / 2.0) - rhs;
    };
    // the defining function rises from 0 to its maximum at phi = 2; the
    // transmon root is the small one
    if (f(2.0) < 0.0)
        throw physics_error("solve_zpf: no real root, EJ/EC too small");
    const double phi = detail::brent_root(f, 1e-8, 2.0, 1e-15, 1e-14);

    TransmonPert pert;
    pert.phi_zpf = phi;
    pert.n_zpf = 0.5 / phi;
    Eigen::VectorXd lv = bare_levels(ej, ec, ncut, 5);
    pert.levels.assign(lv.data(), lv.data() + lv.size());
    pert.omega = lv(1);
    pert.eta = lv(2) - 2.0 * lv(1);
    return pert;
}

double normal_ordered_sum_ejc(const CircuitParams& params, const TransmonPert& p1,
                              const TransmonPert& p2) {
    const double w = std::exp(-(p1.phi_zpf * p1.phi_zpf + p2.phi_zpf * p2.phi_zpf) / 2.0);
    return params.sum_ejc() * w;
}

double g_eff(const CircuitParams& params, const TransmonPert& p1,
             const TransmonPert& p2, double phi_e1) {
    const double g = derive_energies(params).g;
    const double c = std::cos(constants::pi * phi_e1);
    return -normal_ordered_sum_ejc(params, p1, p2) * c * p1.phi_zpf * p2.phi_zpf +
           g * p1.n_zpf * p2.n_zpf;
}

double zeta1(const CircuitParams& params, const TransmonPert& p1,
             const TransmonPert& p2, double phi_e1) {
    const double c = std::cos(constants::pi * phi_e1);
    return -normal_ordered_sum_ejc(params, p1, p2) * c * p1.phi_zpf * p1.phi_zpf *
           p2.phi_zpf * p2.phi_zpf;
}

double zeta1_exact(const CircuitParams& params, double phi_e1, int ncut) {
    params.validate();
    if (params.sum_ejc() == 0.0) return 0.0;
    const HamiltonianSpec spec = compile_two_qubit(params, FluxBias::operating(phi_e1));
    const std::vector<ModeSpectrum> modes = bare_mode_spectra(spec, ncut);
    const ChargeBasisOps ops = charge_ops(ncut);
    const Eigen::MatrixXcd shift =
        kron_all({Eigen::MatrixXcd(ops.exp_iphi.adjoint()), ops.exp_iphi});
    const Eigen::MatrixXcd cos_chi = 0.5 * (shift + shift.adjoint());
    auto expect = [&](int a, int b) {
        const Eigen::VectorXcd v = kron_all({modes[0].evecs.col(a), modes[1].evecs.col(b)});
        return std::real(v.dot(cos_chi * v));
    };
    const double combination = expect(0, 0) - expect(0, 1) - expect(1, 0) + expect(1, 1);
    return -params.sum_ejc() * std::cos(constants::pi * phi_e1) * combination;
}

double zeta2_conserving(double g_eff_val, const TransmonPert& p1, const TransmonPert& p2) {
    const double delta = p1.omega - p2.omega;
    const double eta = 0.5 * (p1.eta + p2.eta);
    const double den = delta * delta - eta * eta;
    if (den == 0.0) throw resonance_error("zeta2_conserving: |delta| equals |eta|");
    return guarded_div(4.0 * g_eff_val * g_eff_val * eta, den, "zeta2_conserving");
}

double zeta2_odd(const CircuitParams& params, const TransmonPert& p1,
                 const TransmonPert& p2, double phi_e1) {
    if (params.delta_ejc() == 0.0) return 0.0;
    const double s = std::sin(constants::pi * phi_e1);
    if (s == 0.0) return 0.0;

    const double f1 = p1.phi_zpf, f2 = p2.phi_zpf;
    const double e_sin = params.delta_ejc() *
                         std::exp(-(f1 * f1 + f2 * f2) / 2.0) * s;

    const double g0100 = e_sin * f2;
    const double g1000 = -e_sin * f1;
    const double g0201 = std::sqrt(2.0) * e_sin * (f2 - 0.5 * f2 * f2 * f2);
    const double g2010 = -std::sqrt(2.0) * e_sin * (f1 - 0.5 * f1 * f1 * f1);
    const double g1110 = e_sin * f2 * (1.0 - f1 * f1);
    const double g1101 = -e_sin * f1 * (1.0 - f2 * f2);
    const double g1211 = std::sqrt(2.0) * e_sin * (1.0 - f1 * f1) * (f2 - 0.5 * f2 * f2 * f2);
    const double g2111 = -std::sqrt(2.0) * e_sin * (1.0 - f2 * f2) * (f1 - 0.5 * f1 * f1 * f1);
    const double g2001 = e_sin * f2 * (-0.5 * std::sqrt(2.0) * f1 * f1);
    const double g0210 = -e_sin * f1 * (-0.5 * std::sqrt(2.0) * f2 * f2);
    const double g3011 = e_sin * f2 * (-0.5 * std::sqrt(6.0) * f1 * f1 +
                                       std::sqrt(6.0) / 6.0 * std::pow(f1, 4));
    const double g0311 = -e_sin * f1 * (-0.5 * std::sqrt(6.0) * f2 * f2 +
                                        std::sqrt(6.0) / 6.0 * std::pow(f2, 4));

    // bare product energies w_ij = E1[i] + E2[j], ground-referenced
    auto w = [&](int i, int j) { return p1.levels.at(i) + p2.levels.at(j); };

    double total = 0.0;
    total += guarded_div(g3011 * g3011, w(1, 1) - w(3, 0), "zeta2_odd");
    total += guarded_div(g0311 * g0311, w(1, 1) - w(0, 3), "zeta2_odd");
    total -= guarded_div(g0210 * g0210, w(1, 0) - w(0, 2), "zeta2_odd");
    total -= guarded_div(g2001 * g2001, w(0, 1) - w(2, 0), "zeta2_odd");
    total += guarded_div(g2111 * g2111, w(1, 1) - w(2, 1), "zeta2_odd");
    total += guarded_div(g1211 * g1211, w(1, 1) - w(1, 2), "zeta2_odd");
    total += guarded_div(2.0 * g1110 * g1110, w(1, 1) - w(1, 0), "zeta2_odd");
    total += guarded_div(2.0 * g1101 * g1101, w(1, 1) - w(0, 1), "zeta2_odd");
    total -= guarded_div(g2010 * g2010, w(1, 0) - w(2, 0), "zeta2_odd");
    total -= guarded_div(g0201 * g0201, w(0, 1) - w(0, 2), "zeta2_odd");
    total -= guarded_div(2.0 * g1000 * g1000, w(1, 0), "zeta2_odd");
    total -= guarded_div(2.0 * g0100 * g0100, w(0, 1), "zeta2_odd");
    return total;
}

double zeta2_odd_collapsed(const CircuitParams& params, const TransmonPert& p1,
                           const TransmonPert& p2, double phi_e1) {
    if (params.delta_ejc() == 0.0) return 0.0;
    const double s = std::sin(constants::pi * phi_e1);
    if (s == 0.0) return 0.0;
    const double f1 = p1.phi_zpf, f2 = p2.phi_zpf;
    const double e_sin = params.delta_ejc() *
                         std::exp(-(f1 * f1 + f2 * f2) / 2.0) * s;
    const double pref = e_sin * f1 * f2;
    const double w1 = p1.omega, w2 = p2.omega;
    const double bracket = f1 * f1 / (2.0 * w1 - w2) + f2 * f2 / (2.0 * w2 - w1) +
                           4.0 * f1 * f1 / w1 + 4.0 * f2 * f2 / w2 +
                           4.0 * p1.eta / (w1 * w1) + 4.0 * p2.eta / (w2 * w2);
    return -pref * pref * bracket;
}

double zeta_pert(const CircuitParams& params, double phi_e1) {
    const DerivedEnergies en = derive_energies(params);
    if (params.sum_ejc() == 0.0 && en.g == 0.0) return 0.0;
    const TransmonPert p1 = solve_zpf(params.ej1, en.ec1);
    const TransmonPert p2 = solve_zpf(params.ej2, en.ec2);
    const double ge = g_eff(params, p1, p2, phi_e1);
    return zeta1_exact(params, phi_e1) + zeta2_conserving(ge, p1, p2) +
           zeta2_odd(params, p1, p2, phi_e1);
}

double predict_phi_off_pert(const CircuitParams& params, double lo, double hi) {
    auto f = [&](double phi) { return zeta_pert(params, phi); };
    const double fa = f(lo);
    const double fb = f(hi);
    if (fa * fb > 0.0) {
        // scan for an interior sign change before giving up
        constexpr int n = 32;
        double prev_x = lo, prev_f = fa;
        for (int i = 1; i <= n; ++i) {
            const double x = lo + (hi - lo) * i / n;
            const double fx = f(x);
            if (prev_f * fx <= 0.0)
                return detail::brent_root(f, prev_x, x, 1e-6, 1e-7);
            prev_x = x;
            prev_f = fx;
        }
        throw no_idle_point("perturbative ZZ rate does not change sign on the bracket");
    }
    return detail::brent_root(f, lo, hi, 1e-6, 1e-7);
}

double zeta13_pert(const ChainParams& chain, double phi_e12, double phi_e23) {
    chain.validate();
    const Eigen::MatrixXd cap = [&] {
        const double cc12 = chain.cc12_1 + chain.cc12_2;
        const double cc23 = chain.cc23_1 + chain.cc23_2;
        Eigen::MatrixXd m(3, 3);
        m << chain.c[0] + cc12, -cc12, 0.0,
             -cc12, chain.c[1] + cc12 + cc23, -cc23,
             0.0, -cc23, chain.c[2] + cc23;
        return m;
    }();
    const MultiModeEnergies en = invert_capacitance_matrix(cap);
    const TransmonPert p1 = solve_zpf(chain.ej[0], en.ec[0]);
    const TransmonPert p2 = solve_zpf(chain.ej[1], en.ec[1]);
    const TransmonPert p3 = solve_zpf(chain.ej[2], en.ec[2]);

    const double w12 = std::exp(-(p1.phi_zpf * p1.phi_zpf + p2.phi_zpf * p2.phi_zpf) / 2.0);
    const double w23 = std::exp(-(p2.phi_zpf * p2.phi_zpf + p3.phi_zpf * p3.phi_zpf) / 2.0);
    const double j12 = chain.delta_ejc12() * w12 * p1.phi_zpf * p1.phi_zpf * p2.phi_zpf *
                       std::sin(constants::pi * phi_e12);
    const double j23 = -chain.delta_ejc23() * w23 * p3.phi_zpf * p3.phi_zpf * p2.phi_zpf *
                       std::sin(constants::pi * phi_e23);
    return -2.0 * j12 * j23 / p2.omega;
}

SpectatorZZ zeta_spectator(const SpectatorParams& params, double phi_e1) {
    params.validate();
    const double cc = params.base.cc();
    const double c_para_fF = params.c_para * 1e-3;
    Eigen::MatrixXd cap(3, 3);
    cap << params.base.c1 + cc, -cc, 0.0,
           -cc, params.base.c2 + cc + c_para_fF, -c_para_fF,
           0.0, -c_para_fF, params.cs + c_para_fF;
    const MultiModeEnergies en = invert_capacitance_matrix(cap);

    const TransmonPert p1 = solve_zpf(params.base.ej1, en.ec[0]);
    const TransmonPert p2 = solve_zpf(params.base.ej2, en.ec[1]);
    const TransmonPert ps = solve_zpf(params.ejs, en.ec[2]);
    const double g_para = en.g(1, 2);

    SpectatorZZ out;
    if (g_para == 0.0) return out;
    const double detuning = p2.omega - ps.omega;
    if (std::abs(detuning) <= std::abs(g_para))
        throw resonance_error("zeta_spectator: spectator resonant with transmon 2");
    out.gamma = g_para / detuning;
    out.zeta_1s = zeta1(params.base, p1, p2, phi_e1) * out.gamma * out.gamma;
    return out;
}

double two_photon_g2(const CircuitParams& params, const TransmonPert& p1,
                     const TransmonPert& p2, const TwoPhotonDrive& drive) {
    if (drive.eps_d < 0.0) throw parameter_error("two_photon_g2: eps_d must be >= 0");
    return drive.eps_d / 8.0 * normal_ordered_sum_ejc(params, p1, p2) *
           p1.phi_zpf * p1.phi_zpf * p2.phi_zpf;
}

double normal_ordered_coeff(double phi_zpf, int m, int k) {
    if (m < 0 || k < 0 || k > m) throw parameter_error("normal_ordered_coeff: need 0 <= k <= m");
    auto factorial = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    const double sign = (m / 2) % 2 == 0 ? 1.0 : -1.0;
    return std::exp(-phi_zpf * phi_zpf / 2.0) * sign * std::pow(phi_zpf, m) /
           (factorial(k) * factorial(m - k));
}

std::vector<ExpansionTerm> normal_ordered_coeffs(double phi_zpf, int max_order) {
    if (max_order < 0 || max_order > 8)
        throw parameter_error("normal_ordered_coeffs: max_order must be in [0, 8]");
    std::vector<ExpansionTerm> terms;
    for (int m = 0; m <= max_order; ++m)
        for (int k = 0; k <= m; ++k)
            terms.push_back({m, k, normal_ordered_coeff(phi_zpf, m, k)});
    return terms;
}

} // namespace sqc
