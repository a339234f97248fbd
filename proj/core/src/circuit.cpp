#include "sqc/circuit.hpp"

#include <cmath>
#include <sstream>

#include "sqc/constants.hpp"
#include "sqc/detail/math.hpp"
#include "sqc/errors.hpp"

namespace sqc {

namespace {

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "circuit parameter " << name << " must be strictly positive, got " << x;
        throw parameter_error(msg.str());
    }
}

void require_nonnegative(double x, const char* name) {
    if (x < 0.0 || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << "circuit parameter " << name << " must be >= 0, got " << x;
        throw parameter_error(msg.str());
    }
}

} // namespace

void CircuitParams::validate() const {
    require_positive(ej1, "ej1");
    require_positive(ej2, "ej2");
    require_positive(c1, "c1");
    require_positive(c2, "c2");
    require_nonnegative(ejc1, "ejc1");
    require_nonnegative(ejc2, "ejc2");
    require_nonnegative(cc1, "cc1");
    require_nonnegative(cc2, "cc2");
    if (!(c_sq() > 0.0)) throw parameter_error("capacitance network is degenerate: C^2 <= 0");
}

CircuitParams CircuitParams::with_coupler_asymmetry(double asymmetry) const {
    if (std::abs(asymmetry) > 1.0)
        throw parameter_error("coupler asymmetry must lie in [-1, 1]");
    CircuitParams out = *this;
    const double sum_e = sum_ejc();
    const double sum_c = cc();
    out.ejc1 = 0.5 * sum_e * (1.0 + asymmetry);
    out.ejc2 = 0.5 * sum_e * (1.0 - asymmetry);
    out.cc1 = 0.5 * sum_c * (1.0 + asymmetry);
    out.cc2 = 0.5 * sum_c * (1.0 - asymmetry);
    return out;
}

FluxBias gradiometric_to_bias(const GradiometricBias& grad) {
    if (!(grad.el > 0.0) || !(grad.el_prime > 0.0))
        throw parameter_error("inductive energies el, el_prime must be positive");
    const double sum_phi = grad.phi_ei + grad.phi_eo + grad.phi_eo_prime;
    FluxBias bias;
    bias.phi_e1 = grad.phi_ei;
    bias.phi_e2 = grad.phi_eo - grad.el_prime / (grad.el + grad.el_prime) * sum_phi;
    return bias;
}

DerivedEnergies derive_energies(const CircuitParams& params) {
    params.validate();
    const double csq = params.c_sq();
    const double cc = params.cc();
    DerivedEnergies out;
    out.ec1 = constants::e2_over_h_GHz_fF * (params.c2 + cc) / (2.0 * csq);
    out.ec2 = constants::e2_over_h_GHz_fF * (params.c1 + cc) / (2.0 * csq);
    out.g = 4.0 * constants::e2_over_h_GHz_fF * cc / csq;
    out.d_c = params.d_c();
    return out;
}

FluxDrops flux_drops(const CircuitParams& params, const FluxBias& bias) {
    params.validate();
    const double csq = params.c_sq();
    const double cc = params.cc();
    const double dc = params.d_c();
    // shared divider factor (d_C+1)*phi_e1 + 2*phi_e2, in Phi0
    const double s = (dc + 1.0) * bias.phi_e1 + 2.0 * bias.phi_e2;
    const double u = params.c1 * params.c2 / csq;

    FluxDrops drops;
    const double j1 = params.c2 * cc / (2.0 * csq) * s;
    const double j2 = params.c1 * cc / (2.0 * csq) * s;
    const double bot = (u - 1.0) * 0.5 * (dc + 1.0) * bias.phi_e1 + u * bias.phi_e2;
    drops.phi_j1 = constants::two_pi * j1;
    drops.phi_j2 = constants::two_pi * j2;
    drops.phi_bot = constants::two_pi * bot;
    drops.phi_top = constants::two_pi * (bot + bias.phi_e1);
    return drops;
}

void HamiltonianSpec::validate() const {
    if (n_modes < 1) throw parameter_error("HamiltonianSpec needs at least one mode");
    if (static_cast<int>(ec.size()) != n_modes)
        throw parameter_error("HamiltonianSpec: ec size mismatch");
    if (g.rows() != n_modes || g.cols() != n_modes)
        throw parameter_error("HamiltonianSpec: charge coupling matrix shape mismatch");
    if (!g.isApprox(g.transpose(), 1e-12))
        throw parameter_error("HamiltonianSpec: charge coupling matrix must be symmetric");
    for (int i = 0; i < n_modes; ++i)
        if (g(i, i) != 0.0)
            throw parameter_error("HamiltonianSpec: charge coupling matrix must have zero diagonal");
    std::vector<bool> touched(n_modes, false);
    for (const auto& b : branches) {
        if (static_cast<int>(b.signs.size()) != n_modes)
            throw parameter_error("HamiltonianSpec: branch signs size mismatch");
        for (int i = 0; i < n_modes; ++i) {
            if (b.signs[i] < -1 || b.signs[i] > 1)
                throw parameter_error("HamiltonianSpec: branch sign outside {-1,0,1}");
            if (b.signs[i] != 0) touched[i] = true;
        }
    }
    for (int i = 0; i < n_modes; ++i)
        if (!touched[i]) throw parameter_error("HamiltonianSpec: mode without any junction branch");
}

HamiltonianSpec compile_two_qubit(const CircuitParams& params, const FluxBias& bias) {
    const DerivedEnergies en = derive_energies(params);
    const FluxDrops drops = flux_drops(params, bias);

    HamiltonianSpec spec;
    spec.n_modes = 2;
    spec.ec = {en.ec1, en.ec2};
    spec.g = Eigen::MatrixXd::Zero(2, 2);
    spec.g(0, 1) = spec.g(1, 0) = en.g;
    spec.branches = {
        {params.ej1, {+1, 0}, detail::wrap_angle(drops.phi_j1)},
        {params.ej2, {0, +1}, detail::wrap_angle(-drops.phi_j2)},
        {params.ejc1, {-1, +1}, detail::wrap_angle(drops.phi_top)},
        {params.ejc2, {-1, +1}, detail::wrap_angle(drops.phi_bot)},
    };
    spec.validate();
    return spec;
}

MultiModeEnergies invert_capacitance_matrix(const Eigen::MatrixXd& cap_fF) {
    const int n = static_cast<int>(cap_fF.rows());
    if (cap_fF.cols() != n) throw parameter_error("capacitance matrix must be square");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cap_fF, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (!std::isfinite(cond) || cond > 1e12)
        throw parameter_error("capacitance matrix is singular or near-singular");
    const Eigen::MatrixXd inv = cap_fF.inverse();

    MultiModeEnergies out;
    out.ec.resize(n);
    out.g = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        out.ec[i] = constants::e2_over_h_GHz_fF * inv(i, i) / 2.0;
        for (int j = 0; j < n; ++j)
            if (j != i) out.g(i, j) = 4.0 * constants::e2_over_h_GHz_fF * inv(i, j);
    }
    // symmetrize away roundoff from the numerical inverse
    out.g = ((out.g + out.g.transpose()) / 2.0).eval();
    return out;
}

void ChainParams::validate() const {
    for (int i = 0; i < 3; ++i) {
        require_positive(ej[i], "chain ej");
        require_positive(c[i], "chain c");
    }
    require_nonnegative(ejc12_1, "ejc12_1");
    require_nonnegative(ejc12_2, "ejc12_2");
    require_nonnegative(ejc23_1, "ejc23_1");
    require_nonnegative(ejc23_2, "ejc23_2");
    require_nonnegative(cc12_1, "cc12_1");
    require_nonnegative(cc12_2, "cc12_2");
    require_nonnegative(cc23_1, "cc23_1");
    require_nonnegative(cc23_2, "cc23_2");
}

HamiltonianSpec compile_chain(const ChainParams& chain) {
    chain.validate();
    const double cc12 = chain.cc12_1 + chain.cc12_2;
    const double cc23 = chain.cc23_1 + chain.cc23_2;

    Eigen::MatrixXd cap(3, 3);
    cap << chain.c[0] + cc12, -cc12, 0.0,
           -cc12, chain.c[1] + cc12 + cc23, -cc23,
           0.0, -cc23, chain.c[2] + cc23;
    const MultiModeEnergies en = invert_capacitance_matrix(cap);

    HamiltonianSpec spec;
    spec.n_modes = 3;
    spec.ec = en.ec;
    spec.g = en.g;

    const double top12 = constants::two_pi * (chain.bias12.phi_e1 + chain.bias12.phi_e2);
    const double bot12 = constants::two_pi * chain.bias12.phi_e2;
    const double top23 = constants::two_pi * (chain.bias23.phi_e1 + chain.bias23.phi_e2);
    const double bot23 = constants::two_pi * chain.bias23.phi_e2;

    spec.branches = {
        {chain.ej[0], {+1, 0, 0}, 0.0},
        {chain.ej[1], {0, +1, 0}, 0.0},
        {chain.ej[2], {0, 0, +1}, 0.0},
        {chain.ejc12_1, {-1, +1, 0}, detail::wrap_angle(top12)},
        {chain.ejc12_2, {-1, +1, 0}, detail::wrap_angle(bot12)},
        {chain.ejc23_1, {0, -1, +1}, detail::wrap_angle(top23)},
        {chain.ejc23_2, {0, -1, +1}, detail::wrap_angle(bot23)},
    };
    spec.validate();
    return spec;
}

void SpectatorParams::validate() const {
    base.validate();
    require_positive(ejs, "ejs");
    require_positive(cs, "cs");
    require_nonnegative(c_para, "c_para");
}

HamiltonianSpec compile_spectator(const SpectatorParams& params, const FluxBias& bias) {
    params.validate();
    const double cc = params.base.cc();
    const double c_para_fF = params.c_para * 1e-3; // aF -> fF

    Eigen::MatrixXd cap(3, 3);
    cap << params.base.c1 + cc, -cc, 0.0,
           -cc, params.base.c2 + cc + c_para_fF, -c_para_fF,
           0.0, -c_para_fF, params.cs + c_para_fF;
    const MultiModeEnergies en = invert_capacitance_matrix(cap);
    const FluxDrops drops = flux_drops(params.base, bias);

    HamiltonianSpec spec;
    spec.n_modes = 3;
    spec.ec = en.ec;
    spec.g = en.g;
    spec.branches = {
        {params.base.ej1, {+1, 0, 0}, detail::wrap_angle(drops.phi_j1)},
        {params.base.ej2, {0, +1, 0}, detail::wrap_angle(-drops.phi_j2)},
        {params.ejs, {0, 0, +1}, 0.0},
        {params.base.ejc1, {-1, +1, 0}, detail::wrap_angle(drops.phi_top)},
        {params.base.ejc2, {-1, +1, 0}, detail::wrap_angle(drops.phi_bot)},
    };
    spec.validate();
    return spec;
}

} // namespace sqc
