#include "sqc/noise.hpp"

#include <cmath>

#include "sqc/constants.hpp"
#include "sqc/detail/math.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"

namespace sqc {

void FluxNoiseModel::validate() const {
    if (a_inner < 0.0 || a_outer < 0.0 || a_outer_prime < 0.0)
        throw parameter_error("flux noise amplitudes must be >= 0");
    if (correlation < -1.0 || correlation > 1.0)
        throw parameter_error("outer-loop noise correlation must lie in [-1, 1]");
}

namespace {

// transition frequency of the labeled state relative to the ground state
double transition_energy(const CircuitParams& params, const FluxBias& bias,
                         const BareTuple& state, const SolveOptions& opts) {
    const Spectrum s = solve_spectrum(compile_two_qubit(params, bias), opts);
    return s.energy(state) - s.energy(BareTuple(state.size(), 0));
}

} // namespace

StateFluxSensitivity flux_derivatives(const CircuitParams& params,
                                      const GradiometricBias& bias,
                                      const BareTuple& state,
                                      const SolveOptions& opts, double fd_step) {
    const FluxBias center = gradiometric_to_bias(bias);
    if (std::abs(center.phi_e1 + 2.0 * center.phi_e2) > 1e-9)
        throw parameter_error("flux_derivatives: bias violates the operating condition");

    StateFluxSensitivity out;

    // Hellmann-Feynman closed forms with <sin(phi2-phi1)> dropped
    {
        const Spectrum s = solve_spectrum(compile_two_qubit(params, center), opts);
        const ChargeBasisOps ops = charge_ops(opts.ncut);
        const Eigen::MatrixXcd shift =
            kron_all({Eigen::MatrixXcd(ops.exp_iphi.adjoint()), ops.exp_iphi});
        const Eigen::MatrixXcd cos_chi = 0.5 * (shift + shift.adjoint());

        const Eigen::VectorXcd v_state = s.evecs.col(s.labels.at(state));
        const Eigen::VectorXcd v_ground = s.evecs.col(s.labels.at(BareTuple(state.size(), 0)));
        const double expect = std::real(v_state.dot(cos_chi * v_state)) -
                              std::real(v_ground.dot(cos_chi * v_ground));

        const double sin_half = std::sin(constants::pi * center.phi_e1);
        // per-radian derivatives scaled to cyclic GHz per Phi0
        out.hellmann_feynman[0] =
            constants::two_pi * 0.5 * params.sum_ejc() * sin_half * expect;
        out.hellmann_feynman[1] =
            constants::two_pi * 0.5 * params.delta_ejc() * sin_half * expect;
        out.hellmann_feynman[2] = -out.hellmann_feynman[1];
    }

    // central finite differences on each physical loop flux
    const double h = fd_step;
    for (int loop = 0; loop < 3; ++loop) {
        GradiometricBias plus = bias, minus = bias;
        double* fields_plus[3] = {&plus.phi_ei, &plus.phi_eo, &plus.phi_eo_prime};
        double* fields_minus[3] = {&minus.phi_ei, &minus.phi_eo, &minus.phi_eo_prime};
        *fields_plus[loop] += h;
        *fields_minus[loop] -= h;
        const double e_plus =
            transition_energy(params, gradiometric_to_bias(plus), state, opts);
        const double e_minus =
            transition_energy(params, gradiometric_to_bias(minus), state, opts);
        out.finite_difference[loop] = (e_plus - e_minus) / (2.0 * h);
    }

    const double floor = 1e-6;  // GHz per Phi0
    for (int loop = 0; loop < 3; ++loop) {
        const double a = out.hellmann_feynman[loop];
        const double b = out.finite_difference[loop];
        if (std::abs(a) < floor && std::abs(b) < floor) continue;
        if (std::abs(a - b) > 0.02 * std::max(std::abs(a), std::abs(b)))
            out.consistent = false;
    }
    return out;
}

DephasingTime echo_dephasing(const std::array<double, 3>& derivs_GHz_per_Phi0,
                             const FluxNoiseModel& noise) {
    noise.validate();
    const double to_angular = constants::two_pi * 1e9;  // cyclic GHz -> rad/s
    const double di = derivs_GHz_per_Phi0[0] * to_angular;
    const double dout = derivs_GHz_per_Phi0[1] * to_angular;
    const double dop = derivs_GHz_per_Phi0[2] * to_angular;

    double var = noise.a_inner * noise.a_inner * di * di +
                 noise.a_outer * noise.a_outer * dout * dout +
                 noise.a_outer_prime * noise.a_outer_prime * dop * dop +
                 2.0 * noise.correlation * noise.a_outer * noise.a_outer_prime * dout * dop;
    var = std::max(var, 0.0);
    const double rate = std::sqrt(std::log(2.0)) * std::sqrt(var);

    DephasingTime t;
    if (rate <= 0.0) {
        t.unbounded = true;
        t.t_echo_us = std::numeric_limits<double>::infinity();
        return t;
    }
    t.t_echo_us = 1e6 / rate;
    return t;
}

namespace {

DephasingRow dephasing_at_idle(const CircuitParams& params, double delta_ejc,
                               const FluxNoiseModel& noise, const SolveOptions& opts) {
    DephasingRow row;
    row.delta_ejc = delta_ejc;
    row.phi_off = find_phi_off(params, 0.25, 0.95, opts);
    GradiometricBias bias;
    bias.phi_ei = row.phi_off;
    const StateFluxSensitivity s10 = flux_derivatives(params, bias, {1, 0}, opts);
    const StateFluxSensitivity s01 = flux_derivatives(params, bias, {0, 1}, opts);
    row.t_10 = echo_dephasing(s10.hellmann_feynman, noise);
    row.t_01 = echo_dephasing(s01.hellmann_feynman, noise);
    return row;
}

} // namespace

std::vector<DephasingRow> asymmetry_dephasing_sweep(const CircuitParams& base,
                                                    const std::vector<double>& delta_ejc,
                                                    const FluxNoiseModel& noise,
                                                    const SolveOptions& opts, int threads) {
    if (delta_ejc.empty()) throw parameter_error("asymmetry sweep: empty grid");
    if (!(base.sum_ejc() > 0.0))
        throw parameter_error("asymmetry sweep: base coupler energy must be positive");

    std::vector<DephasingRow> rows(delta_ejc.size());
    detail::parallel_for(delta_ejc.size(), threads, [&](std::size_t i) {
        const CircuitParams params =
            base.with_coupler_asymmetry(delta_ejc[i] / base.sum_ejc());
        rows[i] = dephasing_at_idle(params, delta_ejc[i], noise, opts);
    });
    return rows;
}

std::vector<TradeoffRow> coupler_energy_tradeoff(const CircuitParams& base,
                                                 const std::vector<double>& sum_ejc,
                                                 const FluxNoiseModel& noise,
                                                 const SolveOptions& opts, int threads) {
    if (sum_ejc.empty()) throw parameter_error("tradeoff sweep: empty grid");

    std::vector<TradeoffRow> rows(sum_ejc.size());
    detail::parallel_for(sum_ejc.size(), threads, [&](std::size_t i) {
        CircuitParams params = base;
        params.ejc1 = params.ejc2 = 0.5 * sum_ejc[i];
        TradeoffRow row;
        row.sum_ejc = sum_ejc[i];
        if (sum_ejc[i] == 0.0) {
            // no coupler junctions: flux drops out of the potential entirely
            row.phi_off = 0.5;
            row.t_10.unbounded = true;
            row.t_01.unbounded = true;
            row.t_10.t_echo_us = std::numeric_limits<double>::infinity();
            row.t_01.t_echo_us = std::numeric_limits<double>::infinity();
        } else {
            const DephasingRow d = dephasing_at_idle(params, 0.0, noise, opts);
            row.phi_off = d.phi_off;
            row.t_10 = d.t_10;
            row.t_01 = d.t_01;
        }
        row.zeta_on = zz_at(params, 0.0, opts);
        row.min_t_gate = 0.5 / std::abs(row.zeta_on);
        rows[i] = row;
    });
    return rows;
}

double rms_drift(double amplitude_phi0, double t_total_s, double t_min_s) {
    if (amplitude_phi0 < 0.0) throw parameter_error("rms_drift: amplitude must be >= 0");
    if (!(t_min_s > 0.0) || t_total_s < t_min_s)
        throw parameter_error("rms_drift: need t_total >= t_min > 0");
    return amplitude_phi0 * std::sqrt(2.0 * std::log(t_total_s / t_min_s));
}

} // namespace sqc
