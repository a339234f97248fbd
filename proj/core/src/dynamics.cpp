#include "sqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "sqc/constants.hpp"
#include "sqc/detail/math.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"
#include "sqc/pulse.hpp"

namespace sqc {

using complexd = std::complex<double>;

namespace {

FluxBias bias_of(double phi_raw, double delta_inner, double delta_outer) {
    const double p1 = phi_raw + delta_inner;
    return {p1, (delta_outer - p1) / 2.0};
}

// Projected flux-independent operator cache: in the retained eigenbasis,
// H(phi) = kinetic - sum_b ej_b (cos d_b(phi) C_b - sin d_b(phi) S_b).
struct ProjectedTerms {
    Eigen::MatrixXcd kinetic;
    std::vector<Eigen::MatrixXcd> bcos;
    std::vector<Eigen::MatrixXcd> bsin;
    std::vector<double> ej;
};

struct PropagationFrame {
    Spectrum spectrum;
    ProjectedTerms terms;
    HamiltonianSpec start_spec;
};

PropagationFrame build_frame(const CircuitParams& params, double phi_start,
                             double delta_inner, double delta_outer, int ncut,
                             int n_levels) {
    PropagationFrame frame;
    frame.start_spec =
        compile_two_qubit(params, bias_of(phi_start, delta_inner, delta_outer));
    HamiltonianTerms terms = assemble_terms(frame.start_spec, ncut);

    Eigen::MatrixXcd h0 = terms.kinetic;
    for (std::size_t b = 0; b < terms.ej.size(); ++b) {
        const double c = std::cos(terms.offsets[b]);
        const double s = std::sin(terms.offsets[b]);
        h0.noalias() -= terms.ej[b] * (c * terms.branch_cos[b] - s * terms.branch_sin[b]);
    }
    if (n_levels > h0.rows())
        throw parameter_error("propagate: n_levels exceeds assembled dimension");
    frame.spectrum = diagonalize(h0, n_levels);
    label_dressed(frame.spectrum, bare_mode_spectra(frame.start_spec, ncut));

    const Eigen::MatrixXcd& v = frame.spectrum.evecs;
    frame.terms.kinetic = v.adjoint() * terms.kinetic * v;
    for (std::size_t b = 0; b < terms.ej.size(); ++b) {
        frame.terms.bcos.push_back(v.adjoint() * terms.branch_cos[b] * v);
        frame.terms.bsin.push_back(v.adjoint() * terms.branch_sin[b] * v);
        frame.terms.ej.push_back(terms.ej[b]);
    }
    return frame;
}

// Branch flux offsets in the compile_two_qubit branch order (j1, j2, top, bot).
std::array<double, 4> branch_offsets(const CircuitParams& params, const FluxBias& bias) {
    const FluxDrops drops = flux_drops(params, bias);
    return {drops.phi_j1, -drops.phi_j2, drops.phi_top, drops.phi_bot};
}

Eigen::MatrixXcd projected_hamiltonian(const ProjectedTerms& terms,
                                       const std::array<double, 4>& offsets) {
    Eigen::MatrixXcd h = terms.kinetic;
    for (std::size_t b = 0; b < terms.ej.size(); ++b) {
        const double c = std::cos(offsets[b]);
        const double s = std::sin(offsets[b]);
        h.noalias() -= terms.ej[b] * (c * terms.bcos[b] - s * terms.bsin[b]);
    }
    return h;
}

} // namespace

Propagation propagate_unitary(const CircuitParams& params, const Waveform& wf,
                              const PropagateOptions& opts) {
    wf.validate();
    PropagationFrame frame = build_frame(params, wf.samples.front(), opts.delta_inner,
                                         opts.delta_outer, opts.ncut, opts.n_levels);
    const long dim = frame.spectrum.evals.size();

    Propagation prop;
    prop.spectrum = frame.spectrum;
    prop.u = Eigen::MatrixXcd::Identity(dim, dim);

    const double duration = wf.duration();
    if (duration > 0.0) {
        const long n_steps = std::max<long>(1, std::lround(duration / opts.dt));
        const double dt = duration / static_cast<double>(n_steps);
        for (long k = 0; k < n_steps; ++k) {
            const double t_mid = (static_cast<double>(k) + 0.5) * dt;
            const FluxBias bias = bias_of(wf.sample(t_mid), opts.delta_inner, opts.delta_outer);
            const Eigen::MatrixXcd h =
                projected_hamiltonian(frame.terms, branch_offsets(params, bias));
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            if (es.info() != Eigen::Success)
                throw numerical_error("propagate_unitary: step eigensolver failed");
            Eigen::VectorXcd phases(dim);
            for (long i = 0; i < dim; ++i) {
                const double angle = -constants::two_pi * es.eigenvalues()(i) * dt;
                phases(i) = complexd(std::cos(angle), std::sin(angle));
            }
            prop.u = es.eigenvectors() * phases.asDiagonal() *
                     es.eigenvectors().adjoint() * prop.u;
        }
    }

    const double defect =
        (prop.u.adjoint() * prop.u - Eigen::MatrixXcd::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff();
    if (defect > 1e-9)
        throw numerical_error("propagate_unitary: propagator lost unitarity");
    return prop;
}

Eigen::Matrix4cd project_computational(const Propagation& prop) {
    std::array<int, 4> idx{};
    for (int m1 = 0; m1 < 2; ++m1)
        for (int m2 = 0; m2 < 2; ++m2) {
            auto it = prop.spectrum.labels.find({m1, m2});
            if (it == prop.spectrum.labels.end())
                throw labeling_error("project_computational: computational label missing");
            idx[m1 * 2 + m2] = it->second;
        }
    Eigen::Matrix4cd u;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) u(a, b) = prop.u(idx[a], idx[b]);
    return u;
}

double entangling_phase(const Eigen::Matrix4cd& u_proj) {
    return detail::wrap_angle(std::arg(u_proj(3, 3)) - std::arg(u_proj(2, 2)) -
                              std::arg(u_proj(1, 1)) + std::arg(u_proj(0, 0)));
}

double gate_fidelity_cz(const Eigen::Matrix4cd& u_proj) {
    Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
    cz(3, 3) = -1.0;
    const double t1 = (u_proj.adjoint() * u_proj).trace().real();
    const complexd t2 = (cz.adjoint() * u_proj).trace();
    return (t1 + std::norm(t2)) / 20.0;
}

namespace {

// Maximizes sum_k |a_k + b_k e^{iy} + c_k e^{ix} + d_k e^{i(x+y)}|^2 over the
// two virtual-Z phases x = 2 phi1, y = 2 phi2. For fixed x the optimum over y
// is closed-form, leaving a smooth 1D problem solved by a dense scan plus
// golden-section refinement.
struct PhaseObjective {
    std::vector<std::array<complexd, 4>> terms;

    double value_at(double x, double* y_opt = nullptr) const {
        const complexd ex(std::cos(x), std::sin(x));
        double base = 0.0;
        complexd cross(0.0, 0.0);
        for (const auto& t : terms) {
            const complexd p = t[0] + t[2] * ex;
            const complexd q = t[1] + t[3] * ex;
            base += std::norm(p) + std::norm(q);
            cross += q * std::conj(p);
        }
        if (y_opt) *y_opt = std::abs(cross) > 0.0 ? -std::arg(cross) : 0.0;
        return base + 2.0 * std::abs(cross);
    }
};

struct PhaseOptimum {
    double x = 0.0;
    double y = 0.0;
    double value = 0.0;
};

PhaseOptimum maximize_phase_objective(const PhaseObjective& obj) {
    constexpr int kScan = 2048;
    double best_x = 0.0, best_v = -1.0;
    for (int i = 0; i < kScan; ++i) {
        const double x = constants::two_pi * i / kScan;
        const double v = obj.value_at(x);
        if (v > best_v) { best_v = v; best_x = x; }
    }
    // golden-section refinement around the scan optimum
    double a = best_x - constants::two_pi / kScan;
    double b = best_x + constants::two_pi / kScan;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = obj.value_at(c), fd = obj.value_at(d);
    for (int iter = 0; iter < 200 && (b - a) > 1e-13; ++iter) {
        if (fc > fd) { b = d; d = c; fd = fc; c = b - gr * (b - a); fc = obj.value_at(c); }
        else { a = c; c = d; fc = fd; d = a + gr * (b - a); fd = obj.value_at(d); }
    }
    PhaseOptimum opt;
    opt.x = 0.5 * (a + b);
    opt.value = obj.value_at(opt.x, &opt.y);
    return opt;
}

VZResult optimize_against_cphase(const Eigen::Matrix4cd& u_proj, double target_phase) {
    PhaseObjective obj;
    const complexd conj_target(std::cos(target_phase), -std::sin(target_phase));
    obj.terms.push_back({u_proj(0, 0), u_proj(1, 1), u_proj(2, 2),
                         conj_target * u_proj(3, 3)});
    const PhaseOptimum opt = maximize_phase_objective(obj);
    const double t1 = (u_proj.adjoint() * u_proj).trace().real();
    VZResult out;
    out.phi1 = 0.5 * detail::wrap_angle(opt.x);
    out.phi2 = 0.5 * detail::wrap_angle(opt.y);
    out.error = 1.0 - (t1 + opt.value) / 20.0;
    return out;
}

} // namespace

VZResult virtual_z_optimize(const Eigen::Matrix4cd& u_proj) {
    return optimize_against_cphase(u_proj, constants::pi);
}

VZResult virtual_z_optimize_cphase(const Eigen::Matrix4cd& u_proj, double target_phase) {
    return optimize_against_cphase(u_proj, target_phase);
}

GateResult coherent_error(const Propagation& prop) {
    GateResult result;
    result.projected = project_computational(prop);
    const VZResult vz = virtual_z_optimize(result.projected);
    result.phase1 = vz.phi1;
    result.phase2 = vz.phi2;
    result.coherent_error = vz.error;
    result.leakage =
        1.0 - (result.projected.adjoint() * result.projected).trace().real() / 4.0;
    return result;
}

GateResult coherent_error_fixed_phases(const Propagation& prop, double phi1, double phi2) {
    GateResult result;
    result.projected = project_computational(prop);
    Eigen::Vector4cd dphase;
    const double z1[4] = {1.0, 1.0, -1.0, -1.0};
    const double z2[4] = {1.0, -1.0, 1.0, -1.0};
    for (int s = 0; s < 4; ++s) {
        const double angle = -phi1 * z1[s] - phi2 * z2[s];
        dphase(s) = complexd(std::cos(angle), std::sin(angle));
    }
    const Eigen::Matrix4cd rotated = result.projected * dphase.asDiagonal();
    result.phase1 = phi1;
    result.phase2 = phi2;
    result.coherent_error = 1.0 - gate_fidelity_cz(rotated);
    result.leakage =
        1.0 - (result.projected.adjoint() * result.projected).trace().real() / 4.0;
    return result;
}

namespace {

// One dissipator step as an explicit Kraus map: rho -> M0 rho M0^dag +
// dt sum_k L_k rho L_k^dag with M0 = sqrt(1 - dt sum L^dag L). Completely
// positive and trace preserving by construction, accurate to O(dt^2) like the
// plain Euler generator step, so the reconstructed Choi matrix stays positive
// up to roundoff.
Eigen::MatrixXcd dissipator_sqrt_kraus(const Eigen::MatrixXcd& k_sum, double dt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(k_sum);
    if (es.info() != Eigen::Success)
        throw numerical_error("propagate_lindblad: jump-rate eigendecomposition failed");
    Eigen::VectorXd lambda = es.eigenvalues();
    Eigen::VectorXd diag(lambda.size());
    for (long i = 0; i < lambda.size(); ++i) {
        const double v = 1.0 - dt * lambda(i);
        if (v <= 0.0)
            throw numerical_error("propagate_lindblad: step too large for the jump rates");
        diag(i) = std::sqrt(v);
    }
    return es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();
}

std::array<Eigen::MatrixXcd, 2> bare_lowering_ops(const PropagationFrame& frame,
                                                  int ncut) {
    const std::vector<ModeSpectrum> modes = bare_mode_spectra(frame.start_spec, ncut);
    const long mode_dim = 2L * ncut + 1L;
    std::array<Eigen::MatrixXcd, 2> out;
    for (int m = 0; m < 2; ++m) {
        Eigen::MatrixXcd ladder = Eigen::MatrixXcd::Zero(mode_dim, mode_dim);
        for (long k = 0; k + 1 < mode_dim; ++k)
            ladder(k, k + 1) = std::sqrt(static_cast<double>(k + 1));
        const Eigen::MatrixXcd a_charge =
            modes[m].evecs * ladder * modes[m].evecs.adjoint();
        const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(mode_dim, mode_dim);
        const Eigen::MatrixXcd embedded =
            m == 0 ? kron_all({a_charge, eye}) : kron_all({eye, a_charge});
        out[m] = frame.spectrum.evecs.adjoint() * embedded * frame.spectrum.evecs;
    }
    return out;
}

Eigen::MatrixXcd dissipator(const std::vector<Eigen::MatrixXcd>& jumps,
                            const Eigen::MatrixXcd& k_sum, const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd d = -0.5 * (k_sum * rho + rho * k_sum);
    for (const auto& l : jumps) d.noalias() += l * rho * l.adjoint();
    return d;
}

} // namespace

NoisyGateResult propagate_lindblad(const CircuitParams& params, const Waveform& wf,
                                   const std::array<double, 2>& t1_ns,
                                   const LindbladOptions& opts) {
    wf.validate();
    for (double t1 : t1_ns)
        if (!(t1 > 0.0)) throw parameter_error("propagate_lindblad: T1 must be positive");

    PropagationFrame frame =
        build_frame(params, wf.samples.front(), 0.0, 0.0, opts.ncut, opts.n_levels);
    const long dim = frame.spectrum.evals.size();

    const std::array<Eigen::MatrixXcd, 2> lowering = bare_lowering_ops(frame, opts.ncut);
    std::vector<Eigen::MatrixXcd> jumps;
    for (int m = 0; m < 2; ++m)
        jumps.push_back(std::sqrt(1.0 / t1_ns[m]) * lowering[m]);
    Eigen::MatrixXcd k_sum = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& l : jumps) k_sum.noalias() += l.adjoint() * l;

    std::array<int, 4> comp{};
    for (int m1 = 0; m1 < 2; ++m1)
        for (int m2 = 0; m2 < 2; ++m2)
            comp[m1 * 2 + m2] = frame.spectrum.labels.at({m1, m2});

    // the 16 outer products |c_i><c_j| seed the process reconstruction
    std::vector<Eigen::MatrixXcd> rho(16, Eigen::MatrixXcd::Zero(dim, dim));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rho[i * 4 + j](comp[i], comp[j]) = 1.0;
    const std::array<double, 4> trace0 = {1.0, 1.0, 1.0, 1.0};

    const double duration = wf.duration();
    const long n_steps =
        duration > 0.0 ? std::max<long>(1, std::lround(duration / opts.dt)) : 0;
    const double dt = n_steps > 0 ? duration / static_cast<double>(n_steps) : 0.0;

    const Eigen::MatrixXcd m0 =
        n_steps > 0 ? dissipator_sqrt_kraus(k_sum, duration / static_cast<double>(n_steps))
                    : Eigen::MatrixXcd::Identity(dim, dim);

    double trace_defect = 0.0;
    for (long k = 0; k < n_steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * dt;
        const FluxBias bias = bias_of(wf.sample(t_mid), 0.0, 0.0);
        const Eigen::MatrixXcd h =
            projected_hamiltonian(frame.terms, branch_offsets(params, bias));

        if (opts.integrator == LindbladIntegrator::split) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
            if (es.info() != Eigen::Success)
                throw numerical_error("propagate_lindblad: step eigensolver failed");
            Eigen::VectorXcd half(dim);
            for (long i = 0; i < dim; ++i) {
                const double angle = -constants::two_pi * es.eigenvalues()(i) * dt * 0.5;
                half(i) = complexd(std::cos(angle), std::sin(angle));
            }
            const Eigen::MatrixXcd u_half =
                es.eigenvectors() * half.asDiagonal() * es.eigenvectors().adjoint();
            const Eigen::MatrixXcd u_half_dag = u_half.adjoint();
            for (auto& r : rho) {
                r = u_half * r * u_half_dag;
                Eigen::MatrixXcd next = m0 * r * m0;
                for (const auto& l : jumps) next.noalias() += dt * (l * r * l.adjoint());
                r = u_half * next * u_half_dag;
            }
        } else {
            auto rhs = [&](const Eigen::MatrixXcd& r) {
                Eigen::MatrixXcd d =
                    complexd(0.0, -constants::two_pi) * (h * r - r * h);
                d += dissipator(jumps, k_sum, r);
                return d;
            };
            for (auto& r : rho) {
                const Eigen::MatrixXcd k1 = rhs(r);
                const Eigen::MatrixXcd k2 = rhs(r + 0.5 * dt * k1);
                const Eigen::MatrixXcd k3 = rhs(r + 0.5 * dt * k2);
                const Eigen::MatrixXcd k4 = rhs(r + dt * k3);
                r += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }
        if (k % 200 == 0 || k == n_steps - 1) {
            for (int i = 0; i < 4; ++i) {
                const double tr = rho[i * 4 + i].trace().real();
                trace_defect = std::max(trace_defect, std::abs(tr - trace0[i]));
            }
        }
    }
    if (trace_defect > 1e-8)
        throw numerical_error("propagate_lindblad: trace drifted beyond tolerance");

    // Choi matrix from the propagated outer products, restricted to the
    // computational subspace
    Eigen::MatrixXcd choi = Eigen::MatrixXcd::Zero(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int s = 0; s < 4; ++s)
                for (int t = 0; t < 4; ++t)
                    choi(i * 4 + s, j * 4 + t) = rho[i * 4 + j](comp[s], comp[t]);
    choi = (0.5 * (choi + choi.adjoint())).eval();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(choi);
    if (es.info() != Eigen::Success)
        throw numerical_error("propagate_lindblad: Choi eigendecomposition failed");
    const double trace_before = es.eigenvalues().sum();
    Eigen::VectorXd lambda = es.eigenvalues();
    for (long i = 0; i < lambda.size(); ++i) {
        if (lambda(i) < -1e-10)
            throw numerical_error("propagate_lindblad: Choi eigenvalue below clip threshold");
        if (lambda(i) < 0.0) lambda(i) = 0.0;
    }
    const double trace_after = lambda.sum();
    if (trace_after > 0.0) lambda *= trace_before / trace_after;

    NoisyGateResult result;
    result.trace_defect = trace_defect;
    for (long k = 0; k < lambda.size(); ++k) {
        if (lambda(k) <= 1e-14) continue;
        Eigen::Matrix4cd kraus;
        for (int i = 0; i < 4; ++i)
            for (int s = 0; s < 4; ++s)
                kraus(s, i) = std::sqrt(lambda(k)) * es.eigenvectors()(i * 4 + s, k);
        result.kraus.push_back(kraus);
    }

    // fidelity with virtual-Z freedom; cz * kraus diagonals feed the phase search
    Eigen::Matrix4cd cz = Eigen::Matrix4cd::Identity();
    cz(3, 3) = -1.0;
    PhaseObjective obj;
    double t1_term = 0.0;
    for (const auto& kr : result.kraus) {
        const Eigen::Matrix4cd m = cz * kr;
        t1_term += (kr.adjoint() * kr).trace().real();
        obj.terms.push_back({m(0, 0), m(1, 1), m(2, 2), m(3, 3)});
    }
    const PhaseOptimum opt = maximize_phase_objective(obj);
    result.phase1 = 0.5 * detail::wrap_angle(opt.x);
    result.phase2 = 0.5 * detail::wrap_angle(opt.y);
    result.infidelity = 1.0 - (t1_term + opt.value) / 20.0;
    return result;
}

LinearFit fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw parameter_error("fit_linear: need >= 2 matching points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw parameter_error("fit_linear: degenerate abscissa grid");
    LinearFit fit;
    fit.a = (n * sxy - sx * sy) / denom;
    fit.b = (sy - fit.a * sx) / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double model = fit.a * x[i] + fit.b;
        if (y[i] != 0.0)
            fit.max_rel_residual =
                std::max(fit.max_rel_residual, std::abs(model - y[i]) / std::abs(y[i]));
    }
    return fit;
}

LinearFit t1_sweep_fit(const CircuitParams& params, const Waveform& wf,
                       const std::vector<double>& t1_grid_ns,
                       const LindbladOptions& opts, std::vector<double>* infidelities) {
    if (t1_grid_ns.size() < 2)
        throw parameter_error("t1_sweep_fit: need at least two T1 values");
    const double lo = *std::min_element(t1_grid_ns.begin(), t1_grid_ns.end());
    const double hi = *std::max_element(t1_grid_ns.begin(), t1_grid_ns.end());
    if (!(hi / lo >= 10.0))
        throw parameter_error("t1_sweep_fit: grid must span at least one decade");

    std::vector<double> x(t1_grid_ns.size()), y(t1_grid_ns.size());
    detail::parallel_for(t1_grid_ns.size(), 0, [&](std::size_t i) {
        const NoisyGateResult res =
            propagate_lindblad(params, wf, {t1_grid_ns[i], t1_grid_ns[i]}, opts);
        x[i] = wf.duration() / t1_grid_ns[i];
        y[i] = res.infidelity;
    });
    if (infidelities) *infidelities = y;
    return fit_linear(x, y);
}

Eigen::MatrixXd offset_error_map(const CircuitParams& params, const Waveform& wf,
                                 const std::vector<double>& d_inner,
                                 const std::vector<double>& d_outer,
                                 const PropagateOptions& opts, int threads) {
    if (d_inner.empty() || d_outer.empty())
        throw parameter_error("offset_error_map: empty offset grid");

    PropagateOptions nominal = opts;
    nominal.delta_inner = 0.0;
    nominal.delta_outer = 0.0;
    const GateResult base = coherent_error(propagate_unitary(params, wf, nominal));

    Eigen::MatrixXd map(d_inner.size(), d_outer.size());
    detail::parallel_for(d_inner.size() * d_outer.size(), threads, [&](std::size_t idx) {
        const std::size_t i = idx / d_outer.size();
        const std::size_t j = idx % d_outer.size();
        if (d_inner[i] == 0.0 && d_outer[j] == 0.0) {
            map(i, j) = base.coherent_error;
            return;
        }
        PropagateOptions cell = opts;
        cell.delta_inner = d_inner[i];
        cell.delta_outer = d_outer[j];
        const Propagation prop = propagate_unitary(params, wf, cell);
        map(i, j) =
            coherent_error_fixed_phases(prop, base.phase1, base.phase2).coherent_error;
    });
    return map;
}

} // namespace sqc
