#include "sqc/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sqc/constants.hpp"
#include "sqc/detail/math.hpp"
#include "sqc/dynamics.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"

namespace sqc {

void Waveform::validate() const {
    if (samples.empty()) throw parameter_error("waveform needs at least one sample");
    if (!(dt > 0.0)) throw parameter_error("waveform dt must be positive");
    for (double s : samples)
        if (!std::isfinite(s)) throw parameter_error("waveform sample not finite");
}

double Waveform::sample(double t) const {
    const long n = static_cast<long>(samples.size());
    if (n == 1) return samples[0];
    const double u = t / dt;
    if (u <= 0.0) return samples.front();
    if (u >= static_cast<double>(n - 1)) return samples.back();
    const long i = static_cast<long>(u);
    const double x = u - static_cast<double>(i);
    auto at = [&](long k) { return samples[std::clamp<long>(k, 0, n - 1)]; };
    const double p0 = at(i - 1), p1 = at(i), p2 = at(i + 1), p3 = at(i + 2);
    // Catmull-Rom
    return p1 + 0.5 * x * (p2 - p0 +
           x * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 +
           x * (3.0 * (p1 - p2) + p3 - p0)));
}

void PulseConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw parameter_error("pulse beta must be in (0, 1)");
    if (sigma_filter < 0.0) throw parameter_error("pulse sigma_filter must be >= 0");
    if (phi_on == phi_off) throw parameter_error("pulse phi_on must differ from phi_off");
    if (!(t_gate > 0.0)) throw parameter_error("pulse t_gate must be positive");
    if (!(dt > 0.0)) throw parameter_error("pulse dt must be positive");
}

double mixing_angle(double coupling, double detuning) {
    if (detuning == 0.0) return coupling >= 0.0 ? constants::pi / 4.0 : -constants::pi / 4.0;
    return 0.5 * std::atan(2.0 * coupling / detuning);
}

namespace {

// Fritsch-Carlson monotone cubic interpolation on strictly monotone knots.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> xs, std::vector<double> ys)
        : xs_(std::move(xs)), ys_(std::move(ys)) {
        const std::size_t n = xs_.size();
        if (n < 2 || ys_.size() != n)
            throw parameter_error("interpolation table needs >= 2 matching knots");
        if (xs_[1] < xs_[0]) {
            std::reverse(xs_.begin(), xs_.end());
            std::reverse(ys_.begin(), ys_.end());
        }
        for (std::size_t i = 1; i < n; ++i)
            if (xs_[i] <= xs_[i - 1])
                throw parameter_error("interpolation knots must be strictly monotone");
        tangents_.resize(n);
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
        tangents_[0] = d[0];
        tangents_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            tangents_[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) { tangents_[i] = tangents_[i + 1] = 0.0; continue; }
            const double a = tangents_[i] / d[i];
            const double b = tangents_[i + 1] / d[i];
            const double s = a * a + b * b;
            if (s > 9.0) {
                const double tau = 3.0 / std::sqrt(s);
                tangents_[i] = tau * a * d[i];
                tangents_[i + 1] = tau * b * d[i];
            }
        }
    }

    double operator()(double x) const {
        const std::size_t n = xs_.size();
        if (x <= xs_.front()) return ys_.front() + tangents_.front() * (x - xs_.front());
        if (x >= xs_.back()) return ys_.back() + tangents_.back() * (x - xs_.back());
        const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
        const double h = xs_[i + 1] - xs_[i];
        const double u = (x - xs_[i]) / h;
        const double u2 = u * u, u3 = u2 * u;
        return ys_[i] * (2 * u3 - 3 * u2 + 1) + h * tangents_[i] * (u3 - 2 * u2 + u) +
               ys_[i + 1] * (-2 * u3 + 3 * u2) + h * tangents_[i + 1] * (u3 - u2);
    }

private:
    std::vector<double> xs_, ys_, tangents_;
};

} // namespace

double ThetaTable::phi_of_theta(double theta_value) const {
    const double lo = std::min(theta.front(), theta.back());
    const double hi = std::max(theta.front(), theta.back());
    const double span = hi - lo;
    if (theta_value < lo - 1e-9 * span || theta_value > hi + 1e-9 * span)
        throw physics_error("mixing angle outside the tabulated branch");
    MonotoneCubic inverse(theta, phi);
    return inverse(std::clamp(theta_value, lo, hi));
}

ThetaTable mixing_angle_table(const CircuitParams& params,
                              const std::vector<double>& flux_grid,
                              const SolveOptions& opts) {
    if (flux_grid.size() < 2) throw parameter_error("mixing_angle_table: grid too small");
    for (std::size_t i = 1; i < flux_grid.size(); ++i)
        if (flux_grid[i] <= flux_grid[i - 1])
            throw parameter_error("mixing_angle_table: grid must be strictly increasing");

    ThetaTable table;
    table.phi = flux_grid;
    table.theta.resize(flux_grid.size());

    std::complex<double> prev_elem(0.0, 0.0);
    double branch_sign = 1.0;
    for (std::size_t k = 0; k < flux_grid.size(); ++k) {
        const HamiltonianSpec spec =
            compile_two_qubit(params, FluxBias::operating(flux_grid[k]));
        const std::vector<ModeSpectrum> modes = bare_mode_spectra(spec, opts.ncut);
        const Eigen::MatrixXcd h = assemble_hamiltonian(spec, opts.ncut);

        const Eigen::VectorXcd bare11 =
            kron_all({modes[0].evecs.col(1), modes[1].evecs.col(1)});
        const Eigen::VectorXcd bare02 =
            kron_all({modes[0].evecs.col(0), modes[1].evecs.col(2)});
        const std::complex<double> elem = bare02.dot(h * bare11);
        const double detuning = (modes[0].evals(1) + modes[1].evals(1)) -
                                (modes[0].evals(0) + modes[1].evals(2));
        if (std::abs(detuning) < 1e-6)
            throw physics_error("mixing_angle_table: bare |11>/|02> degeneracy on grid");

        if (k > 0 && std::real(elem * std::conj(prev_elem)) < 0.0) branch_sign = -branch_sign;
        prev_elem = elem;
        table.theta[k] = 0.5 * std::atan(2.0 * branch_sign * std::abs(elem) / detuning);
    }

    double max_theta = 0.0;
    for (double t : table.theta) max_theta = std::max(max_theta, std::abs(t));
    if (max_theta < 1e-12) return table;  // decoupled circuit: identically zero

    const bool increasing = table.theta[1] > table.theta[0];
    for (std::size_t k = 1; k < table.theta.size(); ++k) {
        const bool step_up = table.theta[k] > table.theta[k - 1];
        if (step_up != increasing)
            throw physics_error("mixing_angle_table: non-monotone branch");
    }
    return table;
}

std::vector<double> kaiser_window(int n, double shape) {
    if (n < 1) throw parameter_error("kaiser_window: n must be >= 1");
    std::vector<double> w(n);
    if (n == 1) { w[0] = 1.0; return w; }
    const double denom = std::cyl_bessel_i(0.0, shape);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = 2.0 * i / (n - 1.0) - 1.0;
        w[i] = std::cyl_bessel_i(0.0, shape * std::sqrt(std::max(0.0, 1.0 - x * x))) / denom;
        sum += w[i];
    }
    for (double& v : w) v /= sum;
    return w;
}

namespace {

// Normalized cumulative of the edge-tapered Kaiser window on [0, 1]. The
// taper subtracts the edge value so the density vanishes exactly at both
// ends, which keeps synthesized waveforms pinned at phi_off.
class WindowCdf {
public:
    explicit WindowCdf(double shape, int resolution = 4096) : cdf_(resolution + 1) {
        const double denom = std::cyl_bessel_i(0.0, shape);
        const double edge = 1.0 / denom;  // window value at x = +-1
        std::vector<double> pdf(resolution + 1);
        for (int i = 0; i <= resolution; ++i) {
            const double x = 2.0 * i / resolution - 1.0;
            pdf[i] = std::cyl_bessel_i(0.0, shape * std::sqrt(std::max(0.0, 1.0 - x * x))) /
                         denom -
                     edge;
        }
        cdf_[0] = 0.0;
        for (int i = 1; i <= resolution; ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * (pdf[i - 1] + pdf[i]);
        const double total = cdf_.back();
        if (total <= 0.0) throw numerical_error("degenerate pulse window");
        for (double& v : cdf_) v /= total;
    }

    double operator()(double u) const {
        if (u <= 0.0) return 0.0;
        if (u >= 1.0) return 1.0;
        const double s = u * (cdf_.size() - 1.0);
        const std::size_t i = static_cast<std::size_t>(s);
        const double frac = s - static_cast<double>(i);
        return cdf_[i] * (1.0 - frac) + cdf_[i + 1] * frac;
    }

private:
    std::vector<double> cdf_;
};

} // namespace

Waveform synthesize(const PulseConfig& config, const ThetaTable& table) {
    config.validate();
    const int n_total = static_cast<int>(std::lround(config.t_gate / config.dt)) + 1;
    if (n_total < 3) throw parameter_error("synthesize: t_gate too short for dt");

    // continuous convolution of a unit square of duration beta*T with the
    // unit-integral window of duration (1-beta)*T, via the window cumulative:
    // y(t) = C(t/Tw) - C((t - beta*T)/Tw). Smooth in beta, exactly symmetric,
    // exactly zero at both ends; the peak stays below one until the square
    // covers the window (beta >= 1/2).
    const double t_sq = config.beta * config.t_gate;
    const double t_w = (1.0 - config.beta) * config.t_gate;
    const WindowCdf cdf(config.window_shape);
    auto shape = [&](double t) {
        if (t_w <= 1e-12 * config.t_gate)
            return (t >= 0.0 && t <= t_sq) ? 1.0 : 0.0;
        return cdf(t / t_w) - cdf((t - t_sq) / t_w);
    };

    MonotoneCubic theta_of_phi(table.phi, table.theta);
    const double theta_off = theta_of_phi(config.phi_off);
    const double theta_on = theta_of_phi(config.phi_on);

    Waveform wf;
    wf.dt = config.dt;
    wf.samples.resize(n_total);
    for (int k = 0; k < n_total; ++k) {
        const double y = shape(static_cast<double>(k) * config.dt);
        const double theta = theta_off + (theta_on - theta_off) * y;
        wf.samples[k] = table.phi_of_theta(theta);
    }
    // endpoints are exact by construction (y = 0 at both ends)
    wf.samples.front() = config.phi_off;
    wf.samples.back() = config.phi_off;
    return wf;
}

Waveform gaussian_filter(const Waveform& wf, double sigma) {
    wf.validate();
    if (sigma < 0.0) throw parameter_error("gaussian_filter: sigma must be >= 0");
    const long half = static_cast<long>(std::ceil(5.0 * sigma / wf.dt));
    if (sigma == 0.0 || half < 1) return wf;

    std::vector<double> kernel(2 * half + 1);
    double sum = 0.0;
    for (long j = -half; j <= half; ++j) {
        const double t = static_cast<double>(j) * wf.dt;
        kernel[j + half] = std::exp(-t * t / (2.0 * sigma * sigma));
        sum += kernel[j + half];
    }
    for (double& v : kernel) v /= sum;

    const long n = static_cast<long>(wf.samples.size());
    Waveform out;
    out.dt = wf.dt;
    out.samples.resize(n);
    for (long k = 0; k < n; ++k) {
        double acc = 0.0;
        for (long j = -half; j <= half; ++j) {
            const long idx = std::clamp<long>(k - j, 0, n - 1); // hold boundary value
            acc += kernel[j + half] * wf.samples[idx];
        }
        out.samples[k] = acc;
    }
    // re-anchor the ends onto the input's boundary values: the leaked ramp
    // tail is removed with a linear correction
    const double da = wf.samples.front() - out.samples.front();
    const double db = wf.samples.back() - out.samples.back();
    for (long k = 0; k < n; ++k) {
        const double u = static_cast<double>(k) / static_cast<double>(n - 1);
        out.samples[k] += da * (1.0 - u) + db * u;
    }
    return out;
}

CalibrationResult calibrate_beta(const CircuitParams& params, double t_gate,
                                 const PulseConfig& config_template) {
    return calibrate_beta(params, t_gate, config_template, PropagateOptions{});
}

CalibrationResult calibrate_beta(const CircuitParams& params, double t_gate,
                                 const PulseConfig& config_template,
                                 const PropagateOptions& prop_opts) {
    PulseConfig config = config_template;
    config.t_gate = t_gate;
    config.beta = 0.5;
    config.validate();

    SolveOptions sopts;
    sopts.ncut = prop_opts.ncut;
    const double zeta_on = zz_at(params, config.phi_on, sopts);
    const double min_t_gate = 0.5 / std::abs(zeta_on);
    if (t_gate <= min_t_gate) {
        std::ostringstream msg;
        msg << "gate duration " << t_gate << " ns is below the minimum "
            << min_t_gate << " ns set by the on-state ZZ rate";
        throw infeasible_gate(msg.str());
    }

    const double lo = std::min(config.phi_on, config.phi_off);
    const double hi = std::max(config.phi_on, config.phi_off);
    std::vector<double> grid(401);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / (grid.size() - 1.0);
    const ThetaTable table = mixing_angle_table(params, grid, sopts);

    int evals = 0;
    double last_phase = 0.0;
    bool have_last = false;
    auto phase_of_beta = [&](double beta) {
        PulseConfig c = config;
        c.beta = beta;
        const Waveform wf = gaussian_filter(synthesize(c, table), c.sigma_filter);
        const Propagation prop = propagate_unitary(params, wf, prop_opts);
        double phase = entangling_phase(project_computational(prop));
        if (have_last)
            phase += constants::two_pi * std::round((last_phase - phase) / constants::two_pi);
        last_phase = phase;
        have_last = true;
        ++evals;
        return phase;
    };

    // bracket the target phase on a coarse beta scan, unwrapping as we go;
    // near-minimal gate durations need the square fraction pushed close to
    // one, but the taper must stay at least two filter widths wide or the
    // filtered edges degenerate
    const double beta_cap = std::min(0.995, 1.0 - 2.0 * config.sigma_filter / t_gate);
    std::vector<double> betas;
    for (int i = 0; i < 9; ++i) betas.push_back(0.05 + 0.90 * i / 8.0);
    for (double b : {0.96, 0.97, 0.98, 0.99, 0.995})
        if (b <= beta_cap) betas.push_back(b);
    std::vector<double> phases(betas.size());
    int bracket = -1;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        phases[i] = phase_of_beta(betas[i]);
        if (i > 0 && (phases[i - 1] - constants::pi) * (phases[i] - constants::pi) <= 0.0) {
            bracket = static_cast<int>(i);
            break;
        }
    }
    if (bracket < 0)
        throw infeasible_gate("entangling phase does not reach pi on the beta bracket");

    have_last = true;
    last_phase = phases[bracket];
    const double beta = detail::brent_root(
        [&](double b) { return phase_of_beta(b) - constants::pi; },
        betas[bracket - 1], betas[bracket], 1e-10, 1e-6, 60);

    CalibrationResult result;
    result.beta = beta;
    PulseConfig final_config = config;
    final_config.beta = beta;
    result.waveform = gaussian_filter(synthesize(final_config, table), config.sigma_filter);
    const Propagation prop = propagate_unitary(params, result.waveform, prop_opts);
    double phase = entangling_phase(project_computational(prop));
    phase += constants::two_pi * std::round((constants::pi - phase) / constants::two_pi);
    result.phase = phase;
    result.iterations = evals;
    if (std::abs(result.phase - constants::pi) > 1e-6)
        throw numerical_error("calibrate_beta: entangling phase did not converge to pi");
    return result;
}

void write_waveform_csv(const Waveform& wf, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open waveform file for writing: " + path);
    out << "t_ns,phi_e1\n";
    char buf[64];
    for (std::size_t k = 0; k < wf.samples.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", k * wf.dt, wf.samples[k]);
        out << buf;
    }
}

Waveform read_waveform_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open waveform file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw parameter_error("empty waveform file: " + path);
    Waveform wf;
    std::vector<double> times;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        double t, v;
        char comma;
        if (!(ss >> t >> comma >> v))
            throw parameter_error("malformed waveform row: " + line);
        times.push_back(t);
        wf.samples.push_back(v);
    }
    if (times.size() < 2) throw parameter_error("waveform file needs >= 2 samples");
    wf.dt = times[1] - times[0];
    wf.validate();
    return wf;
}

} // namespace sqc
