#include "sqc/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqc/detail/math.hpp"
#include "sqc/errors.hpp"
#include "sqc/operators.hpp"

namespace sqc {

namespace {

std::string tuple_str(const BareTuple& t) {
    std::ostringstream msg;
    msg << "(";
    for (std::size_t i = 0; i < t.size(); ++i) msg << (i ? "," : "") << t[i];
    msg << ")";
    return msg.str();
}

} // namespace

double Spectrum::energy(const BareTuple& t) const {
    auto it = labels.find(t);
    if (it == labels.end())
        throw labeling_error("missing label for bare tuple " + tuple_str(t));
    auto ov = overlaps.find(t);
    if (ov != overlaps.end() && ov->second < 0.5)
        throw labeling_error("ambiguous label for bare tuple " + tuple_str(t) +
                             ": overlap " + std::to_string(ov->second) + " below 0.5");
    return evals(it->second);
}

Spectrum diagonalize(const Eigen::MatrixXcd& h, int n_levels) {
    const long dim = h.rows();
    if (n_levels < 1 || n_levels > dim)
        throw parameter_error("diagonalize: n_levels out of range");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success)
        throw numerical_error("diagonalize: eigensolver failed to converge");

    Spectrum spec;
    spec.evals = es.eigenvalues().head(n_levels);
    spec.evecs = es.eigenvectors().leftCols(n_levels);

    const double scale = h.cwiseAbs().maxCoeff();
    const Eigen::MatrixXcd residual =
        h * spec.evecs - spec.evecs * spec.evals.asDiagonal();
    if (residual.cwiseAbs().maxCoeff() > 1e-9 * std::max(scale, 1.0))
        throw numerical_error("diagonalize: eigenpair residual above tolerance");
    return spec;
}

std::vector<ModeSpectrum> bare_mode_spectra(const HamiltonianSpec& spec, int ncut) {
    std::vector<ModeSpectrum> modes(spec.n_modes);
    for (int m = 0; m < spec.n_modes; ++m) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mode_hamiltonian(spec, m, ncut));
        if (es.info() != Eigen::Success)
            throw numerical_error("bare_mode_spectra: eigensolver failed");
        modes[m].evals = es.eigenvalues();
        modes[m].evecs = es.eigenvectors();
    }
    return modes;
}

namespace {

std::vector<BareTuple> candidate_tuples(int n_modes, int max_level) {
    std::vector<BareTuple> tuples;
    BareTuple t(n_modes, 0);
    while (true) {
        tuples.push_back(t);
        int m = n_modes - 1;
        while (m >= 0 && t[m] == max_level) t[m--] = 0;
        if (m < 0) break;
        ++t[m];
    }
    return tuples;
}

struct OverlapEntry {
    double p;
    int tuple_idx;
    int eig_idx;
};

// Greedy descending-overlap assignment with uniqueness on both sides. The
// dominant-overlap rule for computational states is enforced eagerly for
// two-mode circuits; larger circuits defer it to the energy lookup so that a
// crossing among states the caller never uses cannot poison the solve.
void assign_labels(Spectrum& spec, const std::vector<BareTuple>& tuples,
                   const Eigen::MatrixXd& overlap) {
    const int n_t = static_cast<int>(tuples.size());
    const int n_e = static_cast<int>(spec.evals.size());
    std::vector<OverlapEntry> entries;
    entries.reserve(static_cast<std::size_t>(n_t) * n_e);
    for (int t = 0; t < n_t; ++t)
        for (int e = 0; e < n_e; ++e)
            entries.push_back({overlap(t, e), t, e});
    std::sort(entries.begin(), entries.end(), [](const OverlapEntry& a, const OverlapEntry& b) {
        if (a.p != b.p) return a.p > b.p;
        if (a.tuple_idx != b.tuple_idx) return a.tuple_idx < b.tuple_idx;
        return a.eig_idx < b.eig_idx;
    });
    std::vector<bool> tuple_used(n_t, false), eig_used(n_e, false);
    for (const auto& entry : entries) {
        if (tuple_used[entry.tuple_idx] || eig_used[entry.eig_idx]) continue;
        tuple_used[entry.tuple_idx] = true;
        eig_used[entry.eig_idx] = true;
        spec.labels[tuples[entry.tuple_idx]] = entry.eig_idx;
        spec.overlaps[tuples[entry.tuple_idx]] = entry.p;
    }

    if (spec.n_modes <= 2) {
        for (const auto& t : candidate_tuples(spec.n_modes, 1)) {
            auto it = spec.overlaps.find(t);
            if (it == spec.overlaps.end() || it->second < 0.5) {
                std::ostringstream msg;
                msg << "ambiguous labeling: computational state " << tuple_str(t)
                    << " overlap " << (it == spec.overlaps.end() ? 0.0 : it->second)
                    << " below 0.5";
                throw labeling_error(msg.str());
            }
        }
    }
}

} // namespace

void label_dressed(Spectrum& spec, const std::vector<ModeSpectrum>& modes,
                   int max_label_level) {
    spec.n_modes = static_cast<int>(modes.size());
    int max_level = max_label_level;
    for (const auto& m : modes)
        max_level = std::min<int>(max_level, static_cast<int>(m.evals.size()) - 1);
    const std::vector<BareTuple> tuples = candidate_tuples(spec.n_modes, max_level);

    // bare product vectors, one column per tuple
    Eigen::MatrixXcd bare(spec.evecs.rows(), tuples.size());
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        std::vector<Eigen::MatrixXcd> cols;
        cols.reserve(modes.size());
        for (std::size_t m = 0; m < modes.size(); ++m)
            cols.push_back(modes[m].evecs.col(tuples[t][m]));
        bare.col(t) = kron_all(cols);
    }
    const Eigen::MatrixXd overlap =
        (bare.adjoint() * spec.evecs).cwiseAbs2();
    assign_labels(spec, tuples, overlap);
}

void label_dressed_product_basis(Spectrum& spec, const std::vector<int>& levels_per_mode,
                                 int max_label_level) {
    spec.n_modes = static_cast<int>(levels_per_mode.size());
    int max_level = max_label_level;
    for (int l : levels_per_mode) max_level = std::min(max_level, l - 1);
    const std::vector<BareTuple> tuples = candidate_tuples(spec.n_modes, max_level);

    Eigen::MatrixXd overlap(tuples.size(), spec.evals.size());
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        long row = 0;
        for (std::size_t m = 0; m < levels_per_mode.size(); ++m)
            row = row * levels_per_mode[m] + tuples[t][m];
        overlap.row(t) = spec.evecs.row(row).cwiseAbs2().real();
    }
    assign_labels(spec, tuples, overlap);
}

double zz_rate(const Spectrum& spec, int mode_i, int mode_j) {
    if (mode_i == mode_j || mode_i < 0 || mode_j < 0 || mode_i >= spec.n_modes ||
        mode_j >= spec.n_modes)
        throw parameter_error("zz_rate: invalid mode pair");
    BareTuple ground(spec.n_modes, 0);
    BareTuple ei = ground, ej = ground, eij = ground;
    ei[mode_i] = 1;
    ej[mode_j] = 1;
    eij[mode_i] = 1;
    eij[mode_j] = 1;
    return spec.energy(ground) - spec.energy(ei) - spec.energy(ej) + spec.energy(eij);
}

double avg_hybridization(const Spectrum& spec) {
    double total = 0.0;
    int count = 0;
    for (const auto& t : candidate_tuples(spec.n_modes, 1)) {
        auto it = spec.overlaps.find(t);
        if (it == spec.overlaps.end())
            throw labeling_error("avg_hybridization: computational state unlabeled");
        total += 1.0 - it->second;
        ++count;
    }
    return total / count;
}

namespace {

Spectrum solve_full(const HamiltonianSpec& hspec, const SolveOptions& opts) {
    const Eigen::MatrixXcd h = assemble_hamiltonian(hspec, opts.ncut);
    const int n_levels = std::min<long>(opts.resolved_levels(hspec.n_modes), h.rows());
    Spectrum spec = diagonalize(h, n_levels);
    label_dressed(spec, bare_mode_spectra(hspec, opts.ncut), opts.max_label_level);
    return spec;
}

Spectrum solve_hierarchical(const HamiltonianSpec& hspec, const SolveOptions& opts) {
    const std::vector<ModeSpectrum> modes = bare_mode_spectra(hspec, opts.ncut);
    const int nb = opts.bare_levels;
    const ChargeBasisOps ops = charge_ops(opts.ncut);

    // per-mode truncated bare bases and projected operators
    std::vector<Eigen::MatrixXcd> w(hspec.n_modes);
    std::vector<Eigen::MatrixXcd> n_proj(hspec.n_modes);
    std::vector<Eigen::MatrixXcd> shift_proj(hspec.n_modes);
    std::vector<Eigen::VectorXd> bare_evals(hspec.n_modes);
    for (int m = 0; m < hspec.n_modes; ++m) {
        if (nb > modes[m].evals.size())
            throw parameter_error("solve_hierarchical: bare_levels exceeds mode dimension");
        w[m] = modes[m].evecs.leftCols(nb);
        bare_evals[m] = modes[m].evals.head(nb);
        n_proj[m] = w[m].adjoint() * ops.n * w[m];
        shift_proj[m] = w[m].adjoint() * ops.exp_iphi * w[m];
    }

    long dim = 1;
    for (int m = 0; m < hspec.n_modes; ++m) dim *= nb;
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
    const Eigen::MatrixXcd eye = Eigen::MatrixXcd::Identity(nb, nb);

    // bare mode energies on the diagonal
    for (long idx = 0; idx < dim; ++idx) {
        long rest = idx;
        double e = 0.0;
        for (int m = hspec.n_modes - 1; m >= 0; --m) {
            e += bare_evals[m](rest % nb);
            rest /= nb;
        }
        h(idx, idx) = e;
    }

    // charge-charge couplings
    for (int i = 0; i < hspec.n_modes; ++i)
        for (int j = i + 1; j < hspec.n_modes; ++j) {
            if (hspec.g(i, j) == 0.0) continue;
            std::vector<Eigen::MatrixXcd> factors(hspec.n_modes, eye);
            factors[i] = n_proj[i];
            factors[j] = n_proj[j];
            h.noalias() += hspec.g(i, j) * kron_all(factors);
        }

    // multi-mode branches (single-mode ones are inside the bare energies)
    for (const auto& branch : hspec.branches) {
        int touched = 0;
        for (int m = 0; m < hspec.n_modes; ++m)
            if (branch.signs[m] != 0) ++touched;
        if (touched <= 1) continue;
        std::vector<Eigen::MatrixXcd> factors(hspec.n_modes, eye);
        for (int m = 0; m < hspec.n_modes; ++m) {
            if (branch.signs[m] == 0) continue;
            factors[m] = branch.signs[m] == 1
                             ? shift_proj[m]
                             : Eigen::MatrixXcd(shift_proj[m].adjoint());
        }
        const Eigen::MatrixXcd prod = kron_all(factors);
        const std::complex<double> phase(std::cos(branch.offset), std::sin(branch.offset));
        h.noalias() -= 0.5 * branch.ej * (phase * prod);
        h.noalias() -= 0.5 * branch.ej * (std::conj(phase) * prod.adjoint());
    }

    const int n_levels = std::min<long>(opts.resolved_levels(hspec.n_modes), dim);
    Spectrum spec = diagonalize(h, n_levels);
    label_dressed_product_basis(spec, std::vector<int>(hspec.n_modes, nb),
                                opts.max_label_level);
    return spec;
}

} // namespace

Spectrum solve_spectrum(const HamiltonianSpec& spec, const SolveOptions& opts) {
    if (opts.use_hierarchical(spec.n_modes)) return solve_hierarchical(spec, opts);
    return solve_full(spec, opts);
}

double zz_at(const CircuitParams& params, double phi_e1, const SolveOptions& opts) {
    const Spectrum s = solve_spectrum(compile_two_qubit(params, FluxBias::operating(phi_e1)), opts);
    return zz_rate(s, 0, 1);
}

namespace {

// Locate a sign-changing subinterval of f on [lo, hi] by a fixed scan, then
// refine with Brent. Returns false when f has one sign on the whole grid.
template <typename F>
bool bracketed_root(F&& f, double lo, double hi, double xtol, double ftol,
                    double* root, double* f_scan_max = nullptr) {
    constexpr int kScan = 16;
    double xs[kScan + 1], fs[kScan + 1];
    double max_abs = 0.0;
    for (int i = 0; i <= kScan; ++i) {
        xs[i] = lo + (hi - lo) * i / kScan;
        fs[i] = f(xs[i]);
        max_abs = std::max(max_abs, std::abs(fs[i]));
    }
    if (f_scan_max) *f_scan_max = max_abs;
    for (int i = 0; i < kScan; ++i) {
        if (fs[i] == 0.0) { *root = xs[i]; return true; }
        if (fs[i] * fs[i + 1] < 0.0) {
            *root = detail::brent_root(f, xs[i], xs[i + 1], xtol, ftol);
            return true;
        }
    }
    if (fs[kScan] == 0.0) { *root = xs[kScan]; return true; }
    return false;
}

} // namespace

double find_phi_off(const CircuitParams& params, double lo, double hi,
                    const SolveOptions& opts, double flux_tol, double zeta_tol) {
    auto f = [&](double phi) { return zz_at(params, phi, opts); };
    double root = 0.0;
    if (!bracketed_root(f, lo, hi, flux_tol, zeta_tol, &root))
        throw no_idle_point("ZZ rate does not change sign on the search bracket");
    return root;
}

std::vector<SweepRow> sweep_flux(const CircuitParams& params,
                                 const std::vector<double>& grid, int n_eigs,
                                 const SolveOptions& opts, int threads) {
    if (grid.empty()) throw parameter_error("sweep_flux: empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw parameter_error("sweep_flux: grid must be strictly increasing");

    std::vector<SweepRow> rows(grid.size());
    detail::parallel_for(grid.size(), threads, [&](std::size_t i) {
        SweepRow row;
        row.phi = grid[i];
        try {
            const Spectrum s =
                solve_spectrum(compile_two_qubit(params, FluxBias::operating(grid[i])), opts);
            row.zeta = zz_rate(s, 0, 1);
            row.hybridization = avg_hybridization(s);
            const int k = std::min<long>(n_eigs, s.evals.size());
            row.eigs.assign(s.evals.data(), s.evals.data() + k);
        } catch (const labeling_error&) {
            row.label_ok = false;
        }
        rows[i] = std::move(row);
    });
    return rows;
}

double eig_excursion(const std::vector<SweepRow>& rows, int n_transitions) {
    double excursion = 0.0;
    for (int k = 1; k <= n_transitions; ++k) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& row : rows) {
            if (!row.label_ok || static_cast<int>(row.eigs.size()) <= k) continue;
            const double w = row.eigs[k] - row.eigs[0];
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        if (hi > lo) excursion = std::max(excursion, hi - lo);
    }
    return excursion;
}

double chain_zz(const ChainParams& chain, double phi12, double phi23,
                int mode_i, int mode_j, const SolveOptions& opts) {
    ChainParams c = chain;
    c.bias12 = FluxBias::operating(phi12);
    c.bias23 = FluxBias::operating(phi23);
    const Spectrum s = solve_spectrum(compile_chain(c), opts);
    return zz_rate(s, mode_i, mode_j);
}

ChainIdleResult idle_chain_biases(const ChainParams& chain, double lo, double hi,
                                  const SolveOptions& opts, double zeta_tol,
                                  int max_outer) {
    ChainIdleResult result;
    result.phi12 = 0.5 * (lo + hi);
    result.phi23 = 0.5 * (lo + hi);

    for (int iter = 0; iter < max_outer; ++iter) {
        result.iterations = iter + 1;
        // after the first pass the roots barely move; try a narrow bracket first
        const double window = 0.03;
        auto solve_one = [&](auto f, double current, const char* which) {
            double root = 0.0, scan_max = 0.0;
            if (iter > 0) {
                const double a = std::max(lo, current - window);
                const double b = std::min(hi, current + window);
                const double fa = f(a), fb = f(b);
                if (fa == 0.0) return a;
                if (fb == 0.0) return b;
                if (fa * fb < 0.0)
                    return detail::brent_root(f, a, b, 1e-6, zeta_tol);
            }
            if (bracketed_root(f, lo, hi, 1e-6, zeta_tol, &root, &scan_max)) return root;
            if (scan_max >= zeta_tol)
                throw no_idle_point(std::string("chain coupler ") + which +
                                    " admits no idle flux on the bracket");
            return current;
        };
        result.phi12 = solve_one(
            [&](double phi) { return chain_zz(chain, phi, result.phi23, 0, 1, opts); },
            result.phi12, "1-2");
        result.phi23 = solve_one(
            [&](double phi) { return chain_zz(chain, result.phi12, phi, 1, 2, opts); },
            result.phi23, "2-3");
        const double z12 = chain_zz(chain, result.phi12, result.phi23, 0, 1, opts);
        const double z23 = chain_zz(chain, result.phi12, result.phi23, 1, 2, opts);
        if (std::abs(z12) < zeta_tol && std::abs(z23) < zeta_tol) {
            result.zeta13 = chain_zz(chain, result.phi12, result.phi23, 0, 2, opts);
            return result;
        }
    }
    throw numerical_error("idle_chain_biases: alternating solves did not converge");
}

} // namespace sqc
