#include "experiments.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "sqc/circuit.hpp"
#include "sqc/constants.hpp"
#include "sqc/dynamics.hpp"
#include "sqc/errors.hpp"
#include "sqc/noise.hpp"
#include "sqc/perturbation.hpp"
#include "sqc/pulse.hpp"
#include "sqc/spectrum.hpp"

namespace sqc::cli {

namespace {

using nlohmann::ordered_json;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / std::max(1, n - 1);
    return g;
}

SolveOptions solve_opts(const RunOptions& run) {
    SolveOptions s;
    s.ncut = run.ncut;
    s.n_levels = run.n_levels;
    return s;
}

PropagateOptions prop_opts(const RunOptions& run) {
    PropagateOptions p;
    p.ncut = run.ncut;
    p.n_levels = run.n_levels > 0 ? run.n_levels : 40;
    p.dt = run.dt;
    return p;
}

PulseConfig pulse_config(const RunOptions& run, double phi_off) {
    PulseConfig cfg;
    cfg.t_gate = run.t_gate;
    cfg.phi_on = 0.0;
    cfg.phi_off = phi_off;
    cfg.sigma_filter = run.sigma;
    cfg.window_shape = run.window_shape;
    return cfg;
}

void write_json(const std::string& path, const ordered_json& doc) {
    std::ofstream out(path);
    if (!out) throw parameter_error("cannot open output file: " + path);
    out << doc.dump(2) << "\n";
}

// Calibrates the gate unless a pre-computed waveform file was supplied.
Waveform gate_waveform(const CircuitParams& params, const RunOptions& run,
                       double* beta_out = nullptr) {
    if (!run.waveform_path.empty()) {
        if (beta_out) *beta_out = std::nan("");
        return read_waveform_csv(run.waveform_path);
    }
    const double phi_off = find_phi_off(params, run.bracket_lo, run.bracket_hi, solve_opts(run));
    const CalibrationResult cal =
        calibrate_beta(params, run.t_gate, pulse_config(run, phi_off), prop_opts(run));
    if (beta_out) *beta_out = cal.beta;
    return cal.waveform;
}

FluxNoiseModel stated_noise() { return {1e-6, 5e-6, 5e-6, -1.0}; }

std::vector<std::string> run_zz_sweep(const CircuitConfig& config, const RunOptions& run) {
    const std::vector<SweepRow> rows =
        sweep_flux(config.circuit, linspace(run.sweep_start, run.sweep_stop, run.sweep_points),
                   run.n_eigs, solve_opts(run), run.threads);
    std::vector<std::string> header{"flux", "zeta_GHz", "hybridization"};
    for (int k = 0; k < run.n_eigs; ++k) header.push_back("eig_" + std::to_string(k));
    CsvWriter csv(run.out_dir + "/zz_sweep.csv", header);
    for (const auto& row : rows) {
        std::vector<double> values{row.phi, row.zeta, row.hybridization};
        for (int k = 0; k < run.n_eigs; ++k)
            values.push_back(k < static_cast<int>(row.eigs.size())
                                 ? row.eigs[k]
                                 : std::nan(""));
        csv.row(values);
    }
    return {"zz_sweep.csv"};
}

std::vector<std::string> run_spectrum(const CircuitConfig& config, const RunOptions& run) {
    const Spectrum s = solve_spectrum(
        compile_two_qubit(config.circuit, FluxBias::operating(run.phi)), solve_opts(run));
    std::vector<int> label_of(s.evals.size(), -1);
    std::vector<double> overlap_of(s.evals.size(), 0.0);
    std::map<int, BareTuple> inverse;
    for (const auto& [tuple, idx] : s.labels) inverse[idx] = tuple;
    CsvWriter csv(run.out_dir + "/spectrum.csv",
                  {"index", "energy_GHz", "transition_GHz", "bare_m1", "bare_m2", "overlap"});
    for (long k = 0; k < s.evals.size(); ++k) {
        double m1 = std::nan(""), m2 = std::nan(""), ov = std::nan("");
        auto it = inverse.find(static_cast<int>(k));
        if (it != inverse.end()) {
            m1 = it->second[0];
            m2 = it->second[1];
            ov = s.overlaps.at(it->second);
        }
        csv.row({static_cast<double>(k), s.evals(k), s.evals(k) - s.evals(0), m1, m2, ov});
    }
    return {"spectrum.csv"};
}

std::vector<std::string> run_find_off(const CircuitConfig& config, const RunOptions& run) {
    const double phi_off =
        find_phi_off(config.circuit, run.bracket_lo, run.bracket_hi, solve_opts(run));
    ordered_json doc;
    doc["phi_off"] = phi_off;
    doc["zeta_on_GHz"] = zz_at(config.circuit, 0.0, solve_opts(run));
    doc["zeta_off_GHz"] = zz_at(config.circuit, phi_off, solve_opts(run));
    write_json(run.out_dir + "/find_off.json", doc);
    return {"find_off.json"};
}

ordered_json gate_result_json(const RunOptions& run, double beta, const GateResult& res) {
    ordered_json doc;
    doc["t_gate_ns"] = run.t_gate;
    doc["beta"] = beta;
    doc["coherent_error"] = res.coherent_error;
    doc["leakage"] = res.leakage;
    doc["phases"] = {res.phase1, res.phase2};
    return doc;
}

std::vector<std::string> run_cz_gate(const CircuitConfig& config, const RunOptions& run) {
    double beta = 0.0;
    const Waveform wf = gate_waveform(config.circuit, run, &beta);
    const GateResult res = coherent_error(propagate_unitary(config.circuit, wf, prop_opts(run)));
    write_json(run.out_dir + "/cz_gate.json", gate_result_json(run, beta, res));
    write_waveform_csv(wf, run.out_dir + "/waveform.csv");
    return {"cz_gate.json", "waveform.csv"};
}

std::vector<std::string> run_asymmetry_scan(const CircuitConfig& config, const RunOptions& run) {
    std::vector<std::string> outputs;
    CsvWriter csv(run.out_dir + "/asymmetry_scan.csv",
                  {"asymmetry", "phi_off", "beta", "coherent_error", "leakage"});
    for (double asym : run.asymmetries) {
        const CircuitParams p = config.circuit.with_coupler_asymmetry(asym);
        const double phi_off = find_phi_off(p, run.bracket_lo, run.bracket_hi, solve_opts(run));
        const CalibrationResult cal =
            calibrate_beta(p, run.t_gate, pulse_config(run, phi_off), prop_opts(run));
        const GateResult res = coherent_error(propagate_unitary(p, cal.waveform, prop_opts(run)));
        csv.row({asym, phi_off, cal.beta, res.coherent_error, res.leakage});
    }
    outputs.push_back("asymmetry_scan.csv");

    if (run.with_map) {
        CsvWriter map(run.out_dir + "/asymmetry_zz_map.csv", {"asymmetry", "flux", "zeta_GHz"});
        for (double asym : run.asymmetries) {
            const CircuitParams p = config.circuit.with_coupler_asymmetry(asym);
            const std::vector<SweepRow> rows = sweep_flux(
                p, linspace(run.sweep_start, run.sweep_stop, run.sweep_points), 0,
                solve_opts(run), run.threads);
            for (const auto& row : rows) map.row({asym, row.phi, row.zeta});
        }
        outputs.push_back("asymmetry_zz_map.csv");
    }
    return outputs;
}

std::vector<std::string> run_noise_dephasing(const CircuitConfig& config, const RunOptions& run) {
    const std::vector<DephasingRow> rows = asymmetry_dephasing_sweep(
        config.circuit, run.delta_ejc, stated_noise(), solve_opts(run), run.threads);
    CsvWriter csv(run.out_dir + "/noise_dephasing.csv",
                  {"delta_ejc_GHz", "phi_off", "t_echo_10_us", "t_echo_01_us"});
    for (const auto& row : rows)
        csv.row({row.delta_ejc, row.phi_off, row.t_10.t_echo_us, row.t_01.t_echo_us});
    return {"noise_dephasing.csv"};
}

std::vector<std::string> run_tradeoff(const CircuitConfig& config, const RunOptions& run) {
    const std::vector<TradeoffRow> rows = coupler_energy_tradeoff(
        config.circuit, run.sum_ejc, stated_noise(), solve_opts(run), run.threads);
    CsvWriter csv(run.out_dir + "/tradeoff.csv",
                  {"sum_ejc_GHz", "phi_off", "zeta_on_GHz", "min_t_gate_ns", "t_echo_10_us",
                   "t_echo_01_us"});
    for (const auto& row : rows)
        csv.row({row.sum_ejc, row.phi_off, row.zeta_on, row.min_t_gate, row.t_10.t_echo_us,
                 row.t_01.t_echo_us});
    return {"tradeoff.csv"};
}

std::vector<std::string> run_offset_map(const CircuitConfig& config, const RunOptions& run) {
    const Waveform wf = gate_waveform(config.circuit, run);
    const std::vector<double> grid =
        linspace(-run.offset_span, run.offset_span, run.offset_points);
    const Eigen::MatrixXd map =
        offset_error_map(config.circuit, wf, grid, grid, prop_opts(run), run.threads);
    CsvWriter csv(run.out_dir + "/offset_map.csv",
                  {"d_inner", "d_outer", "coherent_error"});
    for (int i = 0; i < map.rows(); ++i)
        for (int j = 0; j < map.cols(); ++j) csv.row({grid[i], grid[j], map(i, j)});
    return {"offset_map.csv"};
}

std::vector<std::string> run_chain_crosstalk(const CircuitConfig& config, const RunOptions& run) {
    if (!config.chain) throw parameter_error("chain-crosstalk requires a 'chain' config section");
    const ChainParams base = *config.chain;
    const double sum12 = base.sum_ejc12();
    const double sum23 = base.sum_ejc23();
    const double cc12 = base.cc12_1 + base.cc12_2;
    const double cc23 = base.cc23_1 + base.cc23_2;

    CsvWriter csv(run.out_dir + "/chain_crosstalk.csv",
                  {"asymmetry", "delta_ejc_GHz", "phi12_off", "phi23_off",
                   "zeta13_numeric_GHz", "zeta13_pert_GHz"});
    for (double asym : run.asymmetries) {
        ChainParams chain = base;
        chain.ejc12_1 = 0.5 * sum12 * (1.0 + asym);
        chain.ejc12_2 = 0.5 * sum12 * (1.0 - asym);
        chain.cc12_1 = 0.5 * cc12 * (1.0 + asym);
        chain.cc12_2 = 0.5 * cc12 * (1.0 - asym);
        chain.ejc23_1 = 0.5 * sum23 * (1.0 + asym);
        chain.ejc23_2 = 0.5 * sum23 * (1.0 - asym);
        chain.cc23_1 = 0.5 * cc23 * (1.0 + asym);
        chain.cc23_2 = 0.5 * cc23 * (1.0 - asym);
        const ChainIdleResult idle =
            idle_chain_biases(chain, 0.35, 0.75, solve_opts(run));
        const double pert = zeta13_pert(chain, idle.phi12, idle.phi23);
        csv.row({asym, asym * sum12, idle.phi12, idle.phi23, idle.zeta13, pert});
    }
    return {"chain_crosstalk.csv"};
}

std::vector<std::string> run_spectator(const CircuitConfig& config, const RunOptions& run) {
    if (!config.spectator)
        throw parameter_error("spectator requires a 'spectator' config section");
    const SpectatorParams base = *config.spectator;

    // spectator frequency is tuned through its Josephson energy
    const double cc = base.base.cc();
    const double cp = base.c_para * 1e-3;
    Eigen::MatrixXd cap(3, 3);
    cap << base.base.c1 + cc, -cc, 0.0,
           -cc, base.base.c2 + cc + cp, -cp,
           0.0, -cp, base.cs + cp;
    const double ec_s = invert_capacitance_matrix(cap).ec[2];
    auto ejs_for = [&](double omega_target) {
        double lo = 1.0, hi = 80.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (transmon_frequency(mid, ec_s, run.ncut) < omega_target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };

    SolveOptions so = solve_opts(run);
    CsvWriter csv(run.out_dir + "/spectator_frequency.csv",
                  {"omega_s_GHz", "ejs_GHz", "zeta_1s_GHz", "zeta_2s_GHz", "zeta_1s_pert_GHz"});
    const std::vector<double> omegas =
        linspace(run.spectator_wlo, run.spectator_whi, run.spectator_points);
    std::vector<std::array<double, 5>> rows(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        SpectatorParams sp = base;
        sp.ejs = ejs_for(omegas[i]);
        double z1s = std::nan(""), z2s = std::nan(""), z1s_pert = std::nan("");
        try {
            const Spectrum s =
                solve_spectrum(compile_spectator(sp, FluxBias::operating(run.phi)), so);
            z1s = zz_rate(s, 0, 2);
            z2s = zz_rate(s, 1, 2);
        } catch (const physics_error&) {
            // resonance or ambiguous labels at this detuning: leave the gap
        }
        try {
            z1s_pert = zeta_spectator(sp, run.phi).zeta_1s;
        } catch (const physics_error&) {
        }
        rows[i] = {omegas[i], sp.ejs, z1s, z2s, z1s_pert};
    }
    for (const auto& r : rows) csv.row({r[0], r[1], r[2], r[3], r[4]});

    CsvWriter cpara_csv(run.out_dir + "/spectator_cpara.csv",
                        {"c_para_aF", "zeta_1s_GHz", "zeta_2s_GHz"});
    for (double cpara : run.cpara_aF) {
        SpectatorParams sp = base;
        sp.c_para = cpara;
        const Spectrum s =
            solve_spectrum(compile_spectator(sp, FluxBias::operating(run.phi)), so);
        cpara_csv.row({cpara, zz_rate(s, 0, 2), zz_rate(s, 1, 2)});
    }
    return {"spectator_frequency.csv", "spectator_cpara.csv"};
}

std::vector<std::string> run_t1_sweep(const CircuitConfig& config, const RunOptions& run) {
    const Waveform wf = gate_waveform(config.circuit, run);
    std::vector<double> t1_ns;
    for (double ms : run.t1_ms) t1_ns.push_back(ms * 1e6);
    LindbladOptions lopts;
    lopts.ncut = run.ncut;
    lopts.n_levels = run.n_levels > 0 ? run.n_levels : 28;
    lopts.dt = run.dt;
    std::vector<double> infidelities;
    const LinearFit fit = t1_sweep_fit(config.circuit, wf, t1_ns, lopts, &infidelities);

    CsvWriter csv(run.out_dir + "/t1_sweep.csv", {"t1_ms", "tg_over_t1", "infidelity"});
    for (std::size_t i = 0; i < t1_ns.size(); ++i)
        csv.row({run.t1_ms[i], wf.duration() / t1_ns[i], infidelities[i]});
    ordered_json doc;
    doc["a"] = fit.a;
    doc["b"] = fit.b;
    doc["max_rel_residual"] = fit.max_rel_residual;
    write_json(run.out_dir + "/t1_fit.json", doc);
    return {"t1_sweep.csv", "t1_fit.json"};
}

std::vector<std::string> run_pert_vs_numeric(const CircuitConfig& config, const RunOptions& run) {
    const CircuitParams p = config.circuit;
    const DerivedEnergies en = derive_energies(p);
    const TransmonPert p1 = solve_zpf(p.ej1, en.ec1, run.ncut);
    const TransmonPert p2 = solve_zpf(p.ej2, en.ec2, run.ncut);
    const std::vector<double> grid =
        linspace(run.sweep_start, run.sweep_stop, run.sweep_points);
    const std::vector<SweepRow> rows = sweep_flux(p, grid, 0, solve_opts(run), run.threads);

    CsvWriter csv(run.out_dir + "/pert_vs_numeric.csv",
                  {"flux", "zeta_numeric_GHz", "zeta_pert_GHz", "zeta1_GHz",
                   "zeta1_exact_GHz", "zeta2c_GHz", "zeta2odd_GHz"});
    for (const auto& row : rows) {
        const double z1 = zeta1(p, p1, p2, row.phi);
        const double z1x = zeta1_exact(p, row.phi, run.ncut);
        const double z2c = zeta2_conserving(g_eff(p, p1, p2, row.phi), p1, p2);
        const double z2o = zeta2_odd(p, p1, p2, row.phi);
        csv.row({row.phi, row.zeta, z1x + z2c + z2o, z1, z1x, z2c, z2o});
    }
    return {"pert_vs_numeric.csv"};
}

std::vector<std::string> run_truncation_scan(const CircuitConfig& config, const RunOptions& run) {
    const Waveform wf = gate_waveform(config.circuit, run);
    CsvWriter csv(run.out_dir + "/truncation_scan.csv", {"n_levels", "coherent_error"});
    for (int levels : run.trunc_levels) {
        PropagateOptions opts = prop_opts(run);
        opts.n_levels = levels;
        const GateResult res = coherent_error(propagate_unitary(config.circuit, wf, opts));
        csv.row({static_cast<double>(levels), res.coherent_error});
    }
    return {"truncation_scan.csv"};
}

std::vector<std::string> run_straddling(const CircuitConfig& config, const RunOptions& run) {
    RunOptions local = run;
    local.bracket_lo = 0.05;
    local.bracket_hi = 0.48;
    const double phi_off =
        find_phi_off(config.circuit, local.bracket_lo, local.bracket_hi, solve_opts(local));
    const CalibrationResult cal =
        calibrate_beta(config.circuit, local.t_gate, pulse_config(local, phi_off),
                       prop_opts(local));
    const GateResult res =
        coherent_error(propagate_unitary(config.circuit, cal.waveform, prop_opts(local)));
    ordered_json doc = gate_result_json(local, cal.beta, res);
    doc["phi_off"] = phi_off;
    write_json(run.out_dir + "/straddling.json", doc);

    const std::vector<SweepRow> rows = sweep_flux(
        config.circuit, linspace(0.0, 0.48, 49), run.n_eigs, solve_opts(run), run.threads);
    std::vector<std::string> header{"flux", "zeta_GHz", "hybridization"};
    for (int k = 0; k < run.n_eigs; ++k) header.push_back("eig_" + std::to_string(k));
    CsvWriter csv(run.out_dir + "/straddling_sweep.csv", header);
    for (const auto& row : rows) {
        std::vector<double> values{row.phi, row.zeta, row.hybridization};
        for (int k = 0; k < run.n_eigs; ++k)
            values.push_back(k < static_cast<int>(row.eigs.size()) ? row.eigs[k]
                                                                   : std::nan(""));
        csv.row(values);
    }
    return {"straddling.json", "straddling_sweep.csv"};
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names{
        "zz-sweep",       "spectrum",  "find-off",        "cz-gate",
        "asymmetry-scan", "noise-dephasing", "tradeoff",  "offset-map",
        "chain-crosstalk", "spectator", "t1-sweep",       "pert-vs-numeric",
        "truncation-scan", "straddling"};
    return names;
}

std::vector<std::string> run_experiment(const std::string& name, const RunOptions& opts) {
    const CircuitConfig config = load_circuit_config(opts.config_path);
    if (name == "zz-sweep") return run_zz_sweep(config, opts);
    if (name == "spectrum") return run_spectrum(config, opts);
    if (name == "find-off") return run_find_off(config, opts);
    if (name == "cz-gate") return run_cz_gate(config, opts);
    if (name == "asymmetry-scan") return run_asymmetry_scan(config, opts);
    if (name == "noise-dephasing") return run_noise_dephasing(config, opts);
    if (name == "tradeoff") return run_tradeoff(config, opts);
    if (name == "offset-map") return run_offset_map(config, opts);
    if (name == "chain-crosstalk") return run_chain_crosstalk(config, opts);
    if (name == "spectator") return run_spectator(config, opts);
    if (name == "t1-sweep") return run_t1_sweep(config, opts);
    if (name == "pert-vs-numeric") return run_pert_vs_numeric(config, opts);
    if (name == "truncation-scan") return run_truncation_scan(config, opts);
    if (name == "straddling") return run_straddling(config, opts);
    throw parameter_error("unknown experiment: " + name);
}

} // namespace sqc::cli
