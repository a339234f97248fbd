#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "experiments.hpp"
#include "sqc/errors.hpp"

namespace {

void write_manifest(const std::string& name, const sqc::cli::RunOptions& opts,
                    const std::vector<std::string>& outputs, double wall_s) {
    nlohmann::ordered_json doc;
    doc["tool"] = "sqc";
    doc["version"] = SQC_VERSION;
    doc["experiment"] = name;
    doc["config"] = opts.config_path;
    doc["threads"] = opts.threads;
    doc["ncut"] = opts.ncut;
    doc["n_levels"] = opts.n_levels;
    doc["dt_ns"] = opts.dt;
    doc["t_gate_ns"] = opts.t_gate;
    doc["outputs"] = outputs;
    doc["wall_time_s"] = wall_s;
    std::ofstream out(opts.out_dir + "/manifest.json");
    out << doc.dump(2) << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flux-tunable coupler simulation toolkit"};
    app.require_subcommand(1);

    sqc::cli::RunOptions opts;
    std::string experiment;

    for (const std::string& name : sqc::cli::experiment_names()) {
        CLI::App* sub = app.add_subcommand(name, "run the " + name + " experiment");
        sub->add_option("--config", opts.config_path, "circuit configuration file")
            ->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--threads", opts.threads, "worker threads (0: hardware)");
        sub->add_option("--dt", opts.dt, "propagation step, ns");
        sub->add_option("--ncut", opts.ncut, "charge basis cutoff");
        sub->add_option("--nlevels", opts.n_levels, "retained eigenstates (0: defaults)");
        sub->add_option("--tg", opts.t_gate, "gate duration, ns");
        sub->add_option("--sigma", opts.sigma, "filter width, ns");
        sub->add_option("--window-shape", opts.window_shape, "Kaiser shape parameter");
        sub->add_option("--waveform", opts.waveform_path, "pre-computed waveform CSV");
        sub->add_option("--start", opts.sweep_start, "sweep start flux, Phi0");
        sub->add_option("--stop", opts.sweep_stop, "sweep stop flux, Phi0");
        sub->add_option("--points", opts.sweep_points, "sweep point count");
        sub->add_option("--eigs", opts.n_eigs, "eigenfrequency columns");
        sub->add_option("--phi", opts.phi, "evaluation flux, Phi0");
        sub->add_option("--lo", opts.bracket_lo, "search bracket lower end, Phi0");
        sub->add_option("--hi", opts.bracket_hi, "search bracket upper end, Phi0");
        sub->add_option("--asym", opts.asymmetries, "asymmetry grid dEJC/sumEJC");
        sub->add_option("--delta-ejc", opts.delta_ejc, "junction asymmetry grid, GHz");
        sub->add_option("--sum-ejc", opts.sum_ejc, "total coupler energy grid, GHz");
        sub->add_option("--t1", opts.t1_ms, "relaxation time grid, ms");
        sub->add_option("--levels", opts.trunc_levels, "truncation scan levels");
        sub->add_option("--span", opts.offset_span, "offset map half-span, Phi0");
        sub->add_option("--offset-points", opts.offset_points, "offset map points per axis");
        sub->add_option("--wlo", opts.spectator_wlo, "spectator sweep start, GHz");
        sub->add_option("--whi", opts.spectator_whi, "spectator sweep stop, GHz");
        sub->add_option("--wpoints", opts.spectator_points, "spectator sweep points");
        sub->add_option("--cpara", opts.cpara_aF, "parasitic capacitance grid, aF");
        sub->add_flag("--map", opts.with_map, "also emit the 2D flux-asymmetry map");
        sub->callback([&, name] { experiment = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        std::filesystem::create_directories(opts.out_dir);
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<std::string> outputs = sqc::cli::run_experiment(experiment, opts);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(experiment, opts, outputs, wall);
        for (const std::string& f : outputs) std::cout << opts.out_dir << "/" << f << "\n";
        return 0;
    } catch (const sqc::parameter_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const sqc::physics_error& e) {
        std::cerr << "physics error: " << e.what() << "\n";
        return 2;
    } catch (const sqc::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
