#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "gvlab/experiments.hpp"
#include "gvlab/parallel.hpp"
#include "gvlab/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"gvlab: birth-and-death dynamics, mean-field scaling and the limiting kinetic equation at desk scale"};
    app.set_version_flag("--version", gvlab::kVersion);
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    int threads = 2;
    std::uint64_t seed = 0;
    bool seed_set = false;

    auto* run = app.add_subcommand("run", "run the experiment described by a config");
    run->add_option("config", config_path, "config JSON file")->required();
    run->add_option("--out", out_dir, "artifact directory");
    run->add_option("--threads", threads, "worker threads (1 = fully serial)");
    run->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_set = true;
    });

    auto* validate = app.add_subcommand("validate", "parse and validate a config");
    validate->add_option("config", config_path, "config JSON file")->required();

    auto* plot = app.add_subcommand("plot", "derive plot-ready files from an artifact directory");
    plot->add_option("dir", out_dir, "artifact directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot->parsed()) {
            gvlab::emit_plot_data(out_dir);
            std::cout << "plot data written to " << out_dir << "\n";
            return 0;
        }
        gvlab::ExperimentConfig cfg = gvlab::validate_config_file(config_path);
        for (const auto& warning : cfg.warnings)
            std::cerr << "warning: " << warning << "\n";
        if (validate->parsed()) {
            std::cout << "config ok: experiment=" << cfg.experiment
                      << " z=" << cfg.regime.z << " c=" << cfg.regime.c
                      << " alpha=" << cfg.regime.alpha << " beta=" << cfg.regime.beta << "\n";
            return 0;
        }
        gvlab::set_max_threads(threads);
        if (seed_set) cfg.simulation.seed = seed;
        gvlab::ExperimentResult res = gvlab::run_experiment(cfg, out_dir);
        int failed = 0;
        for (const auto& b : res.bounds) {
            if (!b.pass) ++failed;
            std::cout << (b.pass ? "[pass] " : "[FAIL] ") << b.norm_name
                      << " measured=" << b.measured << " bound=" << b.bound
                      << " tol=" << b.tolerance << "\n";
        }
        std::cout << (res.all_pass ? "all bounds pass" : "some bounds FAILED") << " ("
                  << res.bounds.size() - failed << "/" << res.bounds.size() << ")\n";
        return res.all_pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
