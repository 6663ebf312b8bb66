#pragma once

#include <string>
#include <vector>

#include "gvlab/glauber.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"
#include "gvlab/vlasov.hpp"

namespace gvlab {

struct DomainConfig {
    int dimension = 1;
    double box_length = 10.0;
    int grid_points = 64;
};

struct TruncationConfig {
    int n_max = 3;
    int omega_max = 2;
    int xi_max = 2;
};

struct SimulationConfig {
    int n_replicas = 2000;
    double t_end = 2.0;
    double dt_record = 0.1;
    std::uint64_t seed = 12345;
    int population_cap = 200000;
};

struct SweepConfig {
    std::vector<double> eps;
    std::vector<double> delta;
    std::vector<double> t;
};

/// Fully-resolved experiment description. Built by validate_config, which
/// fills defaults, resolves "auto" regime fields from the potential's
/// computed constants, raises hard errors on structural violations and
/// collects warnings for failed smallness predicates.
struct ExperimentConfig {
    std::string name = "default";
    std::string experiment = "kirkwood_monroe";
    DomainConfig domain;
    Potential potential;
    PotentialConstants constants;
    ScalingRegime regime;
    TruncationConfig truncation;
    SolverSettings solver;
    SimulationConfig simulation;
    SweepConfig sweeps;
    std::vector<std::string> warnings;

    GridSpec grid() const { return GridSpec{domain.grid_points, domain.box_length}; }
};

extern const std::vector<std::string> kExperimentNames;

/// Parse + validate a config document (JSON text).
ExperimentConfig validate_config(const std::string& json_text);
ExperimentConfig validate_config_file(const std::string& path);

/// One checked bound, echoed to bound_report.csv and summary.json.
struct BoundRecord {
    std::string experiment;
    double delta = 0.0;
    double eps = 0.0;
    double t = 0.0;
    std::string norm_name;
    double measured = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    std::string reference; // stable internal tag for the asserted inequality
};

struct ExperimentResult {
    std::vector<BoundRecord> bounds;
    std::vector<std::string> artifacts;
    bool all_pass = true;
};

/// Run the named experiment, writing CSV artifacts, bound_report.csv,
/// summary.json and provenance.json into out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

/// Derive tidy plot files plus a manifest from a completed artifact
/// directory; throws if nothing usable is found.
void emit_plot_data(const std::string& artifact_dir);

} // namespace gvlab
