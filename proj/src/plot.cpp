#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "gvlab/experiments.hpp"

namespace gvlab {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool copy_tidy(const fs::path& dir, const std::string& src, const std::string& dst) {
    if (!fs::exists(dir / src)) return false;
    std::ifstream in(dir / src);
    std::ofstream out(dir / dst);
    out << in.rdbuf();
    return true;
}

} // namespace

void emit_plot_data(const std::string& artifact_dir) {
    fs::path dir(artifact_dir);
    if (!fs::exists(dir)) throw std::invalid_argument("emit_plot_data: no such directory");

    json manifest = json::array();
    auto add = [&](const std::string& file, const std::string& x, const std::string& y,
                   bool logx, bool logy, const std::string& series) {
        json e;
        e["file"] = file;
        e["x"] = x;
        e["y"] = y;
        e["logx"] = logx;
        e["logy"] = logy;
        if (!series.empty()) e["series"] = series;
        manifest.push_back(e);
    };

    if (copy_tidy(dir, "semigroup_gap.csv", "plot_semigroup_gap.csv"))
        add("plot_semigroup_gap.csv", "eps", "gap", true, true, "t");
    if (copy_tidy(dir, "dual_evolved_gap.csv", "plot_dual_evolved_gap.csv"))
        add("plot_dual_evolved_gap.csv", "eps", "gap", true, true, "t");
    if (copy_tidy(dir, "dual_one_step.csv", "plot_dual_one_step.csv"))
        add("plot_dual_one_step.csv", "eps", "ratio", true, false, "delta");
    if (copy_tidy(dir, "chaos_distance.csv", "plot_chaos_distance.csv"))
        add("plot_chaos_distance.csv", "n_steps", "distance", true, true, "eps");
    if (copy_tidy(dir, "scaling_gap.csv", "plot_scaling_gap.csv"))
        add("plot_scaling_gap.csv", "eps", "sup_gap", true, true, "");
    if (copy_tidy(dir, "generator_residual.csv", "plot_generator_residual.csv"))
        add("plot_generator_residual.csv", "delta", "ratio_to_bound", true, false, "which");
    if (copy_tidy(dir, "contraction.csv", "plot_contraction.csv"))
        add("plot_contraction.csv", "delta", "max_ratio", true, false, "op");
    if (copy_tidy(dir, "trajectory.csv", "plot_trajectory.csv"))
        add("plot_trajectory.csv", "x", "rho", false, false, "t");
    if (copy_tidy(dir, "km_density.csv", "plot_km_density.csv"))
        add("plot_km_density.csv", "x", "rho", false, false, "");
    if (copy_tidy(dir, "density_estimate.csv", "plot_density_estimate.csv"))
        add("plot_density_estimate.csv", "x", "density", false, false, "eps");
    if (copy_tidy(dir, "lp_calculus.csv", "plot_lp_calculus.csv"))
        add("plot_lp_calculus.csv", "param", "error", false, true, "check");
    if (copy_tidy(dir, "scaled_exponent.csv", "plot_scaled_exponent.csv"))
        add("plot_scaled_exponent.csv", "eps", "distance", true, true, "");

    if (manifest.empty())
        throw std::runtime_error("emit_plot_data: no known artifacts in " + artifact_dir);
    std::ofstream(dir / "plot_manifest.json") << manifest.dump(2) << "\n";
}

} // namespace gvlab
