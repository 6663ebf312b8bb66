#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gvlab/experiments.hpp"

namespace gvlab {

using nlohmann::json;

const std::vector<std::string> kExperimentNames = {
    "vlasov_solve",       "kirkwood_monroe",   "operator_bounds",
    "semigroup_convergence", "dual_convergence", "chaos_preservation",
    "scaling_limit",      "lp_calculus_suite"};

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (j.contains(key)) return j.at(key).get<T>();
    return fallback;
}

double get_auto_or(const json& j, const char* key, double auto_value, bool& was_auto) {
    was_auto = true;
    if (!j.contains(key)) return auto_value;
    const auto& v = j.at(key);
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return auto_value;
        throw std::invalid_argument(std::string("config: ") + key + " must be a number or \"auto\"");
    }
    was_auto = false;
    return v.get<double>();
}

} // namespace

ExperimentConfig validate_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    cfg.name = get_or<std::string>(doc, "name", "default");
    cfg.experiment = get_or<std::string>(doc, "experiment", "kirkwood_monroe");
    bool known = false;
    for (const auto& n : kExperimentNames) known = known || n == cfg.experiment;
    if (!known) throw std::invalid_argument("config: unknown experiment: " + cfg.experiment);

    if (doc.contains("domain")) {
        const auto& d = doc.at("domain");
        cfg.domain.dimension = get_or<int>(d, "dimension", 1);
        cfg.domain.box_length = get_or<double>(d, "box_length", 10.0);
        cfg.domain.grid_points = get_or<int>(d, "grid_points", 64);
    }
    if (cfg.domain.dimension != 1)
        throw std::invalid_argument("config: only dimension = 1 is supported");
    if (!(cfg.domain.box_length > 0.0) || cfg.domain.grid_points < 2)
        throw std::invalid_argument("config: invalid domain");

    cfg.potential.box_length = cfg.domain.box_length;
    if (doc.contains("potential")) {
        const auto& p = doc.at("potential");
        cfg.potential.family =
            potential_family_from_string(get_or<std::string>(p, "family", "gaussian"));
        cfg.potential.amplitude = get_or<double>(p, "amplitude", 1.0);
        cfg.potential.width = get_or<double>(p, "width", 0.5);
        cfg.potential.cutoff_radius = get_or<double>(p, "cutoff_radius", 2.0);
        if (p.contains("table")) cfg.potential.table = p.at("table").get<std::vector<double>>();
    }
    if (!(cfg.potential.cutoff_radius < 0.5 * cfg.domain.box_length))
        throw std::invalid_argument("config: cutoff_radius must be < box_length / 2");
    cfg.potential.validate();
    cfg.constants = compute_constants(cfg.potential, cfg.domain.grid_points);

    const json reg = doc.contains("regime") ? doc.at("regime") : json::object();
    cfg.regime.c = get_or<double>(reg, "c", 1.2);
    if (!(cfg.regime.c > 1.0)) throw std::invalid_argument("config: regime.c must be > 1");
    cfg.regime.beta = cfg.constants.beta;
    bool z_auto = false, a_auto = false;
    cfg.regime.z = get_auto_or(reg, "z", activity_with_margin(cfg.regime.beta, cfg.regime.c),
                               z_auto);
    auto a1 = alpha_threshold(cfg.regime.z, cfg.regime.beta, cfg.regime.c);
    cfg.regime.alpha = get_auto_or(reg, "alpha", a1 ? 0.5 * (1.0 + *a1) : 0.95, a_auto);
    cfg.regime.eps = get_or<double>(reg, "eps", 0.1);
    cfg.regime.delta = get_or<double>(reg, "delta", 0.1);
    cfg.regime.validate_structure();
    if (!a_auto) {
        if (!a1)
            cfg.warnings.push_back("alpha threshold undefined (z beta > 1/e): alpha_ok=false");
        else if (!(cfg.regime.alpha > *a1 && cfg.regime.alpha < 1.0))
            throw std::invalid_argument("config: alpha outside (alpha1, 1)");
    }

    if (!cfg.regime.smallz_ok()) cfg.warnings.push_back("smallz_ok=false: z e^{beta c} > c");
    if (!cfg.regime.verysmallz_ok()) cfg.warnings.push_back("verysmallz_ok=false");
    if (!cfg.regime.alpha_ok()) cfg.warnings.push_back("alpha_ok=false");
    if (!cfg.regime.zbeta_ok())
        cfg.warnings.push_back("z beta > 1/e: fixed-point contraction not guaranteed");

    if (doc.contains("truncation")) {
        const auto& t = doc.at("truncation");
        cfg.truncation.n_max = get_or<int>(t, "n_max", 3);
        cfg.truncation.omega_max = get_or<int>(t, "omega_max", 2);
        cfg.truncation.xi_max = get_or<int>(t, "xi_max", 2);
    }
    if (cfg.truncation.n_max < 0 || cfg.truncation.n_max > 3)
        throw std::invalid_argument("config: n_max must be in [0,3] for operator experiments");
    if (cfg.truncation.omega_max < 0 || cfg.truncation.omega_max > 3 ||
        cfg.truncation.xi_max < 0 || cfg.truncation.xi_max > 2)
        throw std::invalid_argument("config: truncation orders out of supported range");

    if (doc.contains("solver")) {
        const auto& s = doc.at("solver");
        std::string method = get_or<std::string>(s, "method", "rk4");
        if (method == "rk4") cfg.solver.method = SolverMethod::rk4;
        else if (method == "picard") cfg.solver.method = SolverMethod::picard;
        else throw std::invalid_argument("config: solver.method must be rk4 or picard");
        cfg.solver.dt = get_or<double>(s, "dt", 1e-3);
        cfg.solver.picard_tol = get_or<double>(s, "picard_tol", 1e-12);
        cfg.solver.picard_max_iter = get_or<int>(s, "picard_max_iter", 60);
        cfg.solver.t_window = get_or<double>(s, "t_window", 1.0);
    }
    cfg.solver.validate();

    if (doc.contains("simulation")) {
        const auto& s = doc.at("simulation");
        cfg.simulation.n_replicas = get_or<int>(s, "n_replicas", 2000);
        cfg.simulation.t_end = get_or<double>(s, "t_end", 2.0);
        cfg.simulation.dt_record = get_or<double>(s, "dt_record", 0.1);
        cfg.simulation.seed = get_or<std::uint64_t>(s, "seed", 12345);
        cfg.simulation.population_cap = get_or<int>(s, "population_cap", 200000);
    }
    if (cfg.simulation.n_replicas < 2 || !(cfg.simulation.dt_record > 0.0) ||
        cfg.simulation.t_end < 0.0)
        throw std::invalid_argument("config: invalid simulation block");

    if (doc.contains("sweeps")) {
        const auto& s = doc.at("sweeps");
        if (s.contains("eps")) cfg.sweeps.eps = s.at("eps").get<std::vector<double>>();
        if (s.contains("delta")) cfg.sweeps.delta = s.at("delta").get<std::vector<double>>();
        if (s.contains("t")) cfg.sweeps.t = s.at("t").get<std::vector<double>>();
    }
    for (double d : cfg.sweeps.delta)
        if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("config: sweep delta out of (0,1)");
    for (double e : cfg.sweeps.eps)
        if (!(e > 0.0)) throw std::invalid_argument("config: sweep eps must be positive");

    return cfg;
}

ExperimentConfig validate_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return validate_config(ss.str());
}

} // namespace gvlab
