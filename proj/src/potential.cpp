#include "gvlab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvlab {

PotentialFamily potential_family_from_string(const std::string& s) {
    if (s == "gaussian") return PotentialFamily::gaussian;
    if (s == "top_hat") return PotentialFamily::top_hat;
    if (s == "exp_decay") return PotentialFamily::exp_decay;
    if (s == "tabulated") return PotentialFamily::tabulated;
    throw std::invalid_argument("unknown potential family: " + s);
}

std::string to_string(PotentialFamily f) {
    switch (f) {
        case PotentialFamily::gaussian: return "gaussian";
        case PotentialFamily::top_hat: return "top_hat";
        case PotentialFamily::exp_decay: return "exp_decay";
        case PotentialFamily::tabulated: return "tabulated";
    }
    return "?";
}

void Potential::validate() const {
    if (amplitude < 0.0) throw std::invalid_argument("Potential: amplitude must be >= 0");
    if (!(width > 0.0)) throw std::invalid_argument("Potential: width must be positive");
    if (!(cutoff_radius > 0.0)) throw std::invalid_argument("Potential: cutoff_radius must be positive");
    if (!(box_length > 0.0)) throw std::invalid_argument("Potential: box_length must be positive");
    if (!(cutoff_radius < 0.5 * box_length))
        throw std::invalid_argument("Potential: cutoff_radius must be < box_length / 2");
    if (family == PotentialFamily::tabulated && table.size() < 2)
        throw std::invalid_argument("Potential: tabulated kernel needs >= 2 samples");
    if (family == PotentialFamily::tabulated)
        for (double v : table)
            if (v < 0.0) throw std::invalid_argument("Potential: tabulated values must be >= 0");
    if (family == PotentialFamily::top_hat && width > cutoff_radius)
        throw std::invalid_argument("Potential: top_hat width must be <= cutoff_radius");
}

namespace {

double kernel_at_distance(const Potential& p, double r) {
    if (r >= p.cutoff_radius) return 0.0;
    switch (p.family) {
        case PotentialFamily::gaussian:
            return p.amplitude * std::exp(-0.5 * r * r / (p.width * p.width));
        case PotentialFamily::top_hat:
            return r <= p.width ? p.amplitude : 0.0;
        case PotentialFamily::exp_decay:
            return p.amplitude * std::exp(-r / p.width);
        case PotentialFamily::tabulated: {
            double s = r / p.cutoff_radius * (p.table.size() - 1);
            auto i = static_cast<std::size_t>(s);
            if (i + 1 >= p.table.size()) return p.table.back();
            double t = s - i;
            return p.table[i] + t * (p.table[i + 1] - p.table[i]);
        }
    }
    return 0.0;
}

} // namespace

double eval_potential(const Potential& p, double x) {
    return kernel_at_distance(p, torus_distance(x, 0.0, p.box_length));
}

PotentialConstants compute_constants(const Potential& p, int grid_points) {
    p.validate();
    GridSpec grid{grid_points, p.box_length};
    grid.validate();
    double h = grid.step();
    PotentialConstants out;
    double grid_sup = 0.0;
    for (int i = 0; i < grid.points; ++i) {
        double v = eval_potential(p, grid.node(i));
        out.beta += v;
        out.c_phi += 1.0 - std::exp(-v);
        grid_sup = std::max(grid_sup, v);
    }
    out.beta *= h;
    out.c_phi *= h;
    // grid sup plus the known analytic maximum (all built-in families peak at 0).
    double analytic_max = p.family == PotentialFamily::tabulated
                              ? *std::max_element(p.table.begin(), p.table.end())
                              : p.amplitude;
    out.phi_bar = std::max(grid_sup, analytic_max);
    return out;
}

double relative_energy(const Potential& p, double x, const Configuration& gamma) {
    double e = 0.0;
    for (double y : gamma.points()) e += kernel_at_distance(p, torus_distance(x, y, p.box_length));
    return e;
}

} // namespace gvlab
