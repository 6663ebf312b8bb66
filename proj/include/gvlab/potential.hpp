#pragma once

#include <string>
#include <vector>

#include "gvlab/configuration.hpp"
#include "gvlab/grid.hpp"

namespace gvlab {

enum class PotentialFamily { gaussian, top_hat, exp_decay, tabulated };

PotentialFamily potential_family_from_string(const std::string& s);
std::string to_string(PotentialFamily f);

/// Nonnegative even interaction kernel on the periodic box, zero beyond
/// cutoff_radius. With cutoff_radius < L/2 the periodization reduces to a
/// single image, so evaluation is the kernel at the torus distance.
struct Potential {
    PotentialFamily family = PotentialFamily::gaussian;
    double amplitude = 1.0;
    double width = 0.5;
    double cutoff_radius = 2.0;
    double box_length = 10.0;
    /// For tabulated kernels: values on a uniform grid over [0, cutoff_radius],
    /// linearly interpolated; table.front() is the value at 0.
    std::vector<double> table;

    void validate() const;
};

/// Derived constants every bound depends on: beta = integral of the kernel,
/// c_phi = integral of 1 - e^{-kernel}, phi_bar = sup of the periodized kernel.
struct PotentialConstants {
    double beta = 0.0;
    double c_phi = 0.0;
    double phi_bar = 0.0;
};

/// Periodized kernel value at displacement x (any real; reduced to the torus).
double eval_potential(const Potential& p, double x);

/// Grid quadrature of the derived constants (rectangle rule, M nodes).
PotentialConstants compute_constants(const Potential& p, int grid_points);

/// E(x, gamma) = sum over points y of the kernel at x - y.
double relative_energy(const Potential& p, double x, const Configuration& gamma);

} // namespace gvlab
