#pragma once

// Shared fixtures: the default desk-scale setup used across the suite.

#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"

namespace fixture {

inline gvlab::Potential potential(double box = 10.0, double amplitude = 1.0) {
    gvlab::Potential p;
    p.family = gvlab::PotentialFamily::gaussian;
    p.amplitude = amplitude;
    p.width = 0.5;
    p.cutoff_radius = 2.0;
    p.box_length = box;
    return p;
}

inline gvlab::ScalingRegime regime(const gvlab::Potential& p, int grid_points,
                                   double c = 1.2) {
    gvlab::PotentialConstants pc = gvlab::compute_constants(p, grid_points);
    gvlab::ScalingRegime reg;
    reg.c = c;
    reg.beta = pc.beta;
    reg.z = gvlab::activity_with_margin(pc.beta, c);
    auto a1 = gvlab::alpha_threshold(reg.z, pc.beta, c);
    reg.alpha = a1 ? 0.5 * (1.0 + *a1) : 0.95;
    reg.eps = 0.1;
    reg.delta = 0.1;
    return reg;
}

} // namespace fixture
