#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "gvlab/family.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"

namespace gvlab::detail {

/// Shared per-application state: circulant kernel samples by offset, the
/// eps-weights, and the kernel's support offsets (short range => small band).
struct Workspace {
    int m = 0;
    double h = 0.0;
    std::vector<double> phi;  // phi[d], d = (i-j) mod M
    std::vector<double> ae;   // e^{-eps*phi[d]}
    std::vector<double> de;   // (ae[d]-1)/eps
    std::vector<int> band;    // offsets d with phi[d] != 0

    Workspace(const GridSpec& grid, const Potential& pot, double eps) {
        if (grid.box_length != pot.box_length)
            throw std::invalid_argument("hierarchy op: grid/potential box mismatch");
        m = grid.points;
        h = grid.step();
        phi.resize(m);
        ae.resize(m);
        de.resize(m);
        for (int d = 0; d < m; ++d) {
            phi[d] = eval_potential(pot, d * h);
            ae[d] = std::exp(-eps * phi[d]);
            de[d] = (ae[d] - 1.0) / eps;
            if (phi[d] != 0.0) band.push_back(d);
        }
    }

    int off(int i, int j) const {
        int d = i - j;
        return d < 0 ? d + m : d;
    }
    double phi_at(int i, int j) const { return phi[off(i, j)]; }
    double ae_at(int i, int j) const { return ae[off(i, j)]; }
    double de_at(int i, int j) const { return de[off(i, j)]; }
};

inline void require_desk_scale(const GridFunctionFamily& f) {
    if (f.n_max() > 3)
        throw std::invalid_argument("hierarchy op: fast paths support n_max <= 3");
}

inline std::size_t idx2(int m, int i, int j) { return std::size_t(i) * m + j; }
inline std::size_t idx3(int m, int i, int j, int k) {
    return (std::size_t(i) * m + j) * m + k;
}

} // namespace gvlab::detail
