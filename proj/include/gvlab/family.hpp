#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "gvlab/grid.hpp"
#include "gvlab/rng.hpp"

namespace gvlab {

/// Truncated symmetric-function sequence (G^(0), ..., G^(n_max)) on the
/// gridded products of the box: level n holds M^n values, symmetric under
/// coordinate permutations. Represents a quasi-observable or a correlation
/// function at desk scale.
class GridFunctionFamily {
  public:
    GridFunctionFamily() = default;
    GridFunctionFamily(GridSpec grid, int n_max);

    const GridSpec& grid() const { return grid_; }
    int n_max() const { return n_max_; }
    double grid_step() const { return grid_.step(); }

    std::vector<double>& level(int n) { return levels_[n]; }
    const std::vector<double>& level(int n) const { return levels_[n]; }

    double& scalar() { return levels_[0][0]; }
    double scalar() const { return levels_[0][0]; }

    /// Flat index of (i1,...,in) in level n storage (row-major).
    std::size_t index(const std::vector<int>& idx) const;

    double value(const std::vector<int>& idx) const;

    /// Average each level over coordinate permutations (in place).
    void symmetrize();

    /// Max deviation from permutation symmetry, for assertions.
    double symmetry_defect() const;

    GridFunctionFamily& operator+=(const GridFunctionFamily& other);
    GridFunctionFamily& operator*=(double a);

    bool same_shape(const GridFunctionFamily& other) const;

  private:
    GridSpec grid_;
    int n_max_ = 0;
    std::vector<std::vector<double>> levels_;
};

GridFunctionFamily operator+(GridFunctionFamily a, const GridFunctionFamily& b);
GridFunctionFamily operator-(GridFunctionFamily a, const GridFunctionFamily& b);
GridFunctionFamily operator*(double a, GridFunctionFamily f);

/// Product family e(f): level n at (x_1..x_n) is f(x_1)...f(x_n); level 0 is 1.
GridFunctionFamily e_lambda(const GridSpec& grid, int n_max,
                            const std::function<double(double)>& f);
GridFunctionFamily e_lambda(const GridSpec& grid, int n_max,
                            const std::vector<double>& node_values);

/// 1 at the empty configuration, 0 elsewhere.
GridFunctionFamily indicator_empty(const GridSpec& grid, int n_max);

/// 1 on every singleton, 0 elsewhere.
GridFunctionFamily indicator_singletons(const GridSpec& grid, int n_max);

/// Random symmetric family with iid uniform[-1,1] entries, each level then
/// rescaled so its contribution to the C-weighted L1 norm equals 1 (keeps
/// truncation tails comparable across levels).
GridFunctionFamily random_family_balanced(const GridSpec& grid, int n_max, double c,
                                          Rng& rng);

/// Random family with level-n sup bounded by bound^n (correlation-like scale).
GridFunctionFamily random_family_sup_scaled(const GridSpec& grid, int n_max,
                                            double bound, Rng& rng);

/// One CSV per level ("n,i1,...,in,value") plus a JSON sidecar
/// {n_max, grid_points, box_length}; `stem` is the path prefix.
void save_family(const GridFunctionFamily& f, const std::string& stem);
GridFunctionFamily load_family(const std::string& stem);

} // namespace gvlab
