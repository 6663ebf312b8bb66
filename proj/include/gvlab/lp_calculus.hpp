#pragma once

#include <functional>
#include <optional>

#include "gvlab/configuration.hpp"
#include "gvlab/family.hpp"

namespace gvlab {

/// Weight parameters for the weighted norms: c > 1, alpha in (0,1).
struct NormParams {
    double c = 1.2;
    double alpha = 0.9;

    void validate() const;
};

/// Product of f over the points of eta; 1 for the empty configuration.
double lp_exponent(const std::function<double(double)>& f, const Configuration& eta);

/// Truncated configuration-space integral: sum over n of (1/n!) times the
/// rectangle-rule integral of level n; optional weight c^n per level.
double lp_integral(const GridFunctionFamily& f, std::optional<double> level_weight = {});

/// Subset-sum transform (KG)(gamma) = sum over sub-configurations of G.
/// Enumeration is 2^|gamma|; refuses |gamma| > 25.
double k_transform(const std::function<double(const Configuration&)>& g,
                   const Configuration& gamma);

/// Alternating-sum inverse of k_transform.
double k_inverse(const std::function<double(const Configuration&)>& f,
                 const Configuration& eta);

/// Weighted L1 norm: sum over n of (c^n / n!) integral of |level n|.
double norm_lc(const GridFunctionFamily& g, double c);

/// Same with an extra per-level factor weight(n) (used for the |eta|-weighted
/// comparison against the doubled-constant norm).
double norm_lc_weighted(const GridFunctionFamily& g, double c,
                        const std::function<double(int)>& weight);

/// Weighted sup norm: max over n of c^{-n} times the grid sup of |level n|.
double norm_kc(const GridFunctionFamily& k, double c);

/// Combinatorial-rearrangement identity residual, evaluated by truncated
/// quadrature at small grids. H takes (xi, eta, xi union eta) as coordinate
/// tuples. Both orders of truncation are reported: lhs sums over single
/// configurations split in two, rhs over independent pairs (each capped at
/// n_max points), so the residual is the triangle-vs-rectangle tail.
double minlos_identity_residual(
    const std::function<double(const std::vector<double>&, const std::vector<double>&,
                               const std::vector<double>&)>& h,
    const GridSpec& grid, int n_max);

/// Level-n values scaled by eps^n.
GridFunctionFamily rescale_singularity(const GridFunctionFamily& k, double eps);

} // namespace gvlab
