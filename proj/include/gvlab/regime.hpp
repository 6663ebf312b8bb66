#pragma once

#include <optional>

namespace gvlab {

/// Parameter bundle for the scaling experiments, with the smallness
/// conditions exposed as checkable predicates. beta is copied from the
/// potential's computed constants so every predicate refers to the kernel
/// actually in use.
struct ScalingRegime {
    double z = 0.1;     // activity
    double c = 1.2;     // weight base, > 1
    double alpha = 0.9; // in (0,1)
    double eps = 0.1;
    double delta = 0.1; // in (0,1)
    double beta = 0.0;  // kernel mass

    void validate_structure() const; // throws on c <= 1, alpha/delta out of range

    /// z e^{beta c} <= c.
    bool smallz_ok() const;

    /// z <= min{c e^{-c beta}, 2 c e^{-2 c beta}}; at c*beta = ln 2 the two
    /// branches coincide and z < c/2 is required additionally.
    bool verysmallz_ok() const;

    /// alpha lies in (alpha1, 1) for the computed alpha1.
    bool alpha_ok() const;

    /// z beta <= 1/e (implied by verysmallz; the Picard contraction constant).
    bool zbeta_ok() const;
};

/// Smaller root x1 in (0,1] of x e^{-x} = a, if it exists (a <= 1/e).
std::optional<double> small_root_xexp(double a);

/// Threshold alpha1(z, beta, c): with x1 the smaller root of x e^{-x} = z beta,
/// alpha1 = max{1/2, x1/(c beta), 1/c} when c beta <= 1 and
/// alpha1 = max{1/2, 1/(c beta), 1/c} when c beta > 1. Empty if z beta > 1/e.
std::optional<double> alpha_threshold(double z, double beta, double c);

/// 0.9 * min{c e^{-c beta}, 2 c e^{-2 c beta}} (the default activity choice).
double activity_with_margin(double beta, double c, double margin = 0.9);

} // namespace gvlab
