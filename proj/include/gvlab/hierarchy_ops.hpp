#pragma once

#include <functional>

#include "gvlab/family.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"

namespace gvlab {

/// Which evolution a semigroup step approximates: the limiting (Vlasov)
/// hierarchy or the rescaled one at finite eps.
enum class Evolution { vlasov, rescaled };

//============================================================
// Generators on quasi-observables (densely-defined, unbounded)
//============================================================

/// Limiting hierarchy generator: out(eta) = -|eta| G(eta)
/// + z sum_{xi subset eta} int G(xi u x) prod_{y in eta\xi} (-phi(x-y)) dx.
/// Exact on truncated families (the x-integral adds one point to xi).
GridFunctionFamily apply_vlasov_generator(const GridFunctionFamily& g,
                                          const ScalingRegime& reg, const Potential& pot);

/// Rescaled generator at finite eps: the xi-side weight is
/// prod e^{-eps phi}, the remainder side (e^{-eps phi}-1)/eps.
/// At eps = 1 this is the plain hierarchy generator of the dynamics.
GridFunctionFamily apply_rescaled_generator(const GridFunctionFamily& g,
                                            const ScalingRegime& reg, const Potential& pot);

//============================================================
// Contraction steps (the semigroup approximants)
//============================================================

/// One approximation step of the limiting semigroup:
/// out(eta) = sum_{xi subset eta} (1-delta)^{|xi|} int (z delta)^{|omega|}
///            G(xi u omega) prod_{y in eta\xi}(-E(y,omega)) dlambda(omega),
/// with the omega-integral truncated at order omega_max (<= 3).
GridFunctionFamily vlasov_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                               const Potential& pot, int omega_max);

/// Finite-eps analogue with weights prod e^{-eps E} on the xi side and
/// (prod e^{-eps E} - 1)/eps on the remainder side; omega_max <= 2.
GridFunctionFamily rescaled_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                                 const Potential& pot, int omega_max);

//============================================================
// Dual steps and dual generators on correlation functions
//============================================================

/// Dual of vlasov_step:
/// out(eta) = sum_{omega subset eta} (1-delta)^{|eta\omega|} (z delta)^{|omega|}
///            int prod_{s in xi}(-E(s,omega)) k(xi u eta\omega) dlambda(xi),
/// with the xi-integral truncated at order xi_max (<= 2).
GridFunctionFamily vlasov_step_dual(const GridFunctionFamily& k, const ScalingRegime& reg,
                                    const Potential& pot, int xi_max);

/// Dual of rescaled_step; the surviving points eta\omega carry the factor
/// prod e^{-eps E(.,omega)} outside the xi-integral.
GridFunctionFamily rescaled_step_dual(const GridFunctionFamily& k, const ScalingRegime& reg,
                                      const Potential& pot, int xi_max);

/// Dual limiting generator: out(eta) = -|eta| k(eta)
/// + z sum_{x in eta} int prod_{s in xi}(-phi(x-s)) k(xi u eta\x) dlambda(xi).
GridFunctionFamily apply_vlasov_generator_dual(const GridFunctionFamily& k,
                                               const ScalingRegime& reg, const Potential& pot,
                                               int xi_max);

/// Dual rescaled generator (finite-eps version of the above).
GridFunctionFamily apply_rescaled_generator_dual(const GridFunctionFamily& k,
                                                 const ScalingRegime& reg, const Potential& pot,
                                                 int xi_max);

//============================================================
// Semigroup approximation by operator powers
//============================================================

/// Q_{t/n}^n G (vlasov) or P_{t/n,eps}^n G (rescaled); t = 0 returns g.
GridFunctionFamily evolve_quasi_observable(const GridFunctionFamily& g, double t, int n_steps,
                                           Evolution which, const ScalingRegime& reg,
                                           const Potential& pot, int omega_max);

/// Dual evolution by powers of the dual steps.
GridFunctionFamily evolve_correlation(const GridFunctionFamily& k, double t, int n_steps,
                                      Evolution which, const ScalingRegime& reg,
                                      const Potential& pot, int xi_max);

//============================================================
// Bound instrumentation
//============================================================

/// || (1/delta)(step - id) G - generator G ||_C for the chosen evolution.
double generator_residual(const GridFunctionFamily& g, const ScalingRegime& reg,
                          const Potential& pot, Evolution which, int omega_max);

/// || A^m f - B^m f || for two maps and a norm; the linear-in-m growth check.
double contraction_power_gap(
    const std::function<GridFunctionFamily(const GridFunctionFamily&)>& apply_a,
    const std::function<GridFunctionFamily(const GridFunctionFamily&)>& apply_b,
    const GridFunctionFamily& f, int m,
    const std::function<double(const GridFunctionFamily&)>& norm);

/// A priori bound on the C-norm of the neglected omega-orders (> omega_max)
/// of one vlasov_step/rescaled_step application to g.
double tau_trunc_primal(const GridFunctionFamily& g, const ScalingRegime& reg, int omega_max);

/// A priori bound on the weighted-sup norm (weight base target_c, typically c
/// or alpha*c) of the neglected xi-orders (> xi_max) of one dual step.
double tau_trunc_dual(const GridFunctionFamily& k, const ScalingRegime& reg, int xi_max,
                      double target_c);

} // namespace gvlab
