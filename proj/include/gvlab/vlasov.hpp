#pragma once

#include <string>
#include <vector>

#include "gvlab/grid.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"

namespace gvlab {

/// Grid density on the periodic box at a moment in time.
struct DensityField {
    GridSpec grid;
    std::vector<double> values;
    double time = 0.0;

    DensityField() = default;
    DensityField(GridSpec g, double constant = 0.0, double t = 0.0)
        : grid(g), values(g.points, constant), time(t) {}

    double min() const;
    double max() const;
    double mean() const;
};

enum class SolverMethod { rk4, picard };

struct SolverSettings {
    SolverMethod method = SolverMethod::rk4;
    double dt = 1e-3;
    double picard_tol = 1e-12;
    int picard_max_iter = 60;
    double t_window = 1.0; // window length for the fixed-point construction

    void validate() const;
};

/// Circular convolution with the periodized kernel, direct summation.
DensityField convolve(const DensityField& rho, const Potential& p);

/// Same via a radix-2 transform (grid size must be a power of two);
/// gated behind an equivalence test against the direct path.
DensityField convolve_fft(const DensityField& rho, const Potential& p);

/// Time-indexed fields on a uniform time grid (t_k = k * dt_store).
struct TimeGridField {
    double dt = 0.0;
    std::vector<DensityField> frames;
};

/// One fixed-point map application:
/// (Phi v)_t = e^{-t} rho0 + z int_0^t e^{-(t-s)} exp{-(v_s * phi)} ds,
/// with the Duhamel integral by trapezoid rule on the stored time grid.
TimeGridField picard_step(const TimeGridField& v, const DensityField& rho0,
                          const ScalingRegime& reg, const Potential& p);

struct Trajectory {
    std::vector<DensityField> snapshots;
    int picard_iterations = 0;   // when the picard driver was used
    double picard_residual = 0.0;
};

/// Integrate d rho/dt = -rho + z exp{-(rho*phi)} to t_end; snapshots at every
/// dt_record (and at t_end). The a priori bounds are asserted at each record:
/// violation beyond tolerance is a hard error.
Trajectory solve_vlasov(const DensityField& rho0, double t_end, const SolverSettings& s,
                        const ScalingRegime& reg, const Potential& p,
                        double dt_record = 0.1, double bound_tol = 1e-8);

struct FixedPointResult {
    DensityField rho;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Stationary density by the fixed-point iteration rho <- z exp{-(rho*phi)}.
FixedPointResult solve_kirkwood_monroe(const ScalingRegime& reg, const Potential& p,
                                       const DensityField& init, double tol, int max_iter);

/// Root of r = z e^{-beta r} by bisection (homogeneous stationary value).
double homogeneous_root(double z, double beta, double tol = 1e-14);

struct BoundReport {
    std::vector<double> times;
    std::vector<double> max_low_violation;   // below 0
    std::vector<double> max_high_violation;  // above min(alpha c, comparison)
    double worst = 0.0;
    bool pass = true; // worst <= tol
};

/// Pointwise check of 0 <= rho_t <= min{alpha c, e^{-t} rho0 + z(1-e^{-t})}.
BoundReport verify_apriori_bounds(const Trajectory& traj, const ScalingRegime& reg,
                                  double tol = 1e-8);

} // namespace gvlab
