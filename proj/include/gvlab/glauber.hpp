#pragma once

#include <cstdint>
#include <vector>

#include "gvlab/configuration.hpp"
#include "gvlab/grid.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"
#include "gvlab/vlasov.hpp"

namespace gvlab {

struct SimParams {
    double t_end = 2.0;
    double dt_record = 0.1;
    double eps = 1.0;
    std::uint64_t seed = 12345;
    int population_cap = 200000;
};

/// Snapshot record of one replica: positions at fixed times plus counters
/// for the thinning diagnostics.
struct ReplicaTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> positions;
    long events = 0;
    long proposals = 0;
    long accepted = 0;
    double acceptance_prob_sum = 0.0; // sum of exp(-eps E) over proposals
};

/// Exact-event simulation of the rescaled birth-and-death dynamics: deaths at
/// unit rate per particle, births proposed at rate z L / eps with uniform
/// location and accepted with probability exp{-eps E(x, gamma)} (thinning).
ReplicaTrajectory simulate(const Configuration& init, const SimParams& sp,
                           const ScalingRegime& reg, const Potential& pot,
                           std::uint64_t replica_index = 0);

/// Poisson point configuration with intensity intensity_scale * rho0.
Configuration sample_poisson_initial(const DensityField& rho0, double intensity_scale,
                                     Rng& rng);

struct EnsembleEstimate {
    GridSpec grid;
    double time = 0.0;
    double eps = 1.0;
    int n_replicas = 0;
    std::vector<double> density;        // eps-rescaled intensity per node cell
    std::vector<double> ci_halfwidth;   // 95% normal CI on the density
    std::vector<double> pair_r;         // distance bin centers on [0, L/2)
    std::vector<double> pair_correlation; // eps^2-rescaled ordered-pair density
    std::vector<double> pair_ci;
    double mean_density = 0.0;
};

/// Replica-averaged one- and two-point estimates at the recorded time nearest
/// to t. Needs at least two replicas for the confidence intervals.
EnsembleEstimate estimate_correlations(const std::vector<ReplicaTrajectory>& replicas,
                                       double t, const GridSpec& grid, double eps,
                                       int n_pair_bins = 32);

/// Sup over distance bins of |pair - density x density| / mean_density^2.
double chaos_factorization_gap(const EnsembleEstimate& est);

/// Run n_replicas independent replicas (parallel, seed-derived streams).
std::vector<ReplicaTrajectory> run_replicas(const Configuration& init, const SimParams& sp,
                                            const ScalingRegime& reg, const Potential& pot,
                                            int n_replicas);

/// Same but with Poisson initial data resampled per replica.
std::vector<ReplicaTrajectory> run_replicas_poisson(const DensityField& rho0,
                                                    double intensity_scale,
                                                    const SimParams& sp,
                                                    const ScalingRegime& reg,
                                                    const Potential& pot, int n_replicas);

} // namespace gvlab
