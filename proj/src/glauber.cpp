#include "gvlab/glauber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gvlab/parallel.hpp"
#include "gvlab/rng.hpp"

namespace gvlab {

namespace {

/// One-dimensional cell list over the periodic box; cells at least as wide
/// as the interaction cutoff so energy sums scan three cells.
class CellList {
  public:
    CellList(double box_length, double cutoff) : box_(box_length) {
        n_cells_ = std::max(1, static_cast<int>(std::floor(box_length / cutoff)));
        if (n_cells_ < 3) n_cells_ = 1; // tiny boxes: single cell, plain scan
        width_ = box_length / n_cells_;
        cells_.resize(n_cells_);
    }

    int cell_of(double x) const {
        int c = static_cast<int>(x / width_);
        return c >= n_cells_ ? n_cells_ - 1 : c;
    }

    void insert(int idx, double x) {
        int c = cell_of(x);
        cells_[c].push_back(idx);
        where_.resize(std::max<std::size_t>(where_.size(), idx + 1));
        where_[idx] = c;
    }

    void erase(int idx) {
        auto& v = cells_[where_[idx]];
        v.erase(std::find(v.begin(), v.end(), idx));
    }

    void relabel(int from, int to) { // point "from" renamed to "to"
        auto& v = cells_[where_[from]];
        *std::find(v.begin(), v.end(), from) = to;
        where_[to] = where_[from];
    }

    template <typename Fn>
    void for_neighbors(double x, Fn&& fn) const {
        if (n_cells_ == 1) {
            for (int idx : cells_[0]) fn(idx);
            return;
        }
        int c = cell_of(x);
        for (int d = -1; d <= 1; ++d) {
            int cc = (c + d + n_cells_) % n_cells_;
            for (int idx : cells_[cc]) fn(idx);
        }
    }

  private:
    double box_, width_;
    int n_cells_;
    std::vector<std::vector<int>> cells_;
    std::vector<int> where_;
};

} // namespace

ReplicaTrajectory simulate(const Configuration& init, const SimParams& sp,
                           const ScalingRegime& reg, const Potential& pot,
                           std::uint64_t replica_index) {
    if (!(sp.eps > 0.0)) throw std::invalid_argument("simulate: eps must be positive");
    if (reg.z < 0.0) throw std::invalid_argument("simulate: z must be >= 0");
    const double box = pot.box_length;

    Rng rng = Rng::stream(sp.seed, replica_index);
    std::vector<double> pts = init.points();
    CellList cells(box, std::min(pot.cutoff_radius, box));
    for (std::size_t i = 0; i < pts.size(); ++i) cells.insert(static_cast<int>(i), pts[i]);

    auto energy_at = [&](double x) {
        double e = 0.0;
        cells.for_neighbors(x, [&](int idx) {
            e += eval_potential(pot, x - pts[idx]);
        });
        return e;
    };

    ReplicaTrajectory out;
    const double proposal_rate = reg.z * box / sp.eps;
    double t = 0.0;
    double next_record = 0.0;

    auto record = [&](double at) {
        out.times.push_back(at);
        std::vector<double> snap = pts;
        std::sort(snap.begin(), snap.end());
        out.positions.push_back(std::move(snap));
    };

    while (true) {
        double total = pts.size() + proposal_rate;
        double wait = total > 0.0 ? rng.exponential(total) : 2.0 * (sp.t_end - t) + 1.0;
        double t_next = t + wait;
        while (next_record <= std::min(t_next, sp.t_end) + 1e-15 && next_record <= sp.t_end + 1e-15) {
            record(next_record);
            next_record += sp.dt_record;
        }
        if (t_next > sp.t_end) break;
        t = t_next;
        ++out.events;
        if (rng.uniform(total) < double(pts.size())) {
            // death: uniform victim, swap-remove
            int victim = static_cast<int>(rng.uniform() * pts.size());
            if (victim == static_cast<int>(pts.size())) --victim;
            int last = static_cast<int>(pts.size()) - 1;
            cells.erase(victim);
            if (victim != last) {
                cells.relabel(last, victim);
                pts[victim] = pts[last];
            }
            pts.pop_back();
        } else {
            // birth proposal with thinning
            double x = rng.uniform(box);
            double acc = std::exp(-sp.eps * energy_at(x));
            ++out.proposals;
            out.acceptance_prob_sum += acc;
            if (rng.uniform() < acc) {
                ++out.accepted;
                pts.push_back(x);
                cells.insert(static_cast<int>(pts.size()) - 1, x);
                if (static_cast<int>(pts.size()) > sp.population_cap)
                    throw std::runtime_error(
                        "simulate: population cap exceeded (non-contractive regime?)");
            }
        }
    }
    return out;
}

Configuration sample_poisson_initial(const DensityField& rho0, double intensity_scale,
                                     Rng& rng) {
    const int m = rho0.grid.points;
    const double h = rho0.grid.step();
    double total = 0.0;
    std::vector<double> prefix(m);
    for (int i = 0; i < m; ++i) {
        double w = std::max(0.0, rho0.values[i]) * h * intensity_scale;
        total += w;
        prefix[i] = total;
    }
    int n = rng.poisson(total);
    std::vector<double> pts;
    pts.reserve(n);
    for (int p = 0; p < n; ++p) {
        double u = rng.uniform(total);
        int cell = static_cast<int>(std::lower_bound(prefix.begin(), prefix.end(), u) -
                                    prefix.begin());
        if (cell >= m) cell = m - 1;
        double x = rho0.grid.node(cell) + rng.uniform(h);
        // duplicate coordinates have probability zero; nudge if they occur
        while (std::find(pts.begin(), pts.end(), x) != pts.end()) x = rng.uniform(rho0.grid.box_length);
        pts.push_back(x);
    }
    return Configuration(std::move(pts), rho0.grid.box_length);
}

EnsembleEstimate estimate_correlations(const std::vector<ReplicaTrajectory>& replicas,
                                       double t, const GridSpec& grid, double eps,
                                       int n_pair_bins) {
    if (replicas.size() < 2)
        throw std::invalid_argument("estimate_correlations: need at least two replicas");
    const int m = grid.points;
    const double h = grid.step();
    const double box = grid.box_length;
    const double pair_w = 0.5 * box / n_pair_bins;

    EnsembleEstimate est;
    est.grid = grid;
    est.eps = eps;
    est.n_replicas = static_cast<int>(replicas.size());
    est.density.assign(m, 0.0);
    est.ci_halfwidth.assign(m, 0.0);
    est.pair_r.resize(n_pair_bins);
    for (int b = 0; b < n_pair_bins; ++b) est.pair_r[b] = (b + 0.5) * pair_w;
    est.pair_correlation.assign(n_pair_bins, 0.0);
    est.pair_ci.assign(n_pair_bins, 0.0);

    // nearest recorded time of the first replica (all share the schedule)
    const auto& times = replicas.front().times;
    std::size_t ti = 0;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::fabs(times[i] - t) < std::fabs(times[ti] - t)) ti = i;
    est.time = times[ti];

    std::vector<double> dsum(m, 0.0), dsq(m, 0.0);
    std::vector<double> psum(n_pair_bins, 0.0), psq(n_pair_bins, 0.0);
    std::vector<double> dloc(m), ploc(n_pair_bins);
    for (const auto& rep : replicas) {
        const auto& pts = rep.positions.at(ti);
        std::fill(dloc.begin(), dloc.end(), 0.0);
        std::fill(ploc.begin(), ploc.end(), 0.0);
        for (double x : pts) {
            int c = std::min(m - 1, static_cast<int>(x / h));
            dloc[c] += 1.0;
        }
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = 0; b < pts.size(); ++b) {
                if (a == b) continue;
                double r = torus_distance(pts[a], pts[b], box);
                int bin = std::min(n_pair_bins - 1, static_cast<int>(r / pair_w));
                ploc[bin] += 1.0;
            }
        for (int i = 0; i < m; ++i) {
            double v = eps * dloc[i] / h;
            dsum[i] += v;
            dsq[i] += v * v;
        }
        for (int b = 0; b < n_pair_bins; ++b) {
            double v = eps * eps * ploc[b] / (box * 2.0 * pair_w);
            psum[b] += v;
            psq[b] += v * v;
        }
    }
    const double r_count = static_cast<double>(replicas.size());
    double dtot = 0.0;
    for (int i = 0; i < m; ++i) {
        est.density[i] = dsum[i] / r_count;
        double var = std::max(0.0, dsq[i] / r_count - est.density[i] * est.density[i]);
        est.ci_halfwidth[i] = 1.96 * std::sqrt(var / r_count);
        dtot += est.density[i];
    }
    est.mean_density = dtot / m;
    for (int b = 0; b < n_pair_bins; ++b) {
        est.pair_correlation[b] = psum[b] / r_count;
        double var = std::max(0.0, psq[b] / r_count -
                                       est.pair_correlation[b] * est.pair_correlation[b]);
        est.pair_ci[b] = 1.96 * std::sqrt(var / r_count);
    }
    return est;
}

double chaos_factorization_gap(const EnsembleEstimate& est) {
    const int m = est.grid.points;
    const double h = est.grid.step();
    const double box = est.grid.box_length;
    const int n_bins = static_cast<int>(est.pair_r.size());
    const double pair_w = 0.5 * box / n_bins;
    // radial average of density(x) density(y) over pairs with distance in bin
    std::vector<double> prod(n_bins, 0.0), meas(n_bins, 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            if (i == j) continue;
            double r = torus_distance(est.grid.node(i), est.grid.node(j), box);
            int bin = std::min(n_bins - 1, static_cast<int>(r / pair_w));
            prod[bin] += est.density[i] * est.density[j] * h * h;
            meas[bin] += h * h;
        }
    double scale = est.mean_density * est.mean_density;
    if (scale <= 0.0) return 0.0;
    double worst = 0.0;
    for (int b = 0; b < n_bins; ++b) {
        if (meas[b] <= 0.0) continue;
        double pavg = prod[b] / meas[b];
        worst = std::max(worst, std::fabs(est.pair_correlation[b] - pavg) / scale);
    }
    return worst;
}

std::vector<ReplicaTrajectory> run_replicas(const Configuration& init, const SimParams& sp,
                                            const ScalingRegime& reg, const Potential& pot,
                                            int n_replicas) {
    std::vector<ReplicaTrajectory> out(n_replicas);
    parallel_for(n_replicas, [&](std::size_t r) {
        out[r] = simulate(init, sp, reg, pot, static_cast<std::uint64_t>(r));
    });
    return out;
}

std::vector<ReplicaTrajectory> run_replicas_poisson(const DensityField& rho0,
                                                    double intensity_scale,
                                                    const SimParams& sp,
                                                    const ScalingRegime& reg,
                                                    const Potential& pot, int n_replicas) {
    std::vector<ReplicaTrajectory> out(n_replicas);
    parallel_for(n_replicas, [&](std::size_t r) {
        Rng init_rng = Rng::stream(sp.seed ^ 0x9e3779b97f4a7c15ULL, r);
        Configuration gamma0 = sample_poisson_initial(rho0, intensity_scale, init_rng);
        out[r] = simulate(gamma0, sp, reg, pot, static_cast<std::uint64_t>(r));
    });
    return out;
}

} // namespace gvlab
