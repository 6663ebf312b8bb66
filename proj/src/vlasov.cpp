#include "gvlab/vlasov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace gvlab {

double DensityField::min() const { return *std::min_element(values.begin(), values.end()); }
double DensityField::max() const { return *std::max_element(values.begin(), values.end()); }
double DensityField::mean() const {
    return std::accumulate(values.begin(), values.end(), 0.0) / values.size();
}

void SolverSettings::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SolverSettings: dt must be positive");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("SolverSettings: picard_tol must be positive");
    if (picard_max_iter < 1) throw std::invalid_argument("SolverSettings: picard_max_iter must be >= 1");
    if (!(t_window > 0.0)) throw std::invalid_argument("SolverSettings: t_window must be positive");
}

DensityField convolve(const DensityField& rho, const Potential& p) {
    if (rho.grid.box_length != p.box_length)
        throw std::invalid_argument("convolve: grid/potential box mismatch");
    const int m = rho.grid.points;
    const double h = rho.grid.step();
    std::vector<double> ker(m);
    std::vector<int> band;
    for (int d = 0; d < m; ++d) {
        ker[d] = eval_potential(p, d * h);
        if (ker[d] != 0.0) band.push_back(d);
    }
    DensityField out(rho.grid, 0.0, rho.time);
    for (int i = 0; i < m; ++i) {
        double acc = 0.0;
        for (int d : band) {
            int j = i - d;
            if (j < 0) j += m;
            acc += rho.values[j] * ker[d];
        }
        out.values[i] = acc * h;
    }
    return out;
}

namespace {

void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n & (n - 1)) throw std::invalid_argument("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j], v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= double(n);
}

} // namespace

DensityField convolve_fft(const DensityField& rho, const Potential& p) {
    if (rho.grid.box_length != p.box_length)
        throw std::invalid_argument("convolve_fft: grid/potential box mismatch");
    const int m = rho.grid.points;
    const double h = rho.grid.step();
    std::vector<std::complex<double>> fr(m), fk(m);
    for (int i = 0; i < m; ++i) {
        fr[i] = rho.values[i];
        fk[i] = eval_potential(p, i * h);
    }
    fft_radix2(fr, false);
    fft_radix2(fk, false);
    for (int i = 0; i < m; ++i) fr[i] *= fk[i];
    fft_radix2(fr, true);
    DensityField out(rho.grid, 0.0, rho.time);
    for (int i = 0; i < m; ++i) out.values[i] = fr[i].real() * h;
    return out;
}

TimeGridField picard_step(const TimeGridField& v, const DensityField& rho0,
                          const ScalingRegime& reg, const Potential& p) {
    if (v.frames.empty()) throw std::invalid_argument("picard_step: empty time grid");
    const int m = rho0.grid.points;
    const std::size_t nt = v.frames.size();
    const double dt = v.dt;
    // birth terms w_s = z exp{-(v_s * phi)}
    std::vector<std::vector<double>> w(nt);
    for (std::size_t s = 0; s < nt; ++s) {
        DensityField conv = convolve(v.frames[s], p);
        w[s].resize(m);
        for (int i = 0; i < m; ++i) w[s][i] = reg.z * std::exp(-conv.values[i]);
    }
    TimeGridField out;
    out.dt = dt;
    out.frames.assign(nt, DensityField(rho0.grid));
    double decay = std::exp(-dt);
    std::vector<double> duhamel(m, 0.0);
    for (std::size_t t = 0; t < nt; ++t) {
        double et = std::exp(-double(t) * dt);
        if (t > 0) {
            // composite trapezoid advanced incrementally:
            // I_t = e^{-dt} I_{t-1} + dt/2 (e^{-dt} w_{t-1} + w_t)
            for (int i = 0; i < m; ++i)
                duhamel[i] = decay * duhamel[i] + 0.5 * dt * (decay * w[t - 1][i] + w[t][i]);
        }
        auto& f = out.frames[t];
        f.time = double(t) * dt;
        for (int i = 0; i < m; ++i) f.values[i] = et * rho0.values[i] + duhamel[i];
    }
    return out;
}

namespace {

std::vector<double> vlasov_rhs(const std::vector<double>& rho, const GridSpec& grid,
                               const ScalingRegime& reg, const Potential& p) {
    DensityField tmp{grid, 0.0, 0.0};
    tmp.values = rho;
    DensityField conv = convolve(tmp, p);
    std::vector<double> out(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i)
        out[i] = -rho[i] + reg.z * std::exp(-conv.values[i]);
    return out;
}

void rk4_step(std::vector<double>& rho, double dt, const GridSpec& grid,
              const ScalingRegime& reg, const Potential& p) {
    auto k1 = vlasov_rhs(rho, grid, reg, p);
    std::vector<double> tmp(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + 0.5 * dt * k1[i];
    auto k2 = vlasov_rhs(tmp, grid, reg, p);
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + 0.5 * dt * k2[i];
    auto k3 = vlasov_rhs(tmp, grid, reg, p);
    for (std::size_t i = 0; i < rho.size(); ++i) tmp[i] = rho[i] + dt * k3[i];
    auto k4 = vlasov_rhs(tmp, grid, reg, p);
    for (std::size_t i = 0; i < rho.size(); ++i)
        rho[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

void check_bounds_or_throw(const DensityField& f, const DensityField& rho0,
                           const ScalingRegime& reg, double tol) {
    double t = f.time;
    double et = std::exp(-t);
    double zpart = reg.z * (1.0 - et);
    double cap = reg.alpha * reg.c;
    bool init_capped = true;
    for (double v : rho0.values)
        if (v > cap) init_capped = false;
    for (int i = 0; i < f.grid.points; ++i) {
        double v = f.values[i];
        double envelope = et * rho0.values[i] + zpart;
        if (v < -tol || v > envelope + tol || (init_capped && v > cap + tol))
            throw std::runtime_error("solve_vlasov: a priori bound violated (solver bug)");
    }
}

} // namespace

Trajectory solve_vlasov(const DensityField& rho0, double t_end, const SolverSettings& s,
                        const ScalingRegime& reg, const Potential& p, double dt_record,
                        double bound_tol) {
    s.validate();
    if (t_end < 0.0) throw std::invalid_argument("solve_vlasov: t_end must be >= 0");
    Trajectory traj;
    if (s.method == SolverMethod::rk4) {
        std::vector<double> rho = rho0.values;
        double t = 0.0;
        DensityField snap = rho0;
        snap.time = 0.0;
        check_bounds_or_throw(snap, rho0, reg, bound_tol);
        traj.snapshots.push_back(snap);
        double next_record = dt_record;
        while (t < t_end - 1e-12) {
            double dt = std::min(s.dt, t_end - t);
            if (next_record < t_end && next_record - t > 1e-12 && next_record - t < dt)
                dt = next_record - t;
            rk4_step(rho, dt, rho0.grid, reg, p);
            t += dt;
            if (t >= next_record - 1e-12 || t >= t_end - 1e-12) {
                DensityField rec{rho0.grid, 0.0, t};
                rec.values = rho;
                check_bounds_or_throw(rec, rho0, reg, bound_tol);
                traj.snapshots.push_back(rec);
                while (next_record <= t + 1e-12) next_record += dt_record;
            }
        }
        return traj;
    }

    // picard driver: fixed-point construction on windows of length t_window,
    // chained until t_end; snapshots on the stored time grid.
    double window = std::min(s.t_window, std::max(t_end, s.dt));
    DensityField start = rho0;
    start.time = 0.0;
    traj.snapshots.push_back(start);
    double t0 = 0.0;
    while (t0 < t_end - 1e-12) {
        double span = std::min(window, t_end - t0);
        auto nt = static_cast<std::size_t>(std::ceil(span / s.dt)) + 1;
        TimeGridField v;
        v.dt = span / double(nt - 1);
        v.frames.assign(nt, start);
        int iters = 0;
        double resid = 0.0;
        for (; iters < s.picard_max_iter; ++iters) {
            TimeGridField next = picard_step(v, start, reg, p);
            resid = 0.0;
            for (std::size_t f = 0; f < nt; ++f)
                for (int i = 0; i < start.grid.points; ++i)
                    resid = std::max(resid,
                                     std::fabs(next.frames[f].values[i] - v.frames[f].values[i]));
            v = std::move(next);
            if (resid < s.picard_tol) break;
        }
        traj.picard_iterations += iters + 1;
        traj.picard_residual = std::max(traj.picard_residual, resid);
        for (std::size_t f = 1; f < nt; ++f) {
            DensityField rec = v.frames[f];
            rec.time = t0 + f * v.dt;
            double frac = rec.time / dt_record;
            bool on_record = std::fabs(frac - std::round(frac)) < 1e-9 ||
                             f == nt - 1;
            if (on_record) {
                check_bounds_or_throw(rec, rho0, reg, bound_tol);
                traj.snapshots.push_back(rec);
            }
        }
        start = v.frames.back();
        t0 += span;
    }
    return traj;
}

FixedPointResult solve_kirkwood_monroe(const ScalingRegime& reg, const Potential& p,
                                       const DensityField& init, double tol, int max_iter) {
    FixedPointResult res;
    res.rho = init;
    for (res.iterations = 0; res.iterations < max_iter; ++res.iterations) {
        DensityField conv = convolve(res.rho, p);
        double diff = 0.0;
        for (int i = 0; i < init.grid.points; ++i) {
            double next = reg.z * std::exp(-conv.values[i]);
            diff = std::max(diff, std::fabs(next - res.rho.values[i]));
            res.rho.values[i] = next;
        }
        res.residual = diff;
        if (diff < tol) {
            res.converged = true;
            ++res.iterations;
            break;
        }
    }
    // report the genuine fixed-point defect of the returned iterate
    DensityField conv = convolve(res.rho, p);
    double defect = 0.0;
    for (int i = 0; i < init.grid.points; ++i)
        defect = std::max(defect,
                          std::fabs(res.rho.values[i] - reg.z * std::exp(-conv.values[i])));
    res.residual = defect;
    res.converged = defect <= tol;
    return res;
}

double homogeneous_root(double z, double beta, double tol) {
    if (z == 0.0) return 0.0;
    double lo = 0.0, hi = z; // r = z e^{-beta r} <= z
    auto f = [&](double r) { return r - z * std::exp(-beta * r); };
    if (f(hi) < 0.0) hi = z + 1.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

BoundReport verify_apriori_bounds(const Trajectory& traj, const ScalingRegime& reg,
                                  double tol) {
    BoundReport rep;
    if (traj.snapshots.empty()) return rep;
    const DensityField& rho0 = traj.snapshots.front();
    double cap = reg.alpha * reg.c;
    bool init_capped = rho0.max() <= cap;
    for (const auto& f : traj.snapshots) {
        double et = std::exp(-f.time);
        double zpart = reg.z * (1.0 - et);
        double low = 0.0, high = 0.0;
        for (int i = 0; i < f.grid.points; ++i) {
            double v = f.values[i];
            low = std::max(low, -v);
            double envelope = et * rho0.values[i] + zpart;
            if (init_capped) envelope = std::min(envelope, cap);
            high = std::max(high, v - envelope);
        }
        rep.times.push_back(f.time);
        rep.max_low_violation.push_back(std::max(0.0, low));
        rep.max_high_violation.push_back(std::max(0.0, high));
        rep.worst = std::max({rep.worst, low, high});
    }
    rep.pass = rep.worst <= tol;
    return rep;
}

} // namespace gvlab
