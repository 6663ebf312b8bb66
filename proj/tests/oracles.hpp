#pragma once

// Independent reference implementations used as oracles. Everything here is
// written directly from the defining formulas with plain nested loops: no
// banding, no precomputed tables, no shared code with the library's operator
// paths. Small grids only.

#include <cmath>
#include <functional>
#include <vector>

#include "gvlab/family.hpp"
#include "gvlab/potential.hpp"
#include "gvlab/regime.hpp"

namespace oracle {

using gvlab::GridFunctionFamily;
using gvlab::GridSpec;
using gvlab::Potential;
using gvlab::ScalingRegime;

/// All index tuples of length n over [0, M).
inline std::vector<std::vector<int>> all_tuples(int m, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(n, 0);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= m;
    for (std::size_t f = 0; f < total; ++f) {
        std::size_t rest = f;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = static_cast<int>(rest % m);
            rest /= m;
        }
        out.push_back(idx);
    }
    return out;
}

inline double family_at(const GridFunctionFamily& g, std::vector<int> pts) {
    if (static_cast<int>(pts.size()) > g.n_max()) return 0.0;
    return g.level(pts.size())[g.index(pts)];
}

inline double phi_at(const Potential& pot, const GridSpec& grid, int i, int j) {
    return gvlab::eval_potential(pot, (i - j) * grid.step());
}

/// Direct evaluation of the limiting or rescaled generator.
inline GridFunctionFamily naive_generator(const GridFunctionFamily& g,
                                          const ScalingRegime& reg, const Potential& pot,
                                          bool rescaled) {
    const GridSpec grid = g.grid();
    const int m = grid.points;
    const double h = grid.step(), eps = reg.eps;
    GridFunctionFamily out(grid, g.n_max());
    for (int n = 0; n <= g.n_max(); ++n) {
        for (auto& eta : all_tuples(m, n)) {
            double acc = -double(n) * family_at(g, eta);
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<int> xi, ys;
                for (int a = 0; a < n; ++a)
                    ((mask >> a) & 1u ? xi : ys).push_back(eta[a]);
                double integral = 0.0;
                for (int s = 0; s < m; ++s) {
                    std::vector<int> arg = xi;
                    arg.push_back(s);
                    double val = family_at(g, arg);
                    if (val == 0.0) continue;
                    double weight = 1.0;
                    for (int u : xi)
                        weight *= rescaled ? std::exp(-eps * phi_at(pot, grid, s, u)) : 1.0;
                    for (int y : ys)
                        weight *= rescaled
                                      ? (std::exp(-eps * phi_at(pot, grid, s, y)) - 1.0) / eps
                                      : -phi_at(pot, grid, s, y);
                    integral += val * weight;
                }
                acc += reg.z * h * integral;
            }
            out.level(n)[out.index(eta)] = acc;
        }
    }
    return out;
}

/// Direct evaluation of the contraction steps.
inline GridFunctionFamily naive_step(const GridFunctionFamily& g, const ScalingRegime& reg,
                                     const Potential& pot, int omega_max, bool rescaled) {
    const GridSpec grid = g.grid();
    const int m = grid.points;
    const double h = grid.step(), eps = reg.eps, d = reg.delta, z = reg.z;
    GridFunctionFamily out(grid, g.n_max());
    for (int n = 0; n <= g.n_max(); ++n) {
        for (auto& eta : all_tuples(m, n)) {
            double acc = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<int> xi, ys;
                for (int a = 0; a < n; ++a)
                    ((mask >> a) & 1u ? xi : ys).push_back(eta[a]);
                double coef = std::pow(1.0 - d, double(xi.size()));
                int top = std::min<int>(omega_max, g.n_max() - static_cast<int>(xi.size()));
                for (int order = 0; order <= top; ++order) {
                    if (order == 0) {
                        if (ys.empty()) acc += coef * family_at(g, xi);
                        continue;
                    }
                    double fact = 1.0;
                    for (int r = 2; r <= order; ++r) fact *= r;
                    double integral = 0.0;
                    for (auto& omega : all_tuples(m, order)) {
                        std::vector<int> arg = xi;
                        for (int w : omega) arg.push_back(w);
                        double val = family_at(g, arg);
                        if (val == 0.0) continue;
                        double weight = 1.0;
                        if (rescaled) {
                            for (int u : xi)
                                for (int w : omega)
                                    weight *= std::exp(-eps * phi_at(pot, grid, u, w));
                            for (int y : ys) {
                                double prod = 1.0;
                                for (int w : omega)
                                    prod *= std::exp(-eps * phi_at(pot, grid, y, w));
                                weight *= (prod - 1.0) / eps;
                            }
                        } else {
                            for (int y : ys) {
                                double e = 0.0;
                                for (int w : omega) e += phi_at(pot, grid, y, w);
                                weight *= -e;
                            }
                        }
                        integral += val * weight;
                    }
                    acc += coef * std::pow(z * d, order) * std::pow(h, order) / fact * integral;
                }
            }
            out.level(n)[out.index(eta)] = acc;
        }
    }
    return out;
}

/// Direct evaluation of the dual steps.
inline GridFunctionFamily naive_step_dual(const GridFunctionFamily& k,
                                          const ScalingRegime& reg, const Potential& pot,
                                          int xi_max, bool rescaled) {
    const GridSpec grid = k.grid();
    const int m = grid.points;
    const double h = grid.step(), eps = reg.eps, d = reg.delta, z = reg.z;
    GridFunctionFamily out(grid, k.n_max());
    for (int n = 0; n <= k.n_max(); ++n) {
        for (auto& eta : all_tuples(m, n)) {
            double acc = 0.0;
            for (unsigned mask = 0; mask < (1u << n); ++mask) {
                std::vector<int> omega, rest;
                for (int a = 0; a < n; ++a)
                    ((mask >> a) & 1u ? omega : rest).push_back(eta[a]);
                double coef = std::pow(1.0 - d, double(rest.size())) *
                              std::pow(z * d, double(omega.size()));
                double outer = 1.0;
                if (rescaled)
                    for (int y : rest)
                        for (int w : omega) outer *= std::exp(-eps * phi_at(pot, grid, w, y));
                int top = std::min<int>(xi_max, k.n_max() - static_cast<int>(rest.size()));
                double series = 0.0;
                for (int p = 0; p <= top; ++p) {
                    double fact = 1.0;
                    for (int r = 2; r <= p; ++r) fact *= r;
                    double integral = 0.0;
                    for (auto& s_pts : all_tuples(m, p)) {
                        std::vector<int> arg = s_pts;
                        for (int y : rest) arg.push_back(y);
                        double val = family_at(k, arg);
                        if (val == 0.0) continue;
                        double weight = 1.0;
                        for (int s : s_pts) {
                            if (rescaled) {
                                double prod = 1.0;
                                for (int w : omega)
                                    prod *= std::exp(-eps * phi_at(pot, grid, s, w));
                                weight *= (prod - 1.0) / eps;
                            } else {
                                double e = 0.0;
                                for (int w : omega) e += phi_at(pot, grid, s, w);
                                weight *= -e;
                            }
                        }
                        integral += val * weight;
                    }
                    series += std::pow(h, p) / fact * integral;
                }
                acc += coef * outer * series;
            }
            out.level(n)[out.index(eta)] = acc;
        }
    }
    return out;
}

/// Direct evaluation of the dual generators.
inline GridFunctionFamily naive_generator_dual(const GridFunctionFamily& k,
                                               const ScalingRegime& reg, const Potential& pot,
                                               int xi_max, bool rescaled) {
    const GridSpec grid = k.grid();
    const int m = grid.points;
    const double h = grid.step(), eps = reg.eps, z = reg.z;
    GridFunctionFamily out(grid, k.n_max());
    for (int n = 0; n <= k.n_max(); ++n) {
        for (auto& eta : all_tuples(m, n)) {
            double acc = -double(n) * family_at(k, eta);
            for (int xpos = 0; xpos < n; ++xpos) {
                int x = eta[xpos];
                std::vector<int> rest;
                for (int a = 0; a < n; ++a)
                    if (a != xpos) rest.push_back(eta[a]);
                double outer = 1.0;
                if (rescaled)
                    for (int y : rest) outer *= std::exp(-eps * phi_at(pot, grid, x, y));
                int top = std::min<int>(xi_max, k.n_max() - static_cast<int>(rest.size()));
                double series = 0.0;
                for (int p = 0; p <= top; ++p) {
                    double fact = 1.0;
                    for (int r = 2; r <= p; ++r) fact *= r;
                    double integral = 0.0;
                    for (auto& s_pts : all_tuples(m, p)) {
                        std::vector<int> arg = s_pts;
                        for (int y : rest) arg.push_back(y);
                        double val = family_at(k, arg);
                        if (val == 0.0) continue;
                        double weight = 1.0;
                        for (int s : s_pts)
                            weight *= rescaled
                                          ? (std::exp(-eps * phi_at(pot, grid, s, x)) - 1.0) / eps
                                          : -phi_at(pot, grid, s, x);
                        integral += val * weight;
                    }
                    series += std::pow(h, p) / fact * integral;
                }
                acc += z * outer * series;
            }
            out.level(n)[out.index(eta)] = acc;
        }
    }
    return out;
}

inline double max_abs_diff(const GridFunctionFamily& a, const GridFunctionFamily& b) {
    double worst = 0.0;
    for (int n = 0; n <= a.n_max(); ++n)
        for (std::size_t i = 0; i < a.level(n).size(); ++i)
            worst = std::max(worst, std::fabs(a.level(n)[i] - b.level(n)[i]));
    return worst;
}

/// Adaptive Simpson quadrature (for kernel-constant oracles).
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol, int depth = 24) {
    auto simpson = [&](double lo, double hi) {
        double mid = 0.5 * (lo + hi);
        return (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    };
    std::function<double(double, double, double, int)> rec =
        [&](double lo, double hi, double whole, int d) -> double {
        double mid = 0.5 * (lo + hi);
        double left = simpson(lo, mid), right = simpson(mid, hi);
        if (d <= 0 || std::fabs(left + right - whole) < 15.0 * tol)
            return left + right + (left + right - whole) / 15.0;
        return rec(lo, mid, left, d - 1) + rec(mid, hi, right, d - 1);
    };
    return rec(a, b, simpson(a, b), depth);
}

/// Cash-Karp embedded Runge-Kutta for scalar initial value problems.
inline double rk45_scalar(const std::function<double(double, double)>& f, double y0,
                          double t_end, double tol = 1e-12) {
    double t = 0.0, y = y0, dt = 1e-3;
    while (t < t_end) {
        dt = std::min(dt, t_end - t);
        double k1 = f(t, y);
        double k2 = f(t + dt / 5.0, y + dt * k1 / 5.0);
        double k3 = f(t + 0.3 * dt, y + dt * (3.0 * k1 + 9.0 * k2) / 40.0);
        double k4 = f(t + 0.6 * dt, y + dt * (0.3 * k1 - 0.9 * k2 + 1.2 * k3));
        double k5 = f(t + dt, y + dt * (-11.0 / 54.0 * k1 + 2.5 * k2 - 70.0 / 27.0 * k3 +
                                        35.0 / 27.0 * k4));
        double k6 = f(t + 7.0 / 8.0 * dt,
                      y + dt * (1631.0 / 55296.0 * k1 + 175.0 / 512.0 * k2 +
                                575.0 / 13824.0 * k3 + 44275.0 / 110592.0 * k4 +
                                253.0 / 4096.0 * k5));
        double y5 = y + dt * (37.0 / 378.0 * k1 + 250.0 / 621.0 * k3 + 125.0 / 594.0 * k4 +
                              512.0 / 1771.0 * k6);
        double y4 = y + dt * (2825.0 / 27648.0 * k1 + 18575.0 / 48384.0 * k3 +
                              13525.0 / 55296.0 * k4 + 277.0 / 14336.0 * k5 + 0.25 * k6);
        double err = std::fabs(y5 - y4);
        if (err <= tol * std::max(1.0, std::fabs(y)) || dt < 1e-12) {
            t += dt;
            y = y5;
        }
        double scale = err > 0.0 ? 0.9 * std::pow(tol * std::max(1.0, std::fabs(y)) / err, 0.2)
                                 : 2.0;
        dt *= std::min(2.0, std::max(0.2, scale));
    }
    return y;
}

} // namespace oracle
