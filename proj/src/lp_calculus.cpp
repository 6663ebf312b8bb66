#include "gvlab/lp_calculus.hpp"

#include <cmath>
#include <stdexcept>

namespace gvlab {

void NormParams::validate() const {
    if (!(c > 1.0)) throw std::invalid_argument("NormParams: c must be > 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("NormParams: alpha must be in (0,1)");
}

double lp_exponent(const std::function<double(double)>& f, const Configuration& eta) {
    double prod = 1.0;
    for (double x : eta.points()) prod *= f(x);
    return prod;
}

double lp_integral(const GridFunctionFamily& f, std::optional<double> level_weight) {
    double h = f.grid_step();
    double total = 0.0, fact = 1.0, hn = 1.0, wn = 1.0;
    for (int n = 0; n <= f.n_max(); ++n) {
        if (n > 0) {
            fact *= n;
            hn *= h;
            if (level_weight) wn *= *level_weight;
        }
        double sum = 0.0;
        for (double v : f.level(n)) sum += v;
        total += wn / fact * hn * sum;
    }
    return total;
}

double k_transform(const std::function<double(const Configuration&)>& g,
                   const Configuration& gamma) {
    if (gamma.size() > 25) throw std::invalid_argument("k_transform: |gamma| > 25 is infeasible");
    double sum = 0.0;
    unsigned full = 1u << gamma.size();
    for (unsigned mask = 0; mask < full; ++mask) sum += g(gamma.subset(mask));
    return sum;
}

double k_inverse(const std::function<double(const Configuration&)>& f,
                 const Configuration& eta) {
    if (eta.size() > 25) throw std::invalid_argument("k_inverse: |eta| > 25 is infeasible");
    double sum = 0.0;
    unsigned full = 1u << eta.size();
    for (unsigned mask = 0; mask < full; ++mask) {
        int removed = static_cast<int>(eta.size()) - __builtin_popcount(mask);
        double sign = (removed % 2 == 0) ? 1.0 : -1.0;
        sum += sign * f(eta.subset(mask));
    }
    return sum;
}

double norm_lc(const GridFunctionFamily& g, double c) {
    return norm_lc_weighted(g, c, [](int) { return 1.0; });
}

double norm_lc_weighted(const GridFunctionFamily& g, double c,
                        const std::function<double(int)>& weight) {
    double h = g.grid_step();
    double total = 0.0, fact = 1.0, cn = 1.0, hn = 1.0;
    for (int n = 0; n <= g.n_max(); ++n) {
        if (n > 0) {
            fact *= n;
            cn *= c;
            hn *= h;
        }
        double sum = 0.0;
        for (double v : g.level(n)) sum += std::fabs(v);
        total += weight(n) * cn / fact * hn * sum;
    }
    return total;
}

double norm_kc(const GridFunctionFamily& k, double c) {
    double worst = 0.0, cn = 1.0;
    for (int n = 0; n <= k.n_max(); ++n) {
        if (n > 0) cn *= c;
        double sup = 0.0;
        for (double v : k.level(n)) sup = std::max(sup, std::fabs(v));
        worst = std::max(worst, sup / cn);
    }
    return worst;
}

namespace {

/// Iterate tuples of length n over grid nodes, calling fn(points).
template <typename Fn>
void for_each_point_tuple(const GridSpec& grid, int n, Fn&& fn) {
    std::vector<int> idx(n, 0);
    std::vector<double> pts(n, 0.0);
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= grid.points;
    for (std::size_t flat = 0; flat < total; ++flat) {
        std::size_t rest = flat;
        for (int i = n - 1; i >= 0; --i) {
            idx[i] = rest % grid.points;
            pts[i] = grid.node(idx[i]);
            rest /= grid.points;
        }
        fn(pts);
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

double minlos_identity_residual(
    const std::function<double(const std::vector<double>&, const std::vector<double>&,
                               const std::vector<double>&)>& h,
    const GridSpec& grid, int n_max) {
    double step = grid.step();

    // lhs: integral over one configuration, summed over all splits.
    double lhs = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        double level_sum = 0.0;
        for_each_point_tuple(grid, n, [&](const std::vector<double>& pts) {
            unsigned full = 1u << n;
            for (unsigned mask = 0; mask < full; ++mask) {
                std::vector<double> xi, rest;
                for (int i = 0; i < n; ++i)
                    ((mask >> i) & 1u ? xi : rest).push_back(pts[i]);
                level_sum += h(xi, rest, pts);
            }
        });
        lhs += std::pow(step, n) / factorial(n) * level_sum;
    }

    // rhs: independent pair of configurations, each capped at n_max points.
    double rhs = 0.0;
    for (int p = 0; p <= n_max; ++p) {
        for (int q = 0; q <= n_max; ++q) {
            double pair_sum = 0.0;
            for_each_point_tuple(grid, p, [&](const std::vector<double>& xi) {
                for_each_point_tuple(grid, q, [&](const std::vector<double>& eta) {
                    std::vector<double> both = eta;
                    both.insert(both.end(), xi.begin(), xi.end());
                    pair_sum += h(xi, eta, both);
                });
            });
            rhs += std::pow(step, p + q) / (factorial(p) * factorial(q)) * pair_sum;
        }
    }
    return std::fabs(lhs - rhs);
}

GridFunctionFamily rescale_singularity(const GridFunctionFamily& k, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("rescale_singularity: eps must be positive");
    GridFunctionFamily out = k;
    double en = 1.0;
    for (int n = 1; n <= k.n_max(); ++n) {
        en *= eps;
        for (double& v : out.level(n)) v *= en;
    }
    return out;
}

} // namespace gvlab
