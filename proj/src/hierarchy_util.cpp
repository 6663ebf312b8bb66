#include <cmath>
#include <stdexcept>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/lp_calculus.hpp"

namespace gvlab {

GridFunctionFamily evolve_quasi_observable(const GridFunctionFamily& g, double t, int n_steps,
                                           Evolution which, const ScalingRegime& reg,
                                           const Potential& pot, int omega_max) {
    if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
    if (t == 0.0) return g;
    if (n_steps < 1) throw std::invalid_argument("evolve: n_steps must be >= 1");
    ScalingRegime step_reg = reg;
    step_reg.delta = t / n_steps;
    if (!(step_reg.delta < 1.0))
        throw std::invalid_argument("evolve: t/n_steps must be < 1");
    GridFunctionFamily cur = g;
    for (int s = 0; s < n_steps; ++s)
        cur = which == Evolution::vlasov ? vlasov_step(cur, step_reg, pot, omega_max)
                                         : rescaled_step(cur, step_reg, pot, omega_max);
    return cur;
}

GridFunctionFamily evolve_correlation(const GridFunctionFamily& k, double t, int n_steps,
                                      Evolution which, const ScalingRegime& reg,
                                      const Potential& pot, int xi_max) {
    if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
    if (t == 0.0) return k;
    if (n_steps < 1) throw std::invalid_argument("evolve: n_steps must be >= 1");
    ScalingRegime step_reg = reg;
    step_reg.delta = t / n_steps;
    if (!(step_reg.delta < 1.0))
        throw std::invalid_argument("evolve: t/n_steps must be < 1");
    GridFunctionFamily cur = k;
    for (int s = 0; s < n_steps; ++s)
        cur = which == Evolution::vlasov ? vlasov_step_dual(cur, step_reg, pot, xi_max)
                                         : rescaled_step_dual(cur, step_reg, pot, xi_max);
    return cur;
}

double generator_residual(const GridFunctionFamily& g, const ScalingRegime& reg,
                          const Potential& pot, Evolution which, int omega_max) {
    GridFunctionFamily stepped = which == Evolution::vlasov
                                     ? vlasov_step(g, reg, pot, omega_max)
                                     : rescaled_step(g, reg, pot, omega_max);
    GridFunctionFamily gen = which == Evolution::vlasov ? apply_vlasov_generator(g, reg, pot)
                                                        : apply_rescaled_generator(g, reg, pot);
    GridFunctionFamily resid = (1.0 / reg.delta) * (stepped - g) - gen;
    return norm_lc(resid, reg.c);
}

double contraction_power_gap(
    const std::function<GridFunctionFamily(const GridFunctionFamily&)>& apply_a,
    const std::function<GridFunctionFamily(const GridFunctionFamily&)>& apply_b,
    const GridFunctionFamily& f, int m,
    const std::function<double(const GridFunctionFamily&)>& norm) {
    GridFunctionFamily fa = f, fb = f;
    for (int s = 0; s < m; ++s) {
        fa = apply_a(fa);
        fb = apply_b(fb);
    }
    return norm(fa - fb);
}

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

} // namespace

double tau_trunc_primal(const GridFunctionFamily& g, const ScalingRegime& reg, int omega_max) {
    // Neglected omega orders m > omega_max, with |survivor weights| <= E and
    // the eta-integral bounded level by level through the exponential moment
    // formula; the output-side sum stops at n_max because so does the norm.
    const int n_max = g.n_max();
    const double h = g.grid_step();
    std::vector<double> mass(n_max + 1, 0.0); // integral of |G^(p)|
    for (int p = 0; p <= n_max; ++p) {
        double s = 0.0;
        for (double v : g.level(p)) s += std::fabs(v);
        mass[p] = s * std::pow(h, p);
    }
    double tau = 0.0;
    for (int m = omega_max + 1; m <= n_max; ++m) {
        for (int j = 0; j + m <= n_max; ++j) {
            double eta_side = 0.0;
            double cmb = reg.c * m * reg.beta, term = 1.0;
            for (int q = 0; q <= n_max - j; ++q) {
                if (q > 0) term *= cmb / q;
                eta_side += term;
            }
            tau += std::pow(1.0 - reg.delta, j) * std::pow(reg.z * reg.delta, m) *
                   std::pow(reg.c, j) / (factorial(j) * factorial(m)) * mass[j + m] * eta_side;
        }
    }
    return tau;
}

double tau_trunc_dual(const GridFunctionFamily& k, const ScalingRegime& reg, int xi_max,
                      double target_c) {
    const int n_max = k.n_max();
    const double ac = reg.alpha * reg.c;
    double kn = norm_kc(k, ac);
    double worst = 0.0;
    for (int n = 0; n <= n_max; ++n) {
        double level_bound = 0.0;
        for (int o = 0; o <= n; ++o) {
            double comb = factorial(n) / (factorial(o) * factorial(n - o));
            double tail = 0.0;
            double acbo = ac * reg.beta * o, term = 1.0;
            for (int p = 1; p <= n_max - n + o; ++p) {
                term *= acbo / p;
                if (p > xi_max) tail += term;
            }
            level_bound += comb * std::pow(1.0 - reg.delta, n - o) *
                           std::pow(reg.z * reg.delta / ac, o) * tail;
        }
        worst = std::max(worst, std::pow(ac / target_c, n) * level_bound);
    }
    return kn * worst;
}

} // namespace gvlab
