#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/lp_calculus.hpp"
#include "gvlab/vlasov.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gvlab;

namespace {
const GridSpec kSmall{8, 10.0};

GridFunctionFamily random_k(int seed, double bound, const GridSpec& grid = kSmall) {
    Rng rng(seed);
    return random_family_sup_scaled(grid, 3, bound, rng);
}

double truncated_exp(double x, int orders) {
    double acc = 0.0, term = 1.0;
    for (int p = 0; p <= orders; ++p) {
        if (p > 0) term *= x / p;
        acc += term;
    }
    return acc;
}
} // namespace

TEST_CASE("dual steps match the direct-quadrature oracle") {
    Potential p = fixture::potential();
    for (int mpts : {6, 8}) {
        GridSpec grid{mpts, 10.0};
        ScalingRegime reg = fixture::regime(p, mpts);
        GridFunctionFamily k = random_k(21 + mpts, reg.alpha * reg.c, grid);
        for (double d : {0.5, 0.1}) {
            for (double e : {1.0, 0.1}) {
                reg.delta = d;
                reg.eps = e;
                for (int xi_max : {0, 1, 2}) {
                    INFO("m=" << mpts << " delta=" << d << " eps=" << e
                              << " xi_max=" << xi_max);
                    GridFunctionFamily fq = vlasov_step_dual(k, reg, p, xi_max);
                    GridFunctionFamily sq = oracle::naive_step_dual(k, reg, p, xi_max, false);
                    REQUIRE(oracle::max_abs_diff(fq, sq) < 1e-12);
                    GridFunctionFamily fp = rescaled_step_dual(k, reg, p, xi_max);
                    GridFunctionFamily sp = oracle::naive_step_dual(k, reg, p, xi_max, true);
                    REQUIRE(oracle::max_abs_diff(fp, sp) < 1e-12);
                }
            }
        }
    }
}

TEST_CASE("dual generators match the direct-quadrature oracle") {
    Potential p = fixture::potential();
    GridSpec grid{8, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    GridFunctionFamily k = random_k(23, reg.alpha * reg.c, grid);
    for (double e : {1.0, 0.2}) {
        reg.eps = e;
        for (int xi_max : {1, 2}) {
            GridFunctionFamily fv = apply_vlasov_generator_dual(k, reg, p, xi_max);
            GridFunctionFamily sv = oracle::naive_generator_dual(k, reg, p, xi_max, false);
            REQUIRE(oracle::max_abs_diff(fv, sv) < 1e-12);
            GridFunctionFamily fr = apply_rescaled_generator_dual(k, reg, p, xi_max);
            GridFunctionFamily sr = oracle::naive_generator_dual(k, reg, p, xi_max, true);
            REQUIRE(oracle::max_abs_diff(fr, sr) < 1e-12);
        }
    }
}

TEST_CASE("dual step keeps the empty-configuration value") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    reg.delta = 0.3;
    GridFunctionFamily k = random_k(25, reg.alpha * reg.c);
    REQUIRE(vlasov_step_dual(k, reg, p, 2).scalar() == Catch::Approx(k.scalar()).margin(1e-15));
    REQUIRE(rescaled_step_dual(k, reg, p, 2).scalar() ==
            Catch::Approx(k.scalar()).margin(1e-15));
}

TEST_CASE("dual step on constant product states: truncated binomial closed form") {
    Potential p = fixture::potential();
    GridSpec grid{16, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    PotentialConstants pc = compute_constants(p, grid.points);
    double r = 0.4;
    GridFunctionFamily k = e_lambda(grid, 3, [&](double) { return r; });
    for (double d : {0.5, 0.2, 0.05}) {
        reg.delta = d;
        GridFunctionFamily out = vlasov_step_dual(k, reg, p, 2);
        for (int n = 0; n <= 3; ++n) {
            // sum over omega subsets: the xi-series is a truncated exponential
            // whose order is capped by both xi_max and the stored levels
            double expect = 0.0;
            for (int o = 0; o <= n; ++o) {
                double comb = 1.0;
                for (int i = 0; i < o; ++i) comb = comb * (n - i) / (i + 1);
                int cap = std::min(2, 3 - (n - o));
                expect += comb * std::pow((1.0 - d) * r, n - o) *
                          std::pow(reg.z * d, o) * truncated_exp(-r * pc.beta * o, cap);
            }
            for (double v : out.level(n))
                REQUIRE(v == Catch::Approx(expect).margin(1e-13));
        }
    }
}

TEST_CASE("euler step identity: level one equals the truncated scalar recursion") {
    Potential p = fixture::potential();
    GridSpec grid{16, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    PotentialConstants pc = compute_constants(p, grid.points);
    double r = 0.3, d = 0.1;
    reg.delta = d;
    GridFunctionFamily k = e_lambda(grid, 1, [&](double) { return r; });
    GridFunctionFamily out = vlasov_step_dual(k, reg, p, 2);
    // with levels capped at one the xi-series at o=1 keeps orders <= min(2, 1)
    double expect = (1.0 - d) * r + reg.z * d * truncated_exp(-r * pc.beta, 1);
    for (double v : out.level(1)) REQUIRE(v == Catch::Approx(expect).margin(1e-14));

    // at the full desk truncation the recursion uses the depth-2 exponential
    GridFunctionFamily k3 = e_lambda(grid, 3, [&](double) { return r; });
    GridFunctionFamily out3 = vlasov_step_dual(k3, reg, p, 2);
    double expect3 = (1.0 - d) * r + reg.z * d * truncated_exp(-r * pc.beta, 2);
    for (double v : out3.level(1)) REQUIRE(v == Catch::Approx(expect3).margin(1e-14));
    // and it approximates the untruncated explicit Euler map within the tail
    double euler = (1.0 - d) * r + reg.z * d * std::exp(-r * pc.beta);
    double tail = reg.z * d * (std::exp(r * pc.beta) - truncated_exp(r * pc.beta, 2));
    REQUIRE(std::fabs(expect3 - euler) <= tail);
}

TEST_CASE("dual one-step gap scales like eps delta") {
    Potential p = fixture::potential();
    GridSpec grid{12, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    GridFunctionFamily k = random_k(29, reg.alpha * reg.c, grid);
    double kn = norm_kc(k, reg.alpha * reg.c);
    double rmin = 1e300, rmax = 0.0;
    for (double d : {0.1, 0.05})
        for (double e : {0.2, 0.1, 0.05}) {
            reg.delta = d;
            reg.eps = e;
            double gap = norm_kc(rescaled_step_dual(k, reg, p, 2) -
                                     vlasov_step_dual(k, reg, p, 2),
                                 reg.c);
            double ratio = gap / (e * d * kn);
            rmin = std::min(rmin, ratio);
            rmax = std::max(rmax, ratio);
        }
    REQUIRE(rmax / rmin <= 3.0);
}

TEST_CASE("dual step is a weighted-sup contraction up to the truncation tail") {
    Potential p = fixture::potential();
    GridSpec grid{12, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    REQUIRE(reg.alpha_ok());
    Rng rng(31);
    double ac = reg.alpha * reg.c;
    for (int rep = 0; rep < 6; ++rep) {
        GridFunctionFamily k = random_family_sup_scaled(grid, 3, ac, rng);
        double base = norm_kc(k, ac);
        for (double d : {0.4, 0.1}) {
            reg.delta = d;
            double tau = tau_trunc_dual(k, reg, 2, ac);
            REQUIRE(norm_kc(vlasov_step_dual(k, reg, p, 2), ac) <= base + tau);
            REQUIRE(norm_kc(rescaled_step_dual(k, reg, p, 2), ac) <= base + tau);
        }
    }
}

TEST_CASE("dual truncation tail bound dominates the dropped xi order") {
    Potential p = fixture::potential();
    GridSpec grid{10, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    reg.delta = 0.3;
    GridFunctionFamily k = random_k(33, reg.alpha * reg.c, grid);
    GridFunctionFamily full = vlasov_step_dual(k, reg, p, 2);
    GridFunctionFamily cut = vlasov_step_dual(k, reg, p, 1);
    double dropped = norm_kc(full - cut, reg.c);
    REQUIRE(dropped <= tau_trunc_dual(k, reg, 1, reg.c));
}

TEST_CASE("dual limiting generator: indicator and chaos-structure identity") {
    Potential p = fixture::potential();
    GridSpec grid{16, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    GridFunctionFamily ind = indicator_empty(grid, 3);
    GridFunctionFamily out = apply_vlasov_generator_dual(ind, reg, p, 2);
    REQUIRE(out.scalar() == 0.0);
    for (double v : out.level(1)) REQUIRE(v == Catch::Approx(reg.z).margin(1e-15));
    for (double v : out.level(2)) REQUIRE(v == 0.0);
    for (double v : out.level(3)) REQUIRE(v == 0.0);

    // product state: out(eta) = sum_x e(rho, eta \ x) [-rho(x) + z E_trunc(-(rho*phi)(x))]
    DensityField rho(grid);
    for (int i = 0; i < grid.points; ++i)
        rho.values[i] = 0.2 + 0.08 * std::cos(2.0 * M_PI * grid.node(i) / 10.0);
    GridFunctionFamily k = e_lambda(grid, 3, rho.values);
    GridFunctionFamily lhs = apply_vlasov_generator_dual(k, reg, p, 2);
    DensityField conv = convolve(rho, p);
    // level 1: -rho(x) + z * truncated exponential of the convolution
    for (int i = 0; i < grid.points; ++i) {
        double expect = -rho.values[i] + reg.z * truncated_exp(-conv.values[i], 2);
        REQUIRE(lhs.level(1)[i] == Catch::Approx(expect).margin(1e-13));
    }
    // level 2 against the assembled right side, allowing the deeper-level cap
    for (int i : {1, 7})
        for (int j : {4, 11}) {
            double e1 = -rho.values[i] + reg.z * truncated_exp(-conv.values[i], 1);
            double e2 = -rho.values[j] + reg.z * truncated_exp(-conv.values[j], 1);
            double expect = rho.values[j] * e1 + rho.values[i] * e2;
            REQUIRE(lhs.level(2)[i * grid.points + j] ==
                    Catch::Approx(expect).margin(1e-13));
        }
}

TEST_CASE("stationary density annihilates the dual limiting generator") {
    Potential p = fixture::potential();
    GridSpec grid{32, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    PotentialConstants pc = compute_constants(p, grid.points);
    DensityField init(grid, reg.z);
    FixedPointResult km = solve_kirkwood_monroe(reg, p, init, 1e-14, 300);
    REQUIRE(km.converged);
    GridFunctionFamily k = e_lambda(grid, 3, km.rho.values);
    GridFunctionFamily out = apply_vlasov_generator_dual(k, reg, p, 2);
    // residual is only the truncated-exponential tail of the xi-series
    double conv_scale = pc.beta * km.rho.max();
    double tail = reg.z * (std::exp(conv_scale) - truncated_exp(conv_scale, 1)) * 3.0;
    for (int n = 0; n <= 3; ++n)
        for (double v : out.level(n)) REQUIRE(std::fabs(v) <= tail);
}

TEST_CASE("rescaled dual generator: flat kernel reduction and eps slope") {
    Potential flat = fixture::potential(10.0, 0.0);
    Potential p = fixture::potential();
    GridSpec grid{10, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    GridFunctionFamily k = random_k(35, reg.alpha * reg.c, grid);
    REQUIRE(oracle::max_abs_diff(apply_rescaled_generator_dual(k, reg, flat, 2),
                                 apply_vlasov_generator_dual(k, reg, flat, 2)) < 1e-13);

    GridFunctionFamily limit = apply_vlasov_generator_dual(k, reg, p, 2);
    std::vector<double> epss = {0.2, 0.1, 0.05}, gaps;
    for (double e : epss) {
        reg.eps = e;
        gaps.push_back(norm_kc(apply_rescaled_generator_dual(k, reg, p, 2) - limit, reg.c));
    }
    REQUIRE(gaps[1] / gaps[0] == Catch::Approx(0.5).margin(0.1));
    REQUIRE(gaps[2] / gaps[1] == Catch::Approx(0.5).margin(0.1));
}
