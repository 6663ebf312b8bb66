#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/lp_calculus.hpp"
#include "gvlab/parallel.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gvlab;

namespace {
const GridSpec kSmall{8, 10.0};

GridFunctionFamily random_g(int seed, const GridSpec& grid = kSmall, int n_max = 3) {
    Rng rng(seed);
    return random_family_balanced(grid, n_max, 1.2, rng);
}
} // namespace

TEST_CASE("limiting generator on the empty-configuration indicator") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    GridFunctionFamily out = apply_vlasov_generator(indicator_empty(kSmall, 3), reg, p);
    for (int n = 0; n <= 3; ++n)
        for (double v : out.level(n)) REQUIRE(v == 0.0);
}

TEST_CASE("limiting generator on the singleton indicator: closed-form levels") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    PotentialConstants pc = compute_constants(p, kSmall.points);
    GridFunctionFamily out = apply_vlasov_generator(indicator_singletons(kSmall, 3), reg, p);
    REQUIRE(out.scalar() == Catch::Approx(reg.z * 10.0).epsilon(1e-13));
    for (double v : out.level(1))
        REQUIRE(v == Catch::Approx(-1.0 - reg.z * pc.beta).epsilon(1e-12));
    // level 2 at (i,j): z * h * sum_s phi(s-i) phi(s-j); spot check vs direct sum
    double h = kSmall.step();
    for (int i : {0, 3}) {
        for (int j : {2, 6}) {
            double ref = 0.0;
            for (int s = 0; s < kSmall.points; ++s)
                ref += eval_potential(p, (s - i) * h) * eval_potential(p, (s - j) * h);
            ref *= reg.z * h;
            REQUIRE(out.level(2)[i * kSmall.points + j] == Catch::Approx(ref).margin(1e-14));
        }
    }
}

TEST_CASE("generators match the direct-quadrature oracle on random data") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    for (int seed : {1, 2}) {
        GridFunctionFamily g = random_g(seed);
        for (double eps : {1.0, 0.2, 1e-3}) {
            reg.eps = eps;
            GridFunctionFamily fast = apply_rescaled_generator(g, reg, p);
            GridFunctionFamily slow = oracle::naive_generator(g, reg, p, true);
            INFO("rescaled eps=" << eps);
            REQUIRE(oracle::max_abs_diff(fast, slow) < 1e-12);
        }
        GridFunctionFamily fast = apply_vlasov_generator(g, reg, p);
        GridFunctionFamily slow = oracle::naive_generator(g, reg, p, false);
        REQUIRE(oracle::max_abs_diff(fast, slow) < 1e-12);
    }
}

TEST_CASE("flat kernel collapses the rescaled generator onto the limiting one") {
    Potential p = fixture::potential(10.0, 0.0); // amplitude zero
    ScalingRegime reg = fixture::regime(fixture::potential(), kSmall.points);
    reg.eps = 0.7;
    GridFunctionFamily g = random_g(3);
    GridFunctionFamily a = apply_rescaled_generator(g, reg, p);
    GridFunctionFamily b = apply_vlasov_generator(g, reg, p);
    REQUIRE(oracle::max_abs_diff(a, b) < 1e-13);
}

TEST_CASE("rescaled generator converges to the limiting one at rate eps") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    GridFunctionFamily g = random_g(4);
    GridFunctionFamily limit = apply_vlasov_generator(g, reg, p);
    std::vector<double> epss = {1e-2, 1e-3, 1e-4}, gaps;
    for (double e : epss) {
        reg.eps = e;
        gaps.push_back(norm_lc(apply_rescaled_generator(g, reg, p) - limit, reg.c));
    }
    REQUIRE(gaps[1] / gaps[0] == Catch::Approx(0.1).margin(0.03));
    REQUIRE(gaps[2] / gaps[1] == Catch::Approx(0.1).margin(0.03));
}

TEST_CASE("contraction step: special inputs") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    reg.delta = 0.25;

    GridFunctionFamily empty_out = vlasov_step(indicator_empty(kSmall, 3), reg, p, 2);
    REQUIRE(empty_out.scalar() == 1.0);
    for (int n = 1; n <= 3; ++n)
        for (double v : empty_out.level(n)) REQUIRE(v == 0.0);

    GridFunctionFamily single_out = vlasov_step(indicator_singletons(kSmall, 3), reg, p, 2);
    REQUIRE(single_out.scalar() == Catch::Approx(reg.z * reg.delta * 10.0).epsilon(1e-13));

    // z = 0: pure death diagonal
    ScalingRegime dead = reg;
    dead.z = 0.0;
    GridFunctionFamily g = random_g(5);
    GridFunctionFamily diag = vlasov_step(g, dead, p, 2);
    for (int n = 0; n <= 3; ++n) {
        double factor = std::pow(1.0 - reg.delta, n);
        for (std::size_t i = 0; i < g.level(n).size(); ++i)
            REQUIRE(diag.level(n)[i] == Catch::Approx(factor * g.level(n)[i]).margin(1e-15));
    }
}

TEST_CASE("contraction steps match the direct-quadrature oracle") {
    Potential p = fixture::potential();
    for (int mpts : {6, 8}) {
        GridSpec grid{mpts, 10.0};
        ScalingRegime reg = fixture::regime(p, mpts);
        GridFunctionFamily g = random_g(17 + mpts, grid);
        for (double d : {0.5, 0.1}) {
            for (double e : {1.0, 0.1}) {
                reg.delta = d;
                reg.eps = e;
                for (int omega_max : {0, 1, 2}) {
                    INFO("m=" << mpts << " delta=" << d << " eps=" << e
                              << " omega_max=" << omega_max);
                    GridFunctionFamily fq = vlasov_step(g, reg, p, omega_max);
                    GridFunctionFamily sq = oracle::naive_step(g, reg, p, omega_max, false);
                    REQUIRE(oracle::max_abs_diff(fq, sq) < 1e-12);
                    GridFunctionFamily fp = rescaled_step(g, reg, p, omega_max);
                    GridFunctionFamily sp = oracle::naive_step(g, reg, p, omega_max, true);
                    REQUIRE(oracle::max_abs_diff(fp, sp) < 1e-12);
                }
                GridFunctionFamily fq3 = vlasov_step(g, reg, p, 3);
                GridFunctionFamily sq3 = oracle::naive_step(g, reg, p, 3, false);
                REQUIRE(oracle::max_abs_diff(fq3, sq3) < 1e-12);
            }
        }
    }
}

TEST_CASE("flat kernel makes both steps coincide") {
    Potential flat = fixture::potential(10.0, 0.0);
    ScalingRegime reg = fixture::regime(fixture::potential(), kSmall.points);
    reg.delta = 0.2;
    reg.eps = 0.4;
    GridFunctionFamily g = random_g(6);
    REQUIRE(oracle::max_abs_diff(rescaled_step(g, reg, flat, 2), vlasov_step(g, reg, flat, 2)) <
            1e-13);
}

TEST_CASE("steps are linear") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    reg.delta = 0.3;
    GridFunctionFamily a = random_g(7), b = random_g(8);
    GridFunctionFamily combo = 0.6 * a + (-1.7) * b;
    GridFunctionFamily lhs = vlasov_step(combo, reg, p, 2);
    GridFunctionFamily rhs = 0.6 * vlasov_step(a, reg, p, 2) +
                             (-1.7) * vlasov_step(b, reg, p, 2);
    REQUIRE(oracle::max_abs_diff(lhs, rhs) < 1e-11);
    lhs = rescaled_step(combo, reg, p, 2);
    rhs = 0.6 * rescaled_step(a, reg, p, 2) + (-1.7) * rescaled_step(b, reg, p, 2);
    REQUIRE(oracle::max_abs_diff(lhs, rhs) < 1e-11);
}

TEST_CASE("contraction in the weighted L1 norm under the smallness condition") {
    Potential p = fixture::potential();
    GridSpec grid{12, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    REQUIRE(reg.smallz_ok());
    Rng rng(9);
    for (int rep = 0; rep < 10; ++rep) {
        GridFunctionFamily g = random_family_balanced(grid, 3, reg.c, rng);
        double base = norm_lc(g, reg.c);
        for (double d : {0.5, 0.1, 0.01}) {
            for (double e : {1.0, 0.1}) {
                reg.delta = d;
                reg.eps = e;
                double tau = tau_trunc_primal(g, reg, 2);
                REQUIRE(norm_lc(vlasov_step(g, reg, p, 2), reg.c) <= base + tau);
                REQUIRE(norm_lc(rescaled_step(g, reg, p, 2), reg.c) <= base + tau);
            }
        }
    }
}

TEST_CASE("truncation tail bound dominates the dropped omega order") {
    Potential p = fixture::potential();
    GridSpec grid{10, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    reg.delta = 0.5;
    Rng rng(10);
    for (int rep = 0; rep < 5; ++rep) {
        GridFunctionFamily g = random_family_balanced(grid, 3, reg.c, rng);
        GridFunctionFamily full = vlasov_step(g, reg, p, 3);
        GridFunctionFamily cut = vlasov_step(g, reg, p, 2);
        double dropped = norm_lc(full - cut, reg.c);
        double tau = tau_trunc_primal(g, reg, 2);
        REQUIRE(dropped <= tau);
        REQUIRE(tau <= 1e-3 * norm_lc(g, reg.c));
    }
}

TEST_CASE("generator approximation residual obeys the 3 delta bound") {
    Potential p = fixture::potential();
    GridSpec grid{12, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    Rng rng(11);
    GridFunctionFamily g = random_family_balanced(grid, 3, reg.c, rng);
    double b2c = norm_lc(g, 2.0 * reg.c);
    std::vector<double> resid;
    for (double d : {0.1, 0.05, 0.025}) {
        reg.delta = d;
        double tau = tau_trunc_primal(g, reg, 2) / d;
        double rv = generator_residual(g, reg, p, Evolution::vlasov, 2);
        double rr = generator_residual(g, reg, p, Evolution::rescaled, 2);
        REQUIRE(rv <= 3.0 * d * b2c + tau);
        REQUIRE(rr <= 3.0 * d * b2c + tau);
        resid.push_back(rv);
    }
    REQUIRE(resid[1] / resid[0] == Catch::Approx(0.5).margin(0.1));
    REQUIRE(resid[2] / resid[1] == Catch::Approx(0.5).margin(0.1));
}

TEST_CASE("operator outputs stay permutation symmetric and thread-count independent") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kSmall.points);
    reg.delta = 0.2;
    GridFunctionFamily g = random_g(12);
    set_max_threads(1);
    GridFunctionFamily serial = rescaled_step(g, reg, p, 2);
    set_max_threads(2);
    GridFunctionFamily threaded = rescaled_step(g, reg, p, 2);
    set_max_threads(2);
    REQUIRE(serial.symmetry_defect() == 0.0);
    REQUIRE(oracle::max_abs_diff(serial, threaded) == 0.0);
}
