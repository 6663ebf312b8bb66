#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "gvlab/hierarchy_ops.hpp"
#include "gvlab/lp_calculus.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace gvlab;

namespace {
const GridSpec kGrid{12, 10.0};
}

TEST_CASE("evolution at t = 0 is the identity") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kGrid.points);
    Rng rng(51);
    GridFunctionFamily g = random_family_balanced(kGrid, 3, reg.c, rng);
    REQUIRE(oracle::max_abs_diff(
                evolve_quasi_observable(g, 0.0, 10, Evolution::vlasov, reg, p, 2), g) == 0.0);
    REQUIRE(oracle::max_abs_diff(
                evolve_correlation(g, 0.0, 10, Evolution::rescaled, reg, p, 2), g) == 0.0);
}

TEST_CASE("death-only evolution is diagonal with exponential limit") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kGrid.points);
    reg.z = 0.0;
    Rng rng(52);
    GridFunctionFamily g = random_family_balanced(kGrid, 3, reg.c, rng);
    double t = 0.8;
    for (int n_steps : {8, 64, 512}) {
        GridFunctionFamily out = evolve_quasi_observable(g, t, n_steps, Evolution::vlasov, reg,
                                                         p, 2);
        double delta = t / n_steps;
        for (int n = 0; n <= 3; ++n) {
            double factor = std::pow(1.0 - delta, double(n) * n_steps);
            for (std::size_t i = 0; i < g.level(n).size(); ++i)
                REQUIRE(out.level(n)[i] ==
                        Catch::Approx(factor * g.level(n)[i]).margin(1e-13));
        }
    }
    // the n_steps -> infinity limit is e^{-tn} per level
    GridFunctionFamily fine = evolve_quasi_observable(g, t, 4096, Evolution::vlasov, reg, p, 2);
    for (int n = 0; n <= 3; ++n) {
        double target = std::exp(-t * n);
        for (std::size_t i = 0; i < g.level(n).size(); ++i)
            REQUIRE(fine.level(n)[i] == Catch::Approx(target * g.level(n)[i]).margin(2e-4));
    }
}

TEST_CASE("step-halving self-consistency at first order") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kGrid.points);
    Rng rng(53);
    GridFunctionFamily g = random_family_balanced(kGrid, 3, reg.c, rng);
    double t = 0.5;
    auto run = [&](int n) {
        return evolve_quasi_observable(g, t, n, Evolution::vlasov, reg, p, 2);
    };
    double d1 = norm_lc(run(10) - run(20), reg.c);
    double d2 = norm_lc(run(20) - run(40), reg.c);
    double d3 = norm_lc(run(40) - run(80), reg.c);
    REQUIRE(d2 / d1 == Catch::Approx(0.5).margin(0.12));
    REQUIRE(d3 / d2 == Catch::Approx(0.5).margin(0.12));
}

TEST_CASE("power gap of two contractions grows at most linearly") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kGrid.points);
    reg.delta = 0.05;
    reg.eps = 0.3;
    Rng rng(54);
    GridFunctionFamily g = random_family_balanced(kGrid, 3, reg.c, rng);

    auto apply_a = [&](const GridFunctionFamily& f) { return rescaled_step(f, reg, p, 2); };
    auto apply_b = [&](const GridFunctionFamily& f) { return vlasov_step(f, reg, p, 2); };
    auto nrm = [&](const GridFunctionFamily& f) { return norm_lc(f, reg.c); };

    REQUIRE(contraction_power_gap(apply_a, apply_a, g, 7, nrm) == 0.0);
    double one_step = contraction_power_gap(apply_a, apply_b, g, 1, nrm);
    for (int m : {5, 10, 20}) {
        double gap = contraction_power_gap(apply_a, apply_b, g, m, nrm);
        REQUIRE(gap <= m * one_step * (1.0 + 1e-9) + 1e-12);
    }
}

TEST_CASE("finite-eps evolution approaches the limiting one linearly in eps") {
    Potential p = fixture::potential();
    ScalingRegime reg = fixture::regime(p, kGrid.points);
    PotentialConstants pc = compute_constants(p, kGrid.points);
    Rng rng(55);
    GridFunctionFamily g = random_family_balanced(kGrid, 3, reg.c, rng);
    double t = 0.5;
    int n_steps = 50;
    GridFunctionFamily limit =
        evolve_quasi_observable(g, t, n_steps, Evolution::vlasov, reg, p, 2);
    double b2c = norm_lc(g, 2.0 * reg.c);
    std::vector<double> epss = {0.2, 0.1, 0.05}, gaps;
    for (double e : epss) {
        reg.eps = e;
        GridFunctionFamily ren =
            evolve_quasi_observable(g, t, n_steps, Evolution::rescaled, reg, p, 2);
        double gap = norm_lc(ren - limit, reg.c);
        gaps.push_back(gap);
        REQUIRE(gap <= e * t * pc.phi_bar * (1.0 + pc.beta) * b2c + 5e-3);
    }
    REQUIRE(gaps[1] / gaps[0] == Catch::Approx(0.5).margin(0.08));
    REQUIRE(gaps[2] / gaps[1] == Catch::Approx(0.5).margin(0.08));
}

TEST_CASE("dual evolution of a constant product state follows the scalar recursion") {
    Potential p = fixture::potential();
    GridSpec grid{16, 10.0};
    ScalingRegime reg = fixture::regime(p, grid.points);
    PotentialConstants pc = compute_constants(p, grid.points);
    double r0 = 0.35, t = 1.0;
    int n_steps = 25;
    double d = t / n_steps;
    GridFunctionFamily k = e_lambda(grid, 3, [&](double) { return r0; });
    GridFunctionFamily out =
        evolve_correlation(k, t, n_steps, Evolution::vlasov, reg, p, 2);

    // the evolved family is constant per level; march a per-level vector
    // (r0^n, levels coupled through the binomial formula)
    double lv[4] = {1.0, r0, r0 * r0, r0 * r0 * r0};
    for (int s = 0; s < n_steps; ++s) {
        double nx[4];
        for (int n = 0; n <= 3; ++n) {
            double acc = 0.0;
            for (int o = 0; o <= n; ++o) {
                double comb = 1.0;
                for (int i = 0; i < o; ++i) comb = comb * (n - i) / (i + 1);
                int cap = std::min(2, 3 - (n - o));
                // xi-series on the current (constant-per-level) family: the
                // p-th term couples level p + n - o; for product-like inputs
                // these match r^(p)-weighted sums only at exact product form,
                // so the oracle tracks the full per-level state instead
                double series = 0.0, fact = 1.0;
                for (int pp = 0; pp <= cap; ++pp) {
                    if (pp > 0) fact *= pp;
                    double base = lv[pp + n - o];
                    series += std::pow(-pc.beta * o, pp) / fact * base;
                }
                acc += comb * std::pow((1.0 - d), n - o) * std::pow(reg.z * d, o) * series;
            }
            nx[n] = acc;
        }
        for (int n = 0; n <= 3; ++n) lv[n] = nx[n];
    }
    for (int n = 0; n <= 3; ++n)
        for (double v : out.level(n)) REQUIRE(v == Catch::Approx(lv[n]).margin(1e-12));

    // and the level-1 constant approaches the explicit-Euler limit value
    double euler = r0;
    for (int s = 0; s < n_steps; ++s)
        euler = (1.0 - d) * euler + reg.z * d * std::exp(-pc.beta * euler);
    REQUIRE(std::fabs(lv[1] - euler) < 5e-4);
    (void)texp;
}
