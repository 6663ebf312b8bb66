#include "gvlab/regime.hpp"

#include <cmath>
#include <stdexcept>

namespace gvlab {

void ScalingRegime::validate_structure() const {
    if (!(c > 1.0)) throw std::invalid_argument("ScalingRegime: c must be > 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("ScalingRegime: alpha must be in (0,1)");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("ScalingRegime: delta must be in (0,1)");
    if (!(eps > 0.0)) throw std::invalid_argument("ScalingRegime: eps must be positive");
    if (z < 0.0) throw std::invalid_argument("ScalingRegime: z must be >= 0");
    if (beta < 0.0) throw std::invalid_argument("ScalingRegime: beta must be >= 0");
}

bool ScalingRegime::smallz_ok() const { return z * std::exp(beta * c) <= c; }

bool ScalingRegime::verysmallz_ok() const {
    double cb = c * beta;
    double bound = std::min(c * std::exp(-cb), 2.0 * c * std::exp(-2.0 * cb));
    if (z > bound) return false;
    if (std::fabs(cb - std::log(2.0)) < 1e-12 && !(z < 0.5 * c)) return false;
    return true;
}

bool ScalingRegime::alpha_ok() const {
    auto a1 = alpha_threshold(z, beta, c);
    return a1 && alpha > *a1 && alpha < 1.0;
}

bool ScalingRegime::zbeta_ok() const { return z * beta <= std::exp(-1.0); }

std::optional<double> small_root_xexp(double a) {
    if (a < 0.0) return std::nullopt;
    if (a == 0.0) return 0.0;
    if (a > std::exp(-1.0)) return std::nullopt;
    // x e^{-x} is increasing on (0,1]; bisect.
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (mid * std::exp(-mid) < a ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<double> alpha_threshold(double z, double beta, double c) {
    if (beta <= 0.0) return std::max(0.5, 1.0 / c); // no interaction: only 1/2 and 1/c bind
    auto x1 = small_root_xexp(z * beta);
    if (!x1) return std::nullopt;
    double cb = c * beta;
    double a1 = cb > 1.0 ? std::max(0.5, std::max(1.0 / cb, 1.0 / c))
                         : std::max(0.5, std::max(*x1 / cb, 1.0 / c));
    return a1 < 1.0 ? std::optional<double>(a1) : std::nullopt;
}

double activity_with_margin(double beta, double c, double margin) {
    double cb = c * beta;
    return margin * std::min(c * std::exp(-cb), 2.0 * c * std::exp(-2.0 * cb));
}

} // namespace gvlab
