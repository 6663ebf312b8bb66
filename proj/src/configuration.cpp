#include "gvlab/configuration.hpp"

#include <algorithm>
#include <stdexcept>

namespace gvlab {

Configuration::Configuration(std::vector<double> pts, double box_length)
    : points_(std::move(pts)), box_length_(box_length) {
    if (!(box_length_ > 0.0)) throw std::invalid_argument("Configuration: box_length must be positive");
    std::sort(points_.begin(), points_.end());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (points_[i] < 0.0 || points_[i] >= box_length_)
            throw std::invalid_argument("Configuration: point outside [0, L)");
        if (i > 0 && points_[i] == points_[i - 1])
            throw std::invalid_argument("Configuration: duplicate point");
    }
}

Configuration Configuration::disjoint_union(const Configuration& a, const Configuration& b) {
    if (a.box_length() != b.box_length() && !a.empty() && !b.empty())
        throw std::invalid_argument("Configuration: box mismatch in union");
    std::vector<double> pts = a.points_;
    pts.insert(pts.end(), b.points_.begin(), b.points_.end());
    return Configuration(std::move(pts), a.empty() ? b.box_length() : a.box_length());
}

Configuration Configuration::subset(unsigned mask) const {
    std::vector<double> pts;
    for (std::size_t i = 0; i < points_.size(); ++i)
        if (mask & (1u << i)) pts.push_back(points_[i]);
    Configuration out;
    out.points_ = std::move(pts);
    out.box_length_ = box_length_;
    return out;
}

} // namespace gvlab
