#pragma once

#include <cstddef>
#include <vector>

namespace gvlab {

/// A finite point configuration in the box [0, L): sorted, pairwise distinct
/// coordinates, so set equality is list equality.
class Configuration {
  public:
    Configuration() = default;

    /// Sorts and validates; throws on out-of-box or duplicate points.
    Configuration(std::vector<double> pts, double box_length);

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    double operator[](std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const { return points_; }
    double box_length() const { return box_length_; }

    bool operator==(const Configuration&) const = default;

    /// Union of two disjoint configurations; throws if they share a point.
    static Configuration disjoint_union(const Configuration& a, const Configuration& b);

    /// Sub-configuration selected by a bitmask over the point list.
    Configuration subset(unsigned mask) const;

  private:
    std::vector<double> points_;
    double box_length_ = 0.0;
};

} // namespace gvlab
