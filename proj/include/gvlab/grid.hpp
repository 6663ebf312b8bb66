#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace gvlab {

/// Uniform periodic grid on the box [0, L): points x_i = i * L / M.
struct GridSpec {
    int points = 64;        // M, nodes per period
    double box_length = 10.0;

    double step() const { return box_length / points; }
    double node(int i) const { return i * step(); }

    bool operator==(const GridSpec&) const = default;

    void validate() const {
        if (points < 2) throw std::invalid_argument("GridSpec: points must be >= 2");
        if (!(box_length > 0.0)) throw std::invalid_argument("GridSpec: box_length must be positive");
    }
};

/// Wrap a coordinate into [0, L).
inline double wrap_coordinate(double x, double length) {
    double y = std::fmod(x, length);
    if (y < 0.0) y += length;
    return y;
}

/// Shortest distance between two points on the circle of circumference L.
inline double torus_distance(double x, double y, double length) {
    double d = std::fabs(x - y);
    d = std::fmod(d, length);
    if (d > 0.5 * length) d = length - d;
    return d;
}

/// Circular offset index (i - j) mod M.
inline int offset_index(int i, int j, int m) {
    int d = (i - j) % m;
    return d < 0 ? d + m : d;
}

} // namespace gvlab
