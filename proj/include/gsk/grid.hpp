#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace gsk {

using Point = std::array<double, 3>;

/// Equally spaced tensor grid on the unit square or cube. The counts are
/// interior points per axis, so the spacing on an axis is 1/(count + 1).
struct GridSpec {
    int dim = 2;
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::size_t nz = 1;

    static GridSpec square(std::size_t n) { return {2, n, n, 1}; }
    static GridSpec cube(std::size_t n) { return {3, n, n, n}; }

    std::size_t count(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }
    double spacing(int axis) const { return 1.0 / static_cast<double>(count(axis) + 1); }
    std::size_t interior_points() const { return nx * ny * (dim == 3 ? nz : 1); }

    std::string to_string() const
    {
        std::string s = std::to_string(nx) + "x" + std::to_string(ny);
        if (dim == 3) s += "x" + std::to_string(nz);
        return s;
    }

    bool operator==(const GridSpec&) const = default;
};

} // namespace gsk
