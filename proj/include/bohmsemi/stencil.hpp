#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "bohmsemi/grid.hpp"

// Finite-difference and interpolation stencils on uniform grids. Accessors
// are callables `f(j)` returning the sample at node j, so the same stencils
// serve 1D arrays and lines of 2D arrays.
namespace bohmsemi::stencil {

/// First derivative at node j: fourth-order central in the interior, second
/// order next to the walls, one-sided on the walls.
template <class Get>
auto d1(Get&& f, std::size_t n, std::size_t j, double h) {
    if (j >= 2 && j + 2 < n)
        return (f(j - 2) - 8.0 * f(j - 1) + 8.0 * f(j + 1) - f(j + 2)) / (12.0 * h);
    if (j >= 1 && j + 1 < n) return (f(j + 1) - f(j - 1)) / (2.0 * h);
    if (j == 0) return (f(1) - f(0)) / h;
    return (f(j) - f(j - 1)) / h;
}

/// Second derivative at node j with the same order pattern as d1. Wall nodes
/// reuse the neighbouring interior stencil.
template <class Get>
auto d2(Get&& f, std::size_t n, std::size_t j, double h) {
    if (j >= 2 && j + 2 < n)
        return (-f(j - 2) + 16.0 * f(j - 1) - 30.0 * f(j) + 16.0 * f(j + 1) - f(j + 2)) /
               (12.0 * h * h);
    if (j == 0) j = 1;
    if (j + 1 >= n) j = n - 2;
    return (f(j + 1) - 2.0 * f(j) + f(j - 1)) / (h * h);
}

/// Four-point Lagrange interpolation weights on nodes first..first+3.
struct Cubic {
    std::size_t first;
    std::array<double, 4> w;
};

/// Cubic stencil for a point inside the grid. Near the walls the stencil is
/// shifted inward so that all four nodes exist.
inline Cubic cubic(const Grid1D& g, double x) {
    const std::size_t n = g.size();
    double s = (x - g.x_min()) / g.dx();
    auto i = static_cast<std::ptrdiff_t>(std::floor(s));
    const auto lo = std::ptrdiff_t{1};
    const auto hi = static_cast<std::ptrdiff_t>(n) - 3;
    if (i < lo) i = lo;
    if (i > hi) i = hi;
    const double t = s - static_cast<double>(i);
    Cubic c;
    c.first = static_cast<std::size_t>(i - 1);
    c.w = {-t * (t - 1.0) * (t - 2.0) / 6.0, (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
           -(t + 1.0) * t * (t - 2.0) / 2.0, (t + 1.0) * t * (t - 1.0) / 6.0};
    return c;
}

template <class Get>
auto apply(const Cubic& c, Get&& f) {
    auto acc = c.w[0] * f(c.first);
    for (std::size_t k = 1; k < 4; ++k) acc += c.w[k] * f(c.first + k);
    return acc;
}

}  // namespace bohmsemi::stencil
