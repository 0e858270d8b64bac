#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bohmsemi {

/// Per-step event markers stored in TrajectoryRecord::flags.
enum StepFlag : std::uint32_t {
    kNodeRegularized = 1u << 0,       // speed clamped near a node of psi
    kBoundaryClamped = 1u << 1,       // a stage left the grid and was pulled back
    kClassicallyForbidden = 1u << 2,  // alpha'^2 < 0 in the Bohmian semi-classical model
    kStepFloor = 1u << 3,             // adaptive halving reached its floor
};

/// Time series of a configuration point. Positions and velocities are stored
/// flat, `dim` values per sample.
struct TrajectoryRecord {
    std::size_t dim = 1;
    std::vector<std::string> coordinates{"x"};
    std::vector<double> times;
    std::vector<double> positions;
    std::vector<double> velocities;
    std::vector<std::uint32_t> flags;

    TrajectoryRecord() = default;
    explicit TrajectoryRecord(std::vector<std::string> coords)
        : dim(coords.size()), coordinates(std::move(coords)) {}

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }
    double position(std::size_t k, std::size_t d = 0) const { return positions[k * dim + d]; }
    double velocity(std::size_t k, std::size_t d = 0) const { return velocities[k * dim + d]; }

    /// Throws std::invalid_argument if t does not increase or sizes mismatch.
    void append(double t, std::span<const double> x, std::span<const double> v, std::uint32_t flag = 0);

    std::size_t count(std::uint32_t flag) const;
    std::uint32_t all_flags() const;
};

/// Classical fourth-order Runge-Kutta step for x' = f(x, t). `f` returns a
/// pair (velocity, flags); the flags of the four stages are OR-ed.
template <std::size_t D, class Field>
std::pair<std::array<double, D>, std::uint32_t> rk4_step(Field&& f, const std::array<double, D>& x,
                                                         double t, double h) {
    auto shifted = [&](const std::array<double, D>& k, double c) {
        std::array<double, D> y;
        for (std::size_t d = 0; d < D; ++d) y[d] = x[d] + c * h * k[d];
        return y;
    };
    const auto [k1, f1] = f(x, t);
    const auto [k2, f2] = f(shifted(k1, 0.5), t + 0.5 * h);
    const auto [k3, f3] = f(shifted(k2, 0.5), t + 0.5 * h);
    const auto [k4, f4] = f(shifted(k3, 1.0), t + h);
    std::array<double, D> out;
    for (std::size_t d = 0; d < D; ++d) out[d] = x[d] + h / 6.0 * (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]);
    return {out, f1 | f2 | f3 | f4};
}

}  // namespace bohmsemi
