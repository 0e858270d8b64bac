#include "bohmsemi/trajectory.hpp"

#include <stdexcept>

namespace bohmsemi {

void TrajectoryRecord::append(double t, std::span<const double> x, std::span<const double> v,
                              std::uint32_t flag) {
    if (x.size() != dim || v.size() != dim) throw std::invalid_argument("trajectory sample has wrong dimension");
    if (!times.empty() && !(t > times.back()))
        throw std::invalid_argument("trajectory times must increase strictly");
    times.push_back(t);
    positions.insert(positions.end(), x.begin(), x.end());
    velocities.insert(velocities.end(), v.begin(), v.end());
    flags.push_back(flag);
}

std::size_t TrajectoryRecord::count(std::uint32_t flag) const {
    std::size_t c = 0;
    for (auto f : flags)
        if (f & flag) ++c;
    return c;
}

std::uint32_t TrajectoryRecord::all_flags() const {
    std::uint32_t a = 0;
    for (auto f : flags) a |= f;
    return a;
}

}  // namespace bohmsemi
