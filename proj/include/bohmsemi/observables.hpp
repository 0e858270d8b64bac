#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bohmsemi/grid.hpp"

namespace bohmsemi {

/// Rescales to unit trapezoidal L2 norm. Throws ZeroNorm below 1e-300.
WaveFunction1D normalize(const WaveFunction1D& wf);
WaveFunction2D normalize(const WaveFunction2D& wf);

/// <-d^2/dx^2 / 2m> + <V>, kinetic part from central second differences over
/// interior points (the two wall samples carry no derivative).
double expectation_energy(const WaveFunction1D& wf, const PotentialField& V, double mass);

/// Kinetic part only; expectation_energy without the potential.
double expectation_kinetic(const WaveFunction1D& wf, double mass);

/// Partial derivative dV/dx2 of a two-particle potential, as a function of (x1, x2).
using CouplingGradient = std::function<double(double x1, double x2)>;

/// Mean force on a classical particle at x2 = X2: integral of |chi(x1)|^2 * (-dV/dx2)(x1, X2).
double expectation_force(const WaveFunction1D& chi, const CouplingGradient& dV_dx2, double X2);

double mean_position(const WaveFunction1D& wf);
/// Standard deviation of |psi|^2 (not assuming unit norm).
double position_spread(const WaveFunction1D& wf);

/// Cumulative distribution of |psi|^2, linear between grid nodes, with nodal
/// values from trapezoidal partial sums.
class DensityCdf {
public:
    explicit DensityCdf(const WaveFunction1D& wf);

    double operator()(double x) const;
    /// Inverse CDF for u in [0, 1).
    double quantile(double u) const;
    const Grid1D& grid() const { return grid_; }

private:
    Grid1D grid_;
    std::vector<double> cum_;
};

/// `count` i.i.d. samples from |psi|^2 by inverse CDF. Deterministic given seed.
std::vector<double> sample_density(const WaveFunction1D& wf, std::size_t count, std::uint64_t seed);

/// Kolmogorov-Smirnov distance between an empirical sample and a CDF.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf);
double ks_distance(std::vector<double> samples, const WaveFunction1D& wf);

}  // namespace bohmsemi
