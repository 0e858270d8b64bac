#pragma once

#include <cstdint>

#include "bohmsemi/bohmian.hpp"
#include "bohmsemi/grid.hpp"

namespace bohmsemi {

/// Self-gravitating particle in 1D with a softened kernel 1/sqrt(r^2 + eps^2).
struct SNState {
    WaveFunction1D psi;
    double X = 0.0;  // Bohmian position; unused by the mean-field step
    double t = 0.0;
    double G = 1.0;
    double m = 1.0;
    double eps_soft = 0.1;
    std::uint32_t flags = 0;

    void validate() const;
};

/// V(x) = -G m^2 * integral |psi(y)|^2 / sqrt((x - y)^2 + eps^2) dy (trapezoidal).
PotentialField sn_meanfield_potential(const WaveFunction1D& psi, double G, double m, double eps_soft);
/// V(x) = -G m^2 / sqrt((x - X)^2 + eps^2).
PotentialField sn_bohmian_potential(const Grid1D& grid, double X, double G, double m, double eps_soft);

/// One Crank-Nicolson step with the self-consistent potential. The potential is built from the
/// average of |psi|^2 before and after a predictor step, then frozen for the corrector. With G = 0
/// this is exactly cn_step_1d with V = 0.
SNState sn_meanfield_step(const SNState& s, double dt);

/// Potential sourced by the Bohmian particle at its predicted midpoint; psi by Crank-Nicolson,
/// X by RK4 on the guidance velocity.
SNState sn_bohmian_step(const SNState& s, double dt, const NodePolicy& policy = {});

/// Kinetic energy plus half the mean-field interaction energy.
double sn_energy(const WaveFunction1D& psi, double G, double m, double eps_soft);

/// Interior local minima of a sampled potential, as grid indices.
std::vector<std::size_t> local_minima(const PotentialField& V);

}  // namespace bohmsemi
