#pragma once

#include "bohmsemi/grid.hpp"

namespace bohmsemi {

/// Minimum-uncertainty Gaussian, |psi|^2 of standard deviation `sigma`
/// centred at `center`, mean momentum `momentum`.
struct GaussianPacket {
    double center = 0.0;
    double sigma = 1.0;
    double momentum = 0.0;
    double mass = 1.0;
};

/// Closed-form free evolution of the packet after time t (t = 0 gives the
/// initial normalised Gaussian).
Complex free_packet(const GaussianPacket& p, double x, double t = 0.0);
/// d/dx of free_packet.
Complex free_packet_dx(const GaussianPacket& p, double x, double t = 0.0);
/// sigma * sqrt(1 + t^2 / (4 m^2 sigma^4)).
double free_packet_width(const GaussianPacket& p, double t);

WaveFunction1D gaussian_wave(const Grid1D& grid, const GaussianPacket& p, double t = 0.0);

}  // namespace bohmsemi
