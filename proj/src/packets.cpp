#include "bohmsemi/packets.hpp"

#include <cmath>
#include <numbers>

namespace bohmsemi {

namespace {

Complex spread(const GaussianPacket& p, double t) {
    return p.sigma * Complex(1.0, t / (2.0 * p.mass * p.sigma * p.sigma));
}

}  // namespace

Complex free_packet(const GaussianPacket& p, double x, double t) {
    const Complex s = spread(p, t);
    const double k = p.momentum;
    const double xi = x - p.center - k * t / p.mass;
    const Complex prefactor = std::pow(2.0 * std::numbers::pi * s * s, -0.25);
    const Complex exponent = Complex(0.0, k * (x - p.center - 0.5 * k * t / p.mass)) -
                             xi * xi / (4.0 * s * p.sigma);
    return prefactor * std::exp(exponent);
}

Complex free_packet_dx(const GaussianPacket& p, double x, double t) {
    const Complex s = spread(p, t);
    const double xi = x - p.center - p.momentum * t / p.mass;
    return (Complex(0.0, p.momentum) - xi / (2.0 * s * p.sigma)) * free_packet(p, x, t);
}

double free_packet_width(const GaussianPacket& p, double t) {
    const double r = t / (2.0 * p.mass * p.sigma * p.sigma);
    return p.sigma * std::sqrt(1.0 + r * r);
}

WaveFunction1D gaussian_wave(const Grid1D& grid, const GaussianPacket& p, double t) {
    return WaveFunction1D::sample(grid, [&](double x) { return free_packet(p, x, t); }, t);
}

}  // namespace bohmsemi
