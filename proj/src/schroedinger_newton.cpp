#include "bohmsemi/schroedinger_newton.hpp"

#include <cmath>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/propagator.hpp"

namespace bohmsemi {

void SNState::validate() const {
    if (!(m > 0.0)) throw ShapeError("mass must be positive");
    if (!(eps_soft > 0.0)) throw ShapeError("eps_soft must be positive");
    if (!std::isfinite(G)) throw ShapeError("G must be finite");
}

namespace {

PotentialField convolve(const Grid1D& g, const std::vector<double>& rho, double G, double m, double eps) {
    const std::size_t n = g.size();
    const double dx = g.dx();
    const double eps2 = eps * eps;
    // the kernel depends on |i - j| only
    std::vector<double> kernel(n);
    for (std::size_t d = 0; d < n; ++d) {
        const double r = static_cast<double>(d) * dx;
        kernel[d] = 1.0 / std::sqrt(r * r + eps2);
    }
    std::vector<double> w(rho);
    w.front() *= 0.5;
    w.back() *= 0.5;
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += w[j] * kernel[i > j ? i - j : j - i];
        v[i] = -G * m * m * acc * dx;
    }
    return PotentialField(std::move(v), "schroedinger-newton mean field");
}

std::vector<double> density(const WaveFunction1D& wf) {
    std::vector<double> rho(wf.psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = wf.density(i);
    return rho;
}

}  // namespace

PotentialField sn_meanfield_potential(const WaveFunction1D& psi, double G, double m, double eps_soft) {
    if (!(eps_soft > 0.0)) throw ShapeError("eps_soft must be positive");
    return convolve(psi.grid, density(psi), G, m, eps_soft);
}

PotentialField sn_bohmian_potential(const Grid1D& grid, double X, double G, double m, double eps_soft) {
    if (!(eps_soft > 0.0)) throw ShapeError("eps_soft must be positive");
    return PotentialField::sample(
        grid, [&](double x) { return -G * m * m / std::sqrt((x - X) * (x - X) + eps_soft * eps_soft); },
        "schroedinger-newton bohmian");
}

SNState sn_meanfield_step(const SNState& s, double dt) {
    s.validate();
    if (!(dt > 0.0)) throw ShapeError("dt must be positive");
    SNState out = s;
    const auto V0 = sn_meanfield_potential(s.psi, s.G, s.m, s.eps_soft);
    const auto predictor = cn_step_1d(s.psi, V0, dt, s.m);
    auto rho = density(s.psi);
    const auto rho1 = density(predictor);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 0.5 * (rho[i] + rho1[i]);
    const auto Vmid = convolve(s.psi.grid, rho, s.G, s.m, s.eps_soft);
    out.psi = cn_step_1d(s.psi, Vmid, dt, s.m);
    out.t = s.t + dt;
    out.flags = 0;
    return out;
}

SNState sn_bohmian_step(const SNState& s, double dt, const NodePolicy& policy) {
    s.validate();
    if (!(dt > 0.0)) throw ShapeError("dt must be positive");
    const auto& g = s.psi.grid;
    const auto v0 = velocity_at(s.psi, s.X, s.m, policy);
    double x_mid = s.X + 0.5 * dt * v0.v;
    x_mid = std::min(std::max(x_mid, g.x_min()), g.x_max());
    const auto V = sn_bohmian_potential(g, x_mid, s.G, s.m, s.eps_soft);

    WaveFunction1D psi0 = s.psi;
    psi0.t = s.t;
    FrameHistory1D frames;
    frames.push(psi0);
    frames.push(cn_step_1d(psi0, V, dt, s.m));
    ParticleState p;
    p.x[0] = s.X;
    p.t = s.t;
    const auto rec = advance_trajectory(frames, p, s.t + dt, dt, s.m, policy);

    SNState out = s;
    out.psi = frames.frames().back();
    out.X = rec.positions.back();
    out.t = s.t + dt;
    out.flags = rec.all_flags() | (v0.regularized ? kNodeRegularized : 0u);
    return out;
}

double sn_energy(const WaveFunction1D& psi, double G, double m, double eps_soft) {
    const auto V = sn_meanfield_potential(psi, G, m, eps_soft);
    const auto rho = density(psi);
    std::vector<double> e(rho.size());
    for (std::size_t i = 0; i < rho.size(); ++i) e[i] = rho[i] * V.values[i];
    return expectation_kinetic(psi, m) + 0.5 * trapezoid(e, psi.grid.dx());
}

std::vector<std::size_t> local_minima(const PotentialField& V) {
    std::vector<std::size_t> out;
    const auto& v = V.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] < v[i - 1] && v[i] <= v[i + 1]) out.push_back(i);
    return out;
}

}  // namespace bohmsemi
