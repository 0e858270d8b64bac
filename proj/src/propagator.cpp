#include "bohmsemi/propagator.hpp"

#include <cmath>

#include "bohmsemi/errors.hpp"

namespace bohmsemi {

namespace {

void check_finite(std::span<const Complex> psi) {
    for (const auto& z : psi)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            throw UnstableState("Crank-Nicolson step produced a non-finite amplitude");
}

}  // namespace

void CrankNicolson1D::step(std::span<Complex> psi, std::span<const double> potential, double dx,
                           double dt, double mass) {
    const std::size_t n = psi.size();
    if (potential.size() != n) throw ShapeError("potential does not match the grid");
    if (!(dt > 0.0)) throw ShapeError("time step must be positive");
    if (!(mass > 0.0)) throw ShapeError("mass must be positive");

    const std::size_t m = n - 2;  // interior unknowns
    rhs_.resize(m);
    c_prime_.resize(m);

    const Complex a{0.0, 0.5 * dt};
    const double kin = 1.0 / (mass * dx * dx);
    const Complex off = a * (-0.5 * kin);

    psi[0] = 0.0;
    psi[n - 1] = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t i = j + 1;
        const Complex d = 1.0 + a * (kin + potential[i]);
        rhs_[j] = (2.0 - d) * psi[i] - off * (psi[i - 1] + psi[i + 1]);
    }

    // Thomas algorithm; the factorisation is recomputed since V changes every step.
    Complex denom = 1.0 + a * (kin + potential[1]);
    c_prime_[0] = off / denom;
    rhs_[0] /= denom;
    for (std::size_t j = 1; j < m; ++j) {
        const Complex d = 1.0 + a * (kin + potential[j + 1]);
        denom = d - off * c_prime_[j - 1];
        c_prime_[j] = off / denom;
        rhs_[j] = (rhs_[j] - off * rhs_[j - 1]) / denom;
    }
    for (std::size_t j = m - 1; j-- > 0;) rhs_[j] -= c_prime_[j] * rhs_[j + 1];

    for (std::size_t j = 0; j < m; ++j) psi[j + 1] = rhs_[j];
    check_finite(psi);
}

WaveFunction1D cn_step_1d(const WaveFunction1D& wf, const PotentialField& V, double dt, double mass) {
    if (V.size() != wf.grid.size()) throw ShapeError("potential does not match the grid");
    WaveFunction1D out = wf;
    CrankNicolson1D cn;
    cn.step(out.psi, V.values, wf.grid.dx(), dt, mass);
    out.t = wf.t + dt;
    return out;
}

void CrankNicolson2D::sweep_axis1(WaveFunction2D& wf, const PotentialField& V, double dt, double m1) {
    const auto& g = wf.grid;
    const std::size_t n1 = g.axis1().size();
    const std::size_t n2 = g.axis2().size();
    buf_.resize(n1);
    pot_.resize(n1);
    for (std::size_t j = 0; j < n2; ++j) {
        if (j == 0 || j + 1 == n2) {
            for (std::size_t i = 0; i < n1; ++i) wf.psi[g.index(i, j)] = 0.0;
            continue;
        }
        for (std::size_t i = 0; i < n1; ++i) {
            buf_[i] = wf.psi[g.index(i, j)];
            pot_[i] = 0.5 * V.values[g.index(i, j)];
        }
        line_.step(buf_, pot_, g.axis1().dx(), dt, m1);
        for (std::size_t i = 0; i < n1; ++i) wf.psi[g.index(i, j)] = buf_[i];
    }
}

void CrankNicolson2D::sweep_axis2(WaveFunction2D& wf, const PotentialField& V, double dt, double m2) {
    const auto& g = wf.grid;
    const std::size_t n1 = g.axis1().size();
    const std::size_t n2 = g.axis2().size();
    pot_.resize(n2);
    for (std::size_t i = 0; i < n1; ++i) {
        std::span<Complex> row(wf.psi.data() + g.index(i, 0), n2);
        if (i == 0 || i + 1 == n1) {
            for (auto& z : row) z = 0.0;
            continue;
        }
        for (std::size_t j = 0; j < n2; ++j) pot_[j] = 0.5 * V.values[g.index(i, j)];
        line_.step(row, pot_, g.axis2().dx(), dt, m2);
    }
}

void CrankNicolson2D::step(WaveFunction2D& wf, const PotentialField& V, double dt, double m1,
                           double m2) {
    if (V.size() != wf.grid.size()) throw ShapeError("potential does not match the grid");
    sweep_axis1(wf, V, 0.5 * dt, m1);
    sweep_axis2(wf, V, dt, m2);
    sweep_axis1(wf, V, 0.5 * dt, m1);
    wf.t += dt;
}

WaveFunction2D cn_step_2d(const WaveFunction2D& wf, const PotentialField& V, double dt, double m1,
                          double m2) {
    WaveFunction2D out = wf;
    CrankNicolson2D cn;
    cn.step(out, V, dt, m1, m2);
    return out;
}

}  // namespace bohmsemi
