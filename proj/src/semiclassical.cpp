#include "bohmsemi/semiclassical.hpp"

#include <algorithm>
#include <cmath>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/parallel.hpp"
#include "bohmsemi/propagator.hpp"
#include "bohmsemi/stencil.hpp"

namespace bohmsemi {

CouplingPotential CouplingPotential::bilinear(double lambda) {
    return {[lambda](double x1, double x2) { return lambda * x1 * x2; },
            [lambda](double x1, double) { return lambda * x1; }, "bilinear"};
}

CouplingPotential CouplingPotential::harmonic(double k) {
    return {[k](double x1, double x2) { return 0.5 * k * (x1 - x2) * (x1 - x2); },
            [k](double x1, double x2) { return k * (x2 - x1); }, "harmonic"};
}

CouplingPotential CouplingPotential::separable(std::function<double(double)> f1, std::function<double(double)> f2,
                                               std::function<double(double)> df2, std::string label) {
    return {[f1, f2](double x1, double x2) { return f1(x1) + f2(x2); },
            [df2](double, double x2) { return df2(x2); }, std::move(label)};
}

PotentialField CouplingPotential::slice(const Grid1D& axis1, double X2) const {
    return PotentialField::sample(axis1, [&](double x1) { return value(x1, X2); }, label);
}

PotentialField CouplingPotential::sample(const Grid2D& grid) const {
    return PotentialField::sample(grid, value, label);
}

namespace {

void check_step(double dt, double m1, double m2) {
    if (!(dt > 0.0)) throw ShapeError("dt must be positive");
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw ShapeError("masses must be positive");
}

double axis_clamp(const Grid1D& g, double x, std::uint32_t& flags) {
    if (x < g.x_min()) {
        flags |= kBoundaryClamped;
        return g.x_min();
    }
    if (x > g.x_max()) {
        flags |= kBoundaryClamped;
        return g.x_max();
    }
    return x;
}

}  // namespace

MeanFieldState meanfield_step(const MeanFieldState& s, const CouplingPotential& V, double m1, double m2,
                              double dt) {
    check_step(dt, m1, m2);
    const double p_half = s.P2 + 0.5 * dt * expectation_force(s.chi, V.d2, s.X2);
    const double x_mid = s.X2 + 0.5 * dt * p_half / m2;
    WaveFunction1D chi = cn_step_1d(s.chi, V.slice(s.chi.grid, x_mid), dt, m1);
    const double x_new = x_mid + 0.5 * dt * p_half / m2;
    const double p_new = p_half + 0.5 * dt * expectation_force(chi, V.d2, x_new);
    return {std::move(chi), x_new, p_new, s.t + dt};
}

BohmianSCState bohmian_sc_step(const BohmianSCState& s, const CouplingPotential& V, double m1, double m2,
                               double dt, const NodePolicy& policy) {
    check_step(dt, m1, m2);
    const double p_half = s.P2 - 0.5 * dt * V.d2(s.X1, s.X2);
    const double x_mid = s.X2 + 0.5 * dt * p_half / m2;

    WaveFunction1D chi0 = s.chi;
    chi0.t = s.t;
    WaveFunction1D chi1 = cn_step_1d(chi0, V.slice(chi0.grid, x_mid), dt, m1);

    FrameHistory1D frames;
    frames.push(chi0);
    frames.push(chi1);
    ParticleState p;
    p.x[0] = s.X1;
    p.t = s.t;
    const auto rec = advance_trajectory(frames, p, s.t + dt, dt, m1, policy);

    BohmianSCState out{std::move(chi1), rec.positions.back(), 0.0, 0.0, s.t + dt, rec.all_flags()};
    out.X2 = x_mid + 0.5 * dt * p_half / m2;
    out.P2 = p_half - 0.5 * dt * V.d2(out.X1, out.X2);
    return out;
}

FullQuantumState full_step(const FullQuantumState& s, const PotentialField& V, double m1, double m2, double dt,
                           const NodePolicy& policy) {
    check_step(dt, m1, m2);
    policy.validate();
    WaveFunction2D psi0 = s.psi;
    psi0.t = s.t;
    WaveFunction2D psi1 = cn_step_2d(psi0, V, dt, m1, m2);
    const double peak0 = psi0.peak_density();
    const double peak1 = psi1.peak_density();
    const auto& g1 = psi0.grid.axis1();
    const auto& g2 = psi0.grid.axis2();

    auto field = [&](const std::array<double, 2>& x, double t) {
        std::uint32_t flags = 0;
        const double x1 = axis_clamp(g1, x[0], flags);
        const double x2 = axis_clamp(g2, x[1], flags);
        const double w = std::clamp((t - s.t) / dt, 0.0, 1.0);
        const auto a = evaluate(psi0, x1, x2);
        const auto b = evaluate(psi1, x1, x2);
        const LocalAmplitude2D amp{(1.0 - w) * a.psi + w * b.psi, (1.0 - w) * a.d1 + w * b.d1,
                                   (1.0 - w) * a.d2 + w * b.d2};
        const auto v = guidance_velocity(amp, m1, m2, (1.0 - w) * peak0 + w * peak1, policy);
        if (v.regularized) flags |= kNodeRegularized;
        return std::pair{v.v, flags};
    };
    auto [x, flags] = rk4_step<2>(field, {s.X1, s.X2}, s.t, dt);
    x[0] = axis_clamp(g1, x[0], flags);
    x[1] = axis_clamp(g2, x[1], flags);
    return {std::move(psi1), x[0], x[1], s.t + dt, flags};
}

namespace {

/// Slice of psi, d2 psi and d2^2 psi along x2 = X2, one value per axis-1 node.
struct Slice {
    std::vector<Complex> psi, d2, dd2;
};

Slice slice_at(const WaveFunction2D& wf, double X2, bool derivatives) {
    const auto& g1 = wf.grid.axis1();
    const auto& g2 = wf.grid.axis2();
    if (!(X2 >= g2.x_min() && X2 <= g2.x_max()))
        throw OutOfDomain("X2 = " + std::to_string(X2) + " lies outside axis 2");
    const auto c = stencil::cubic(g2, X2);
    const std::size_t n1 = g1.size();
    const std::size_t n2 = g2.size();
    Slice s;
    s.psi.resize(n1);
    if (derivatives) {
        s.d2.resize(n1);
        s.dd2.resize(n1);
    }
    for (std::size_t i = 0; i < n1; ++i) {
        auto row = [&](std::size_t j) { return wf.at(i, j); };
        s.psi[i] = stencil::apply(c, row);
        if (derivatives) {
            s.d2[i] = stencil::apply(c, [&](std::size_t j) { return stencil::d1(row, n2, j, g2.dx()); });
            s.dd2[i] = stencil::apply(c, [&](std::size_t j) { return stencil::d2(row, n2, j, g2.dx()); });
        }
    }
    return s;
}

double l2(const std::vector<Complex>& f, double dx) {
    std::vector<double> d(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) d[i] = std::norm(f[i]);
    return std::sqrt(trapezoid(d, dx));
}

}  // namespace

ConditionalWave conditional_wavefunction(const WaveFunction2D& psi, double X2) {
    auto s = slice_at(psi, X2, false);
    WaveFunction1D raw(psi.grid.axis1(), std::move(s.psi), psi.t);
    const double norm = std::sqrt(norm_squared(raw));
    if (!(norm > 1e-150)) throw ZeroNorm("conditional wave function vanishes at X2 = " + std::to_string(X2));
    return {normalize(raw), norm};
}

InteractionTerm interaction_term(const WaveFunction2D& psi, double X1, double X2, double m1, double m2,
                                 const CouplingPotential& V, const NodePolicy& policy) {
    if (!(m1 > 0.0) || !(m2 > 0.0)) throw ShapeError("masses must be positive");
    const auto& g1 = psi.grid.axis1();
    const auto s = slice_at(psi, X2, true);
    const double v2 = velocity_at(psi, X1, X2, m1, m2, policy).v[1];
    const std::size_t n = g1.size();

    InteractionTerm out;
    out.field.resize(n);
    std::vector<Complex> h(n);
    auto chi_at = [&](std::size_t j) { return s.psi[j]; };
    for (std::size_t i = 0; i < n; ++i) {
        out.field[i] = -s.dd2[i] / (2.0 * m2) + Complex(0.0, 1.0) * s.d2[i] * v2;
        h[i] = -stencil::d2(chi_at, n, i, g1.dx()) / (2.0 * m1) + V.value(g1.x(i), X2) * s.psi[i];
    }
    const double hn = l2(h, g1.dx());
    if (!(hn > 0.0)) throw ZeroNorm("effective Hamiltonian applied to the conditional slice vanishes");
    out.ratio = l2(out.field, g1.dx()) / hn;
    return out;
}

namespace {

void record(SchemeSeries& s, double t, double x1, double x2, double p2, double norm, double ratio) {
    s.t.push_back(t);
    s.X1.push_back(x1);
    s.X2.push_back(x2);
    s.P2.push_back(p2);
    s.norm.push_back(norm);
    s.ratio.push_back(ratio);
}

double edge_density(const WaveFunction2D& wf) {
    const std::size_t n1 = wf.grid.axis1().size();
    const std::size_t n2 = wf.grid.axis2().size();
    double m = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        m = std::max({m, std::norm(wf.at(i, 1)), std::norm(wf.at(i, n2 - 2))});
    }
    for (std::size_t j = 0; j < n2; ++j) {
        m = std::max({m, std::norm(wf.at(1, j)), std::norm(wf.at(n1 - 2, j))});
    }
    return m;
}

double rms_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(acc / static_cast<double>(a.size()));
}

}  // namespace

TwoParticleComparison compare_two_particle(const TwoParticleSetup& setup, unsigned threads) {
    if (!setup.psi0) throw ShapeError("two-particle setup needs an initial wave function");
    const auto& grid = setup.grid;
    const WaveFunction2D psi0 = normalize(WaveFunction2D::sample(grid, setup.psi0));
    const PotentialField V2 = setup.V.sample(grid);
    const auto cond = conditional_wavefunction(psi0, setup.X2);
    const double p2 = setup.m2 * velocity_at(psi0, setup.X1, setup.X2, setup.m1, setup.m2, setup.policy).v[1];

    TwoParticleComparison out;
    auto snap = [&](const char* scheme, std::size_t k, const WaveFunction1D* chi, const WaveFunction2D* psi) {
        if (setup.snapshot && setup.snapshot_stride && k % setup.snapshot_stride == 0)
            setup.snapshot(scheme, k, chi, psi);
    };
    auto run_full = [&] {
        FullQuantumState s{psi0, setup.X1, setup.X2, 0.0, 0};
        auto ratio = [&](const FullQuantumState& st) {
            return interaction_term(st.psi, st.X1, st.X2, setup.m1, setup.m2, setup.V, setup.policy).ratio;
        };
        record(out.full, 0.0, s.X1, s.X2, p2, std::sqrt(norm_squared(s.psi)), ratio(s));
        out.edge_density = edge_density(s.psi);
        snap("full", 0, nullptr, &s.psi);
        for (std::size_t k = 0; k < setup.steps; ++k) {
            s = full_step(s, V2, setup.m1, setup.m2, setup.dt, setup.policy);
            snap("full", k + 1, nullptr, &s.psi);
            if (s.flags) ++out.full.flagged_steps;
            const double v2 = velocity_at(s.psi, s.X1, s.X2, setup.m1, setup.m2, setup.policy).v[1];
            record(out.full, s.t, s.X1, s.X2, setup.m2 * v2, std::sqrt(norm_squared(s.psi)), ratio(s));
            out.edge_density = std::max(out.edge_density, edge_density(s.psi));
        }
    };
    auto run_meanfield = [&] {
        MeanFieldState s{cond.chi, setup.X2, p2, 0.0};
        s.chi.t = 0.0;
        record(out.meanfield, 0.0, mean_position(s.chi), s.X2, s.P2, std::sqrt(norm_squared(s.chi)), 0.0);
        snap("meanfield", 0, &s.chi, nullptr);
        for (std::size_t k = 0; k < setup.steps; ++k) {
            s = meanfield_step(s, setup.V, setup.m1, setup.m2, setup.dt);
            snap("meanfield", k + 1, &s.chi, nullptr);
            record(out.meanfield, s.t, mean_position(s.chi), s.X2, s.P2, std::sqrt(norm_squared(s.chi)), 0.0);
        }
    };
    auto run_bohmian = [&] {
        BohmianSCState s{cond.chi, setup.X1, setup.X2, p2, 0.0, 0};
        s.chi.t = 0.0;
        record(out.bohmian, 0.0, s.X1, s.X2, s.P2, std::sqrt(norm_squared(s.chi)), 0.0);
        snap("bohmian", 0, &s.chi, nullptr);
        for (std::size_t k = 0; k < setup.steps; ++k) {
            s = bohmian_sc_step(s, setup.V, setup.m1, setup.m2, setup.dt, setup.policy);
            snap("bohmian", k + 1, &s.chi, nullptr);
            if (s.flags) ++out.bohmian.flagged_steps;
            record(out.bohmian, s.t, s.X1, s.X2, s.P2, std::sqrt(norm_squared(s.chi)), 0.0);
        }
    };
    parallel_for(3, std::min(threads, 3u), [&](std::size_t i) {
        if (i == 0) run_full();
        else if (i == 1) run_meanfield();
        else run_bohmian();
    });
    out.err_meanfield = rms_gap(out.meanfield.X2, out.full.X2);
    out.err_bohmian = rms_gap(out.bohmian.X2, out.full.X2);
    return out;
}

}  // namespace bohmsemi
