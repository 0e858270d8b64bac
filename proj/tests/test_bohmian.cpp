#include <doctest.h>

#include <cmath>

#include "bohmsemi/bohmian.hpp"
#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/packets.hpp"
#include "bohmsemi/propagator.hpp"

using namespace bohmsemi;

namespace {

// Free Gaussian: velocity field and trajectories in closed form.
double packet_velocity(const GaussianPacket& p, double x, double t) {
    const double a = 4.0 * p.mass * p.mass * std::pow(p.sigma, 4);
    const double xc = p.center + p.momentum / p.mass * t;
    return p.momentum / p.mass + (x - xc) * t / (a + t * t);
}

double packet_path(const GaussianPacket& p, double x0, double t) {
    return p.center + p.momentum / p.mass * t + (x0 - p.center) * free_packet_width(p, t) / p.sigma;
}

}  // namespace

TEST_CASE("quantum potential of a Gaussian") {
    const double sigma = 1.3, m = 0.8;
    Grid1D g = Grid1D::with_spacing(-12.0, 12.0, sigma / 50.0);
    auto wf = gaussian_wave(g, {0.4, sigma, 1.0, m});
    const auto q = quantum_potential(wf, m);
    REQUIRE(q.valid_count() > g.size() / 2);
    CHECK_FALSE(q.valid[0]);
    CHECK_FALSE(q.valid[1]);
    CHECK_FALSE(q.valid[g.size() - 2]);
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!q.valid[i]) continue;
        const double y = g.x(i) - 0.4;
        const double exact = -(y * y / (4.0 * std::pow(sigma, 4)) - 1.0 / (2.0 * sigma * sigma)) / (2.0 * m);
        // Relative error is ill-conditioned where Q crosses zero (|x - x0| near sqrt(2) sigma).
        if (std::abs(exact) < 1e-2 / (4.0 * m * sigma * sigma)) continue;
        worst = std::max(worst, std::abs(q.field.values[i] - exact) / std::abs(exact));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("plane wave has no quantum potential") {
    Grid1D g(0.0, 10.0, 501);
    auto wf = WaveFunction1D::sample(g, [](double x) { return std::polar(1.0, 2.5 * x); });
    const auto q = quantum_potential(wf, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (q.valid[i]) CHECK(std::abs(q.field.values[i]) < 1e-10);
}

TEST_CASE("guidance velocity of a spreading packet") {
    GaussianPacket p{-1.0, 0.9, 1.2, 1.7};
    Grid1D g(-20.0, 20.0, 4001);
    const double t = 1.5;
    auto wf = gaussian_wave(g, p, t);
    for (double x : {-2.0, 0.3, 1.9}) {
        const auto s = velocity_at(wf, x, p.mass);
        CHECK_FALSE(s.regularized);
        CHECK(s.v == doctest::Approx(packet_velocity(p, x, t)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(velocity_at(wf, 25.0, p.mass), OutOfDomain);
    const auto j = probability_current(wf, p.mass);
    const std::size_t i = 2000;
    CHECK(j[i] == doctest::Approx(wf.density(i) * packet_velocity(p, g.x(i), t)).epsilon(1e-6));
}

TEST_CASE("node regularisation") {
    Grid1D g(0.0, 2.0 * M_PI, 401);
    // Standing wave plus a tiny travelling part: nodes where sin vanishes.
    auto wf = WaveFunction1D::sample(g, [](double x) { return Complex(std::sin(x), 1e-9 * std::cos(x)); });
    NodePolicy pol{1e-6, 5.0};
    const auto s = velocity_at(wf, M_PI, 1.0, pol);
    CHECK(s.regularized);
    CHECK(std::abs(s.v) <= 5.0);
    CHECK_FALSE(velocity_at(wf, 1.0, 1.0, pol).regularized);
    CHECK_THROWS_AS((NodePolicy{-1.0, 1.0}.validate()), ShapeError);
}

TEST_CASE("2D guidance velocity of a product state") {
    GaussianPacket a{0.0, 1.0, 0.7, 1.0}, b{0.5, 0.6, -0.4, 3.0};
    Grid2D g(Grid1D(-8.0, 8.0, 321), Grid1D(-5.0, 5.0, 201));
    const double t = 0.8;
    auto wf = WaveFunction2D::sample(g, [&](double x1, double x2) { return free_packet(a, x1, t) * free_packet(b, x2, t); });
    const auto s = velocity_at(wf, 0.4, 0.1, a.mass, b.mass);
    CHECK(s.v[0] == doctest::Approx(packet_velocity(a, 0.4, t)).epsilon(1e-6));
    CHECK(s.v[1] == doctest::Approx(packet_velocity(b, 0.1, t)).epsilon(1e-6));
}

TEST_CASE("trajectories through stored frames follow the scaling law") {
    GaussianPacket p{0.0, 1.0, 0.5, 1.0};
    Grid1D g(-25.0, 25.0, 1001);
    FrameHistory1D frames;
    auto wf = gaussian_wave(g, p);
    const auto V = PotentialField::zero(g.size());
    frames.push(wf);
    for (int k = 0; k < 200; ++k) {
        wf = cn_step_1d(wf, V, 0.01, p.mass);
        frames.push(wf);
    }
    CHECK(frames.t_end() == doctest::Approx(2.0));
    const auto tr = advance_trajectory(frames, {{0.8, 0.0}, 0.0}, 2.0, 0.01, p.mass);
    CHECK(tr.times.back() == doctest::Approx(2.0));
    CHECK(tr.position(tr.size() - 1) == doctest::Approx(packet_path(p, 0.8, 2.0)).epsilon(2e-3));
    CHECK_THROWS_AS(advance_trajectory(frames, {{0.8, 0.0}, 0.0}, 3.0, 0.01, p.mass), FrameGap);
    CHECK_THROWS_AS(frames.push(gaussian_wave(g, p, 1.0)), ShapeError);
}

TEST_CASE("analytic-state trajectories") {
    GaussianPacket p{1.0, 0.5, -1.0, 2.0};
    AnalyticState1D st{[&](double x, double t) { return LocalAmplitude1D{free_packet(p, x, t), free_packet_dx(p, x, t)}; },
                       [&](double t) { return 1.0 / (std::sqrt(2.0 * M_PI) * free_packet_width(p, t)); }, -30.0, 30.0};
    const auto tr = advance_trajectory(st, {{1.3, 0.0}, 0.0}, 3.0, 0.01, p.mass);
    for (std::size_t k = 0; k < tr.size(); k += 50)
        CHECK(tr.position(k) == doctest::Approx(packet_path(p, 1.3, tr.times[k])).epsilon(1e-8));
}

TEST_CASE("equivariance on a small ensemble") {
    GaussianPacket p{0.0, 1.0, 0.0, 1.0};
    Grid1D g(-15.0, 15.0, 601);
    auto wf = gaussian_wave(g, p);
    EquivarianceOptions opt;
    opt.threads = 2;
    const auto r = equivariance_test(wf, PotentialField::zero(g.size()), 1.0, 2000, 2.0, 5, opt);
    CHECK(r.ks_initial < 0.04);
    CHECK(r.ks_final < 0.04);
    REQUIRE(r.final_state);
    // Each particle moves along the scaling law.
    for (std::size_t i = 0; i < 20; ++i)
        CHECK(r.final_positions[i] == doctest::Approx(packet_path(p, r.initial_positions[i], 2.0)).epsilon(5e-3));
    opt.threads = 1;
    const auto s = equivariance_test(wf, PotentialField::zero(g.size()), 1.0, 2000, 2.0, 5, opt);
    CHECK(s.final_positions == r.final_positions);
}

TEST_CASE("Newton residual in a harmonic trap") {
    const double m = 1.0, w = 1.0;
    const double sigma = 1.0 / std::sqrt(2.0 * m * w);
    Grid1D g(-12.0, 12.0, 961);
    const auto V = PotentialField::sample(g, [&](double x) { return 0.5 * m * w * w * x * x; });
    auto wf = gaussian_wave(g, {4.0, sigma, 0.0, m});
    FrameHistory1D frames;
    frames.push(wf);
    for (int k = 0; k < 300; ++k) {
        wf = cn_step_1d(wf, V, 0.01, m);
        frames.push(wf);
    }
    // The coherent state's centre moves classically, so the quantum force on it vanishes.
    const auto centre = advance_trajectory(frames, {{4.0, 0.0}, 0.0}, 3.0, 0.01, m);
    const auto rc = newton_residual(centre, frames, V, m);
    CHECK(rc.classical(0.1));
    CHECK(rc.max_abs_residual() < 1e-2 * rc.max_abs_classical_force());
    // Half a width off centre the quantum force is m w^2 sigma / 2, comparable to the trap force there.
    const auto off = advance_trajectory(frames, {{4.0 + 0.5 * sigma, 0.0}, 0.0}, 3.0, 0.01, m);
    const auto ro = newton_residual(off, frames, V, m);
    CHECK(ro.max_abs_quantum_force() == doctest::Approx(0.5 * m * w * w * sigma).epsilon(0.05));
    CHECK_FALSE(ro.classical(0.05));
}
