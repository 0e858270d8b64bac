#include <doctest.h>

#include <cmath>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/packets.hpp"
#include "bohmsemi/propagator.hpp"
#include "bohmsemi/schroedinger_newton.hpp"
#include "bohmsemi/semiclassical.hpp"

using namespace bohmsemi;

TEST_CASE("coupling potentials and their x2 derivative") {
    auto b = CouplingPotential::bilinear(0.5);
    CHECK(b.value(2.0, 3.0) == doctest::Approx(3.0));
    CHECK(b.d2(2.0, 3.0) == doctest::Approx(1.0));
    auto h = CouplingPotential::harmonic(2.0);
    CHECK(h.value(1.0, 3.0) == doctest::Approx(4.0));
    CHECK(h.d2(1.0, 3.0) == doctest::Approx(4.0));
    for (const auto& V : {b, h}) {
        const double e = 1e-5;
        CHECK((V.value(0.7, 1.2 + e) - V.value(0.7, 1.2 - e)) / (2 * e) == doctest::Approx(V.d2(0.7, 1.2)).epsilon(1e-8));
    }
    Grid2D g(Grid1D(-1.0, 1.0, 9), Grid1D(0.0, 2.0, 9));
    const auto f = b.sample(g);
    CHECK(f.values[g.index(8, 8)] == doctest::Approx(1.0));
    CHECK(b.slice(g.axis1(), 2.0).values[0] == doctest::Approx(-1.0));
}

TEST_CASE("conditional wave function of a product state") {
    Grid2D g(Grid1D(-10.0, 10.0, 201), Grid1D(-6.0, 6.0, 121));
    GaussianPacket a{1.0, 1.0, 0.5, 1.0}, b{0.0, 0.7, 0.0, 1.0};
    auto psi = WaveFunction2D::sample(g, [&](double x1, double x2) { return free_packet(a, x1) * free_packet(b, x2); });
    const auto c = conditional_wavefunction(psi, 0.35);
    const auto expect = gaussian_wave(g.axis1(), a);
    // Equal up to a constant phase; here the env factor is real and positive.
    double gap = 0.0;
    for (std::size_t i = 0; i < expect.psi.size(); ++i) gap = std::max(gap, std::abs(c.chi.psi[i] - expect.psi[i]));
    CHECK(gap < 1e-6);
    CHECK(c.raw_norm == doctest::Approx(std::abs(free_packet(b, 0.35))).epsilon(1e-5));
    CHECK_THROWS_AS(conditional_wavefunction(psi, 7.0), OutOfDomain);
    CHECK_THROWS_AS(conditional_wavefunction(WaveFunction2D::sample(g, [](double, double) { return Complex{}; }), 0.0), ZeroNorm);
}

TEST_CASE("uncoupled semi-classical steps reduce to free motion") {
    Grid1D g(-15.0, 15.0, 601);
    auto chi = gaussian_wave(g, {0.0, 1.0, 1.0, 1.0});
    auto V = CouplingPotential::bilinear(0.0);
    MeanFieldState mf{chi, 0.5, 2.0, 0.0};
    BohmianSCState bo{chi, 0.3, 0.5, 2.0, 0.0, 0};
    auto ref = chi;
    for (int k = 0; k < 100; ++k) {
        mf = meanfield_step(mf, V, 1.0, 4.0, 0.01);
        bo = bohmian_sc_step(bo, V, 1.0, 4.0, 0.01);
        ref = cn_step_1d(ref, PotentialField::zero(g.size()), 0.01, 1.0);
    }
    CHECK(mf.t == doctest::Approx(1.0));
    CHECK(mf.X2 == doctest::Approx(1.0));
    CHECK(bo.X2 == doctest::Approx(1.0));
    CHECK(mf.P2 == doctest::Approx(2.0));
    double gap = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gap = std::max(gap, std::abs(mf.chi.psi[i] - ref.psi[i]));
    CHECK(gap < 1e-12);
    // X1 follows the free guidance field.
    const double w = std::sqrt(1.0 + 1.0 / 4.0);
    CHECK(bo.X1 == doctest::Approx(1.0 + 0.3 * w).epsilon(2e-3));
}

TEST_CASE("classical sector: velocity Verlet in an external well") {
    Grid1D g(-10.0, 10.0, 201);
    auto chi = gaussian_wave(g, {0.0, 1.0, 0.0, 1.0});
    auto V = CouplingPotential::separable([](double) { return 0.0; }, [](double x) { return 0.5 * x * x; },
                                          [](double x) { return x; });
    MeanFieldState s{chi, 1.0, 0.0, 0.0};
    const double m2 = 1.0;
    double worst = 0.0;
    for (int k = 0; k < 628; ++k) {
        s = meanfield_step(s, V, 1.0, m2, 0.01);
        worst = std::max(worst, std::abs(0.5 * s.P2 * s.P2 / m2 + 0.5 * s.X2 * s.X2 - 0.5));
    }
    CHECK(worst < 1e-4);
    CHECK(s.X2 == doctest::Approx(std::cos(6.28)).epsilon(1e-4));
}

TEST_CASE("mean-field force is the average, Bohmian force is local") {
    Grid1D g(-20.0, 20.0, 801);
    // Symmetric two-lobe chi: mean force vanishes, Bohmian force does not.
    auto chi = normalize(WaveFunction1D::sample(g, [](double x) {
        return free_packet({-4.0, 1.0, 0.0, 1.0}, x) + free_packet({4.0, 1.0, 0.0, 1.0}, x);
    }));
    auto V = CouplingPotential::bilinear(1.0);
    const auto mf = meanfield_step({chi, 0.0, 0.0, 0.0}, V, 1.0, 100.0, 0.01);
    const auto bo = bohmian_sc_step({chi, 4.0, 0.0, 0.0, 0.0, 0}, V, 1.0, 100.0, 0.01);
    CHECK(std::abs(mf.P2) < 1e-10);
    CHECK(bo.P2 == doctest::Approx(-4.0 * 0.01).epsilon(1e-3));
}

TEST_CASE("interaction term scales as 1/m2 for a resting environment") {
    Grid2D g(Grid1D(-10.0, 10.0, 161), Grid1D(-4.0, 4.0, 81));
    auto psi = normalize(WaveFunction2D::sample(g, [](double x1, double x2) {
        return free_packet({0.0, 1.0, 1.0, 1.0}, x1) * free_packet({0.0, 0.5, 0.0, 1.0}, x2);
    }));
    auto V = CouplingPotential::bilinear(0.5);
    const double r10 = interaction_term(psi, 0.2, 0.3, 1.0, 10.0, V).ratio;
    const double r100 = interaction_term(psi, 0.2, 0.3, 1.0, 100.0, V).ratio;
    CHECK(r10 > 0.0);
    CHECK(r100 / r10 == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("two-particle comparison on a small grid") {
    TwoParticleSetup s{.grid = Grid2D(Grid1D(-12.0, 12.0, 96), Grid1D(-4.0, 4.0, 48)),
                       .V = CouplingPotential::bilinear(0.5),
                       .m1 = 1.0,
                       .m2 = 50.0,
                       .psi0 = [](double x1, double x2) {
                           return (free_packet({-3.0, 1.0, -2.0, 1.0}, x1) + free_packet({3.0, 1.0, 2.0, 1.0}, x1)) *
                                  free_packet({0.0, 0.5, 0.0, 1.0}, x2);
                       },
                       .X1 = 3.0,
                       .X2 = 0.1,
                       .dt = 0.02,
                       .steps = 60};
    std::size_t snaps = 0;
    s.snapshot_stride = 20;
    s.snapshot = [&](const std::string&, std::size_t, const WaveFunction1D*, const WaveFunction2D*) { ++snaps; };
    const auto a = compare_two_particle(s, 1);
    CHECK(snaps == 12);
    s.snapshot = nullptr;
    const auto b = compare_two_particle(s, 3);
    CHECK(a.full.X2 == b.full.X2);
    CHECK(a.bohmian.X2 == b.bohmian.X2);
    CHECK(a.full.t.size() == 61);
    for (double n : a.full.norm) CHECK(n == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(a.err_bohmian < a.err_meanfield);
}

TEST_CASE("Schroedinger-Newton: uncoupled limit and norm") {
    Grid1D g(-20.0, 20.0, 401);
    auto psi = gaussian_wave(g, {0.0, 1.0, 0.5, 1.0});
    SNState s{psi, 0.0, 0.0, 0.0, 1.0, 0.1, 0};
    const auto a = sn_meanfield_step(s, 0.01);
    const auto b = cn_step_1d(psi, PotentialField::zero(g.size()), 0.01, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(a.psi.psi[i] == b.psi[i]);
    SNState t{psi, 0.0, 0.0, 1.0, 1.0, 0.1, 0};
    double worst = 0.0;
    const double e0 = sn_energy(psi, 1.0, 1.0, 0.1);
    for (int k = 0; k < 100; ++k) {
        const double n0 = norm_squared(t.psi);
        t = sn_meanfield_step(t, 0.01);
        worst = std::max(worst, std::abs(norm_squared(t.psi) - n0));
    }
    CHECK(worst < 1e-10);
    CHECK(std::abs(sn_energy(t.psi, 1.0, 1.0, 0.1) - e0) < 0.01 * std::abs(e0));
    SNState bad = s;
    bad.m = -1.0;
    CHECK_THROWS_AS(bad.validate(), ShapeError);
}

TEST_CASE("Schroedinger-Newton potentials") {
    Grid1D g(-10.0, 10.0, 201);
    const auto Vb = sn_bohmian_potential(g, 1.0, 2.0, 1.5, 0.2);
    CHECK(Vb.values[110] == doctest::Approx(-2.0 * 2.25 / 0.2));
    auto psi = gaussian_wave(g, {-1.0, 0.8, 0.0, 1.0});
    const auto Vm = sn_meanfield_potential(psi, 2.0, 1.5, 0.2);
    // Direct quadrature of the kernel at a few points.
    for (std::size_t i : {20u, 90u, 150u}) {
        std::vector<double> f(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) {
            const double r = g.x(i) - g.x(j);
            f[j] = psi.density(j) / std::sqrt(r * r + 0.04);
        }
        CHECK(Vm.values[i] == doctest::Approx(-2.0 * 2.25 * trapezoid(f, g.dx())).epsilon(1e-12));
    }
    const auto mins = local_minima(Vm);
    REQUIRE(mins.size() == 1);
    CHECK(g.x(mins[0]) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("Bohmian Schroedinger-Newton step") {
    Grid1D g(-20.0, 20.0, 801);
    auto psi = gaussian_wave(g, {0.0, 1.0, 0.0, 1.0});
    SNState s{psi, 0.5, 0.0, 1.0, 1.0, 0.1, 0};
    for (int k = 0; k < 50; ++k) {
        const double n0 = norm_squared(s.psi);
        s = sn_bohmian_step(s, 0.01);
        CHECK(std::abs(norm_squared(s.psi) - n0) < 1e-10);
    }
    // The packet is pulled toward X, so it starts moving in +x.
    CHECK(mean_position(s.psi) > 0.0);
    CHECK(s.t == doctest::Approx(0.5));
}
