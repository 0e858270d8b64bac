#include <doctest.h>

#include <cmath>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/minisuperspace.hpp"

using namespace bohmsemi;
using namespace bohmsemi::mini;

namespace {

const WDWParams kSup{1.0, 5.0, 1.0, Mode::Superposition};

TrajectoryRecord line(double slope, double a0, double a1) {
    TrajectoryRecord r({"phi", "alpha"});
    for (int k = 0; k <= 100; ++k) {
        const double a = a0 + (a1 - a0) * k / 100.0;
        const double x[2] = {slope * a, a}, v[2] = {slope, 1.0};
        r.append(k, x, v);
    }
    return r;
}

}  // namespace

TEST_CASE("packets solve the discretised Wheeler-DeWitt equation") {
    for (Mode mode : {Mode::R, Mode::L, Mode::Superposition}) {
        WDWParams p{1.0, 5.0, 1.0, mode};
        auto residual = [&](double h) {
            const double phi = 0.3, alpha = -0.4;
            const Complex c = psi_wdw(p, phi, alpha);
            const Complex daa = (psi_wdw(p, phi, alpha + h) - 2.0 * c + psi_wdw(p, phi, alpha - h)) / (h * h);
            const Complex dpp = (psi_wdw(p, phi + h, alpha) - 2.0 * c + psi_wdw(p, phi - h, alpha)) / (h * h);
            return std::abs(daa - dpp);
        };
        // Each branch depends on phi -+ alpha only, so the centred differences cancel up to roundoff.
        CHECK(residual(0.02) < 1e-9);
        CHECK(residual(0.01) < 1e-8);
    }
}

TEST_CASE("closed-form derivative ratios match finite differences") {
    const double phi = 0.37, alpha = -0.21, h = 1e-4;
    const auto d = wdw_derivatives(kSup, phi, alpha);
    auto f = [&](double dp, double da) { return psi_wdw(kSup, phi + dp, alpha + da); };
    const Complex c = f(0, 0);
    CHECK(std::abs(d.mixed(0, 0) - 1.0) < 1e-14);
    CHECK(std::abs(d.mixed(0, 1) - (f(h, 0) - f(-h, 0)) / (2 * h) / c) < 1e-6);
    CHECK(std::abs(d.mixed(1, 0) - (f(0, h) - f(0, -h)) / (2 * h) / c) < 1e-6);
    CHECK(std::abs(d.mixed(0, 2) - (f(h, 0) - 2.0 * c + f(-h, 0)) / (h * h) / c) < 1e-5);
    CHECK(std::abs(d.mixed(2, 0) - (f(0, h) - 2.0 * c + f(0, -h)) / (h * h) / c) < 1e-5);
    CHECK(std::abs(d.mixed(1, 1) - (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h) / c) < 1e-5);
    CHECK(d.log_abs_psi == doctest::Approx(std::log(std::abs(c))).epsilon(1e-12));
    // |psi| = exp(log|psi|): amplitude curvature from finite differences of |psi|.
    auto a = [&](double dp) { return std::abs(f(dp, 0)); };
    const double hh = 1e-3;
    CHECK(d.amp_phi2() == doctest::Approx((a(hh) - 2 * a(0) + a(-hh)) / (hh * hh) / a(0)).epsilon(1e-5));
}

TEST_CASE("guidance velocities for single branches") {
    const auto r = wdw_velocity({1.5, 5.0, 1.0, Mode::R}, 0.3, 2.0);
    CHECK(r.alpha_prime == doctest::Approx(1.5));
    CHECK(r.phi_prime == doctest::Approx(1.5));
    const auto l = wdw_velocity({1.5, 4.0, 1.0, Mode::L}, 0.3, 2.0);
    CHECK(l.alpha_prime == doctest::Approx(4.0));
    CHECK(l.phi_prime == doctest::Approx(-4.0));
    CHECK_THROWS_AS(wdw_velocity(kSup, 60.0, 0.0), NodePoint);
}

TEST_CASE("classical lines conserve alpha -+ phi") {
    StepPolicy pol;
    const auto r = integrate_wdw({1.0, 5.0, 1.0, Mode::R}, {0.0, 0.7, 0.0}, {0.0, 20.0}, 0.01, pol);
    const auto l = integrate_wdw({1.0, 5.0, 1.0, Mode::L}, {0.0, 0.7, 0.0}, {0.0, 20.0}, 0.01, pol);
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(std::abs(r.position(k, 1) - r.position(k, 0) + 0.7) < 1e-9 * 20.0);
        CHECK(std::abs(l.position(k, 1) + l.position(k, 0) - 0.7) < 1e-9 * 20.0);
    }
    CHECK(r.times.back() == doctest::Approx(20.0));
    CHECK(r.position(r.size() - 1, 1) == doctest::Approx(20.0).epsilon(1e-9));
}

TEST_CASE("integration covers the span in both directions and honours alpha_stop") {
    const auto t = integrate_wdw(kSup, {-1.0, -0.5, 3.0}, {0.0, 6.0}, 0.01);
    CHECK(t.times.front() == doctest::Approx(0.0));
    CHECK(t.times.back() == doctest::Approx(6.0));
    StepPolicy pol;
    pol.alpha_stop = 4.0;
    const auto s = integrate_wdw(kSup, {-1.0, -0.5, 3.0}, {-50.0, 50.0}, 0.01, pol);
    CHECK(std::abs(s.position(0, 1)) >= 4.0);
    CHECK(std::abs(s.position(s.size() - 1, 1)) >= 4.0);
    CHECK(std::abs(s.position(s.size() - 1, 1)) < 4.2);
    CHECK_THROWS(integrate_wdw(kSup, {0.0, 0.0, 10.0}, {0.0, 5.0}, 0.01));
}

TEST_CASE("classifier on synthetic paths") {
    CHECK(classify_trajectory(line(1.0, -20.0, 20.0)) == Label::LeftToRight);
    CHECK(classify_trajectory(line(-1.0, -20.0, 20.0)) == Label::RightToLeft);
    CHECK(classify_trajectory(line(1.0, -5.0, 5.0)) == Label::Undetermined);
    TrajectoryRecord loop({"phi", "alpha"});
    for (int k = 0; k <= 400; ++k) {
        const double t = 2.0 * M_PI * k / 200.0;
        const double x[2] = {0.1 * std::cos(t), 0.05 * std::sin(t)}, v[2] = {-0.1 * std::sin(t), 0.05 * std::cos(t)};
        loop.append(t, x, v);
    }
    CHECK(classify_trajectory(loop) == Label::Cyclic);
    CHECK(std::string(to_string(Label::LeftToLeft)) == "left->left");
}

TEST_CASE("superposition families") {
    StepPolicy pol;
    pol.alpha_stop = 12.0;
    ClassifyOptions opt;
    // Left start stays left; far right start stays right.
    CHECK(classify_trajectory(integrate_wdw(kSup, {-11.5, -12.0, 0.0}, {0.0, 40.0}, 0.01, pol), opt) ==
          Label::LeftToLeft);
    CHECK(classify_trajectory(integrate_wdw(kSup, {-11.5, 13.5, 0.0}, {0.0, 40.0}, 0.01, pol), opt) ==
          Label::RightToRight);
    CHECK(classify_trajectory(integrate_wdw(kSup, {-11.5, 11.0, 0.0}, {0.0, 40.0}, 0.01, pol), opt) ==
          Label::RightToLeft);
    // A point close to a node circles it.
    const auto c = integrate_wdw(kSup, {0.0, M_PI / 6.0 - 0.02, 0.0}, {0.0, 5.0}, 0.0005);
    CHECK(classify_trajectory(c, opt) == Label::Cyclic);
}

TEST_CASE("Friedmann residual of the full trajectory") {
    const auto t = integrate_wdw(kSup, {-8.0, -8.0, 0.0}, {0.0, 20.0}, 0.01);
    const auto r = friedmann_residual(kSup, t);
    CHECK_FALSE(r.valid.front());
    CHECK_FALSE(r.valid.back());
    // Away from the branch crossing the motion is classical and the residual is at roundoff.
    for (std::size_t k = 1; k + 1 < r.tau.size(); ++k) {
        if (r.tau[k] < 3.0 || r.tau[k] > 9.0) {
            CHECK(std::abs(r.constraint[k]) < 1e-8);
            CHECK(std::abs(r.field[k]) < 1e-8);
        }
    }
    // Through the crossing it is a differencing error that falls at second order in dtau.
    const auto h = friedmann_residual(kSup, integrate_wdw(kSup, {-8.0, -8.0, 0.0}, {0.0, 20.0}, 0.005));
    CHECK(r.max_abs_constraint() / h.max_abs_constraint() > 3.0);
    CHECK(r.max_abs_field() / h.max_abs_field() > 3.0);
    CHECK_THROWS_AS(friedmann_residual(kSup, t, {1.0, 1.0, 0.0, 0.0}), ShapeError);
    CHECK_FALSE((MiniModelParams{1.0, 0.0, 0.5, 0.0}.is_default()));
}

TEST_CASE("conditional packets are normalised and follow their centres") {
    for (PacketKind k : {PacketKind::R, PacketKind::L}) {
        for (double tau : {0.0, 2.0}) {
            double n = 0.0, mean = 0.0;
            const double h = 0.005;
            for (double phi = -40.0; phi <= 40.0; phi += h) {
                const double d = std::norm(chi_free_packet(k, kSup, -8.0, 0.0, phi, tau));
                n += d * h;
                mean += phi * d * h;
            }
            CHECK(n == doctest::Approx(1.0).epsilon(1e-8));
            const double expect = k == PacketKind::R ? -8.0 + 1.0 * tau : 8.0 - 5.0 * tau;
            CHECK(mean == doctest::Approx(expect).epsilon(1e-8));
        }
    }
}

TEST_CASE("chi ratios and the free Schroedinger equation in tau") {
    const double a0 = -8.0, phi = 0.4, tau = 1.3, h = 1e-4, ht = 1e-5;
    auto chi = [&](double x, double t) { return chi_state(kSup, a0, 0.0, x, t); };
    const auto r = chi_ratios(kSup, a0, 0.0, phi, tau);
    const Complex c = chi(phi, tau);
    CHECK(std::abs(r.d1 - (chi(phi + h, tau) - chi(phi - h, tau)) / (2 * h) / c) < 1e-6);
    CHECK(std::abs(r.d2 - (chi(phi + h, tau) - 2.0 * c + chi(phi - h, tau)) / (h * h) / c) < 1e-4);
    // i d_tau chi = -(1/2) d_phi^2 chi
    const Complex dt = (chi(phi, tau + ht) - chi(phi, tau - ht)) / (2 * ht) / c;
    CHECK(std::abs(Complex(0, 1) * dt + 0.5 * r.d2) < 1e-6 * std::abs(r.d2));
}

TEST_CASE("alpha' squared equals -2 d_tau S") {
    const double a0 = -8.0, h = 1e-5;
    for (double phi : {-7.0, -5.5, 3.0}) {
        for (double tau : {0.5, 2.0}) {
            auto S = [&](double t) { return std::arg(chi_state(kSup, a0, 0.0, phi, t)); };
            const double dS = std::remainder(S(tau + h) - S(tau - h), 2 * M_PI) / (2 * h);
            CHECK(bohmian_sc_alpha_prime_sq(kSup, a0, 0.0, phi, tau) == doctest::Approx(-2.0 * dS).epsilon(1e-6));
        }
    }
}

TEST_CASE("usual semi-classical energies") {
    for (Mode mode : {Mode::R, Mode::L, Mode::Superposition}) {
        WDWParams p{1.0, 5.0, 1.0, mode};
        CHECK(two_h_quadrature(p, -8.0) == doctest::Approx(two_h_closed_form(p)).epsilon(1e-3));
    }
    CHECK(two_h_closed_form({1.0, 5.0, 1.0, Mode::R}) == doctest::Approx(1.25));
    CHECK(two_h_closed_form({1.0, 5.0, 1.0, Mode::L}) == doctest::Approx(25.25));
    CHECK(two_h_closed_form(kSup) == doctest::Approx(13.25));
    const auto u = usual_sc_run(kSup, -8.0, 0.0, {0.0, 10.0}, 0.5);
    CHECK(u.alpha_prime == doctest::Approx(3.640).epsilon(1e-4));
    CHECK(u.alpha.back() == doctest::Approx(-8.0 + 10.0 * std::sqrt(13.25)));
    CHECK(u.tau.size() == 21);
}

TEST_CASE("Bohmian semi-classical trajectories") {
    SCMiniState s;
    s.packet = kSup;
    s.phi = -8.3;
    s.alpha = -8.0;
    const auto a = bohmian_sc_run(s, {0.0, 10.0}, 0.01);
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.flags[k]) continue;
        CHECK(a.velocity(k, 1) * a.velocity(k, 1) ==
              doctest::Approx(bohmian_sc_alpha_prime_sq(kSup, -8.0, 0.0, a.position(k, 0), a.times[k])).epsilon(1e-10));
    }
    // First-order flow in phi: paths do not cross.
    s.phi = -8.2;
    const auto b = bohmian_sc_run(s, {0.0, 10.0}, 0.01);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.position(k, 0) < b.position(k, 0));
}

TEST_CASE("scheme comparison") {
    SUBCASE("single branch: all schemes agree") {
        const auto c = compare_schemes({3.0, 5.0, 4.0, Mode::R}, -8.0, -8.0, 0.0, {0.0, 10.0}, 0.01, 2.0);
        for (std::size_t k = 0; k < c.tau.size(); ++k) {
            CHECK(c.alpha_prime_usual[k] == doctest::Approx(c.alpha_prime_full[k]).epsilon(0.01));
            CHECK(c.alpha_prime_bsc[k] == doctest::Approx(c.alpha_prime_full[k]).epsilon(0.01));
        }
    }
    SUBCASE("u = v: usual scheme within 2 percent in RMS") {
        const auto c = compare_schemes({3.0, 3.0, 1.0, Mode::Superposition}, -8.0, -8.0, 0.0, {-10.0, 20.0}, 0.01, 2.0);
        double se = 0.0, sf = 0.0;
        for (std::size_t k = 0; k < c.tau.size(); ++k) {
            se += std::pow(c.alpha_prime_usual[k] - c.alpha_prime_full[k], 2);
            sf += std::pow(c.alpha_prime_full[k], 2);
        }
        CHECK(std::sqrt(se / sf) < 0.02);
    }
    SUBCASE("u = 1, v = 5") {
        const auto c = compare_schemes(kSup, -8.0, -8.0, 0.0, {-10.0, 20.0}, 0.01, 2.0);
        CHECK(c.mean_alpha_prime_full_early == doctest::Approx(1.0).epsilon(0.1));
        CHECK(c.mean_alpha_prime_full_late == doctest::Approx(5.0).epsilon(0.1));
        CHECK(c.rms_bsc_early < 0.1);
        CHECK(c.rms_bsc_late < 0.1);
        CHECK(c.rms_usual_early > 1.0);
        CHECK(c.rms_usual_late > 1.0);
        CHECK(std::abs(c.slope_early_full) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS((WDWParams{1.0, 5.0, -1.0, Mode::R}.validate()), ShapeError);
    CHECK_THROWS(mode_from_string("sideways"));
    CHECK(mode_from_string("superposition") == Mode::Superposition);
    CHECK_FALSE(WDWParams{1.0, 5.0, 1.0, Mode::Superposition}.regime_warnings().empty());
    CHECK(WDWParams{10.0, 20.0, 2.0, Mode::Superposition}.regime_warnings().empty());
}
