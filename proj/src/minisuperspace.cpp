#include "bohmsemi/minisuperspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"

namespace bohmsemi::mini {

namespace {

constexpr Complex I{0.0, 1.0};

bool finite_all(std::initializer_list<double> xs) {
    for (double x : xs)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace

void MiniModelParams::validate() const {
    if (!(kappa > 0.0)) throw ShapeError("kappa must be positive");
    if (!finite_all({kappa, k_curv, Lambda, V_M})) throw ShapeError("model constants must be finite");
}

bool MiniModelParams::is_default() const {
    return kappa == 1.0 && k_curv == 0.0 && Lambda == 0.0 && V_M == 0.0;
}

const char* to_string(Mode m) {
    switch (m) {
        case Mode::R: return "R";
        case Mode::L: return "L";
        case Mode::Superposition: return "superposition";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "R") return Mode::R;
    if (s == "L") return Mode::L;
    if (s == "superposition") return Mode::Superposition;
    throw ShapeError("mode must be one of R, L, superposition (got '" + s + "')");
}

void WDWParams::validate() const {
    if (!finite_all({u, v, sigma})) throw ShapeError("u, v and sigma must be finite");
    if (!(sigma > 0.0)) throw ShapeError("sigma must be positive");
}

std::vector<std::string> WDWParams::regime_warnings() const {
    std::vector<std::string> w;
    if (mode == Mode::Superposition && !(v > u)) w.push_back("v > u is assumed for the superposition");
    if (!(u > 0.0)) w.push_back("u > 0 is assumed");
    if (!(sigma * u >= 10.0)) w.push_back("sigma * u >> 1 is assumed (sigma * u = " + std::to_string(sigma * u) + ")");
    return w;
}

namespace {

struct Branch {
    Complex log_value;  // log of the branch amplitude
    Complex g;          // d_phi log
    double sign;        // d_alpha = sign * d_phi on this branch
};

Branch branch_r(const WDWParams& p, double phi, double alpha) {
    const double w = phi - alpha;
    const double c = 1.0 / (2.0 * p.sigma * p.sigma);
    return {I * p.u * w - 0.5 * c * w * w, I * p.u - c * w, -1.0};
}

Branch branch_l(const WDWParams& p, double phi, double alpha) {
    const double z = phi + alpha;
    const double c = 1.0 / (2.0 * p.sigma * p.sigma);
    return {-I * p.v * z - 0.5 * c * z * z, -I * p.v - c * z, +1.0};
}

int branches(const WDWParams& p, double phi, double alpha, std::array<Branch, 2>& out) {
    switch (p.mode) {
        case Mode::R: out[0] = branch_r(p, phi, alpha); return 1;
        case Mode::L: out[0] = branch_l(p, phi, alpha); return 1;
        case Mode::Superposition:
            out[0] = branch_r(p, phi, alpha);
            out[1] = branch_l(p, phi, alpha);
            return 2;
    }
    return 0;
}

}  // namespace

Complex psi_wdw(const WDWParams& p, double phi, double alpha) {
    p.validate();
    std::array<Branch, 2> b;
    const int n = branches(p, phi, alpha, b);
    Complex sum{};
    for (int k = 0; k < n; ++k) sum += std::exp(b[k].log_value);
    return sum;
}

double WDWDerivatives::amp_phi2() const {
    return ratio[0][2].real() + ratio[0][1].imag() * ratio[0][1].imag();
}

double WDWDerivatives::amp_alpha2() const {
    return ratio[2][0].real() + ratio[1][0].imag() * ratio[1][0].imag();
}

double WDWDerivatives::d_phi_amp_phi2() const {
    const Complex r1 = ratio[0][1], r2 = ratio[0][2], r3 = ratio[0][3];
    return (r3 - r2 * r1).real() + 2.0 * r1.imag() * (r2 - r1 * r1).imag();
}

double WDWDerivatives::d_phi_amp_alpha2() const {
    const Complex a1 = ratio[1][0], a2 = ratio[2][0], p1 = ratio[0][1];
    return (ratio[2][1] - a2 * p1).real() + 2.0 * a1.imag() * (ratio[1][1] - a1 * p1).imag();
}

WDWDerivatives wdw_derivatives(const WDWParams& p, double phi, double alpha) {
    p.validate();
    std::array<Branch, 2> b;
    const int n = branches(p, phi, alpha, b);
    const double c = 1.0 / (2.0 * p.sigma * p.sigma);
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) top = std::max(top, b[k].log_value.real());

    WDWDerivatives d;
    Complex sum{};
    for (int k = 0; k < n; ++k) {
        const Complex w = std::exp(b[k].log_value - top);
        const Complex g = b[k].g;
        const std::array<Complex, 4> D{1.0, g, g * g - c, g * g * g - 3.0 * c * g};
        sum += w;
        for (int a = 0; a < 4; ++a)
            for (int q = 0; a + q < 4; ++q) d.ratio[a][q] += w * std::pow(b[k].sign, a) * D[a + q];
    }
    d.log_abs_psi = top + std::log(std::abs(sum));
    if (!(2.0 * d.log_abs_psi >= std::log(1e-300)))
        throw NodePoint("|psi|^2 below 1e-300 at (phi, alpha) = (" + std::to_string(phi) + ", " +
                        std::to_string(alpha) + ")");
    for (int a = 0; a < 4; ++a)
        for (int q = 0; a + q < 4; ++q) d.ratio[a][q] /= sum;
    return d;
}

WDWVelocity wdw_velocity(const WDWParams& p, double phi, double alpha) {
    const auto d = wdw_derivatives(p, phi, alpha);
    return {-d.mixed(1, 0).imag(), d.mixed(0, 1).imag()};
}

void StepPolicy::validate() const {
    if (!(tol > 0.0)) throw ShapeError("step tolerance must be positive");
    if (!(floor_fraction > 0.0 && floor_fraction <= 1.0)) throw ShapeError("floor_fraction must lie in (0, 1]");
    if (!(alpha_stop >= 0.0)) throw ShapeError("alpha_stop must be non-negative");
}

namespace {

using Vec2 = std::array<double, 2>;

/// Advances y from t to t_target with step-doubling RK4. `h_try` carries the last accepted
/// sub-step size between calls.
template <class Field>
Vec2 advance(Field& f, Vec2 y, double t, double t_target, double dtau, const StepPolicy& pol, double& h_try,
             std::uint32_t& flags) {
    const double floor = pol.floor_fraction * dtau;
    const double dir = t_target >= t ? 1.0 : -1.0;
    while (dir * (t_target - t) > 1e-12 * dtau) {
        const double remaining = t_target - t;
        const double h = dir * std::min(h_try, std::abs(remaining));
        const bool at_floor = std::abs(h) <= floor * (1.0 + 1e-12);
        double err;
        Vec2 next{};
        std::uint32_t step_flags = 0;
        try {
            const auto [full, f0] = rk4_step<2>(f, y, t, h);
            const auto [half, f1] = rk4_step<2>(f, y, t, 0.5 * h);
            const auto [two, f2] = rk4_step<2>(f, half, t + 0.5 * h, 0.5 * h);
            err = std::max(std::abs(full[0] - two[0]), std::abs(full[1] - two[1]));
            if (!std::isfinite(err)) err = std::numeric_limits<double>::infinity();
            next = two;
            step_flags = f0 | f1 | f2;
        } catch (const NodePoint&) {
            if (at_floor) throw;
            err = std::numeric_limits<double>::infinity();
        }
        if (err <= pol.tol || at_floor) {
            if (!std::isfinite(err))
                throw UnstableState("non-finite step at tau = " + std::to_string(t));
            if (err > pol.tol) flags |= kStepFloor;
            flags |= step_flags;
            y = next;
            t = (std::abs(remaining - h) <= 1e-12 * dtau) ? t_target : t + h;
            if (err < pol.tol / 64.0) h_try = std::min(2.0 * std::abs(h), dtau);
        } else {
            h_try = std::max(0.5 * std::abs(h), floor);
        }
    }
    return y;
}

/// Output grid tau0 + k dtau inside [begin, end].
std::pair<long long, long long> grid_range(double tau0, TauSpan span, double dtau) {
    if (!(dtau > 0.0)) throw ShapeError("dtau must be positive");
    if (!(span.begin <= tau0 && tau0 <= span.end))
        throw ShapeError("the start time must lie inside the integration span");
    const auto lo = static_cast<long long>(std::ceil((span.begin - tau0) / dtau - 1e-9));
    const auto hi = static_cast<long long>(std::floor((span.end - tau0) / dtau + 1e-9));
    return {lo, hi};
}

/// Backward then forward sweeps from (y0, tau0); `velocity(y, t)` returns (velocity, flags).
template <class Field>
TrajectoryRecord sweep(Field& f, Vec2 y0, double tau0, TauSpan span, double dtau, const StepPolicy& pol) {
    pol.validate();
    const auto [lo, hi] = grid_range(tau0, span, dtau);
    struct Sample {
        double t;
        Vec2 y, v;
        std::uint32_t flags;
    };
    auto sample = [&](double t, const Vec2& y, std::uint32_t flags) {
        auto [v, fv] = f(y, t);
        return Sample{t, y, v, flags | fv};
    };
    auto stopped = [&](const Vec2& y) { return pol.alpha_stop > 0.0 && std::abs(y[1]) >= pol.alpha_stop; };

    std::vector<Sample> back;
    {
        Vec2 y = y0;
        double h = dtau;
        for (long long k = -1; k >= lo && !stopped(y); --k) {
            std::uint32_t flags = 0;
            const double t_from = tau0 + static_cast<double>(k + 1) * dtau;
            const double t_to = tau0 + static_cast<double>(k) * dtau;
            y = advance(f, y, t_from, t_to, dtau, pol, h, flags);
            back.push_back(sample(t_to, y, flags));
        }
    }
    TrajectoryRecord rec({"phi", "alpha"});
    for (auto it = back.rbegin(); it != back.rend(); ++it) rec.append(it->t, it->y, it->v, it->flags);
    const auto first = sample(tau0, y0, 0);
    rec.append(first.t, first.y, first.v, first.flags);
    Vec2 y = y0;
    double h = dtau;
    for (long long k = 1; k <= hi && !stopped(y); ++k) {
        std::uint32_t flags = 0;
        const double t_from = tau0 + static_cast<double>(k - 1) * dtau;
        const double t_to = tau0 + static_cast<double>(k) * dtau;
        y = advance(f, y, t_from, t_to, dtau, pol, h, flags);
        const auto s = sample(t_to, y, flags);
        rec.append(s.t, s.y, s.v, s.flags);
    }
    return rec;
}

}  // namespace

TrajectoryRecord integrate_wdw(const WDWParams& p, const MiniState& s0, TauSpan span, double dtau,
                               const StepPolicy& policy) {
    p.validate();
    auto field = [&](const Vec2& y, double) {
        const auto v = wdw_velocity(p, y[0], y[1]);
        return std::pair{Vec2{v.phi_prime, v.alpha_prime}, std::uint32_t{0}};
    };
    return sweep(field, Vec2{s0.phi, s0.alpha}, s0.tau, span, dtau, policy);
}

const char* to_string(Label l) {
    switch (l) {
        case Label::LeftToLeft: return "left->left";
        case Label::RightToRight: return "right->right";
        case Label::RightToLeft: return "right->left";
        case Label::LeftToRight: return "left->right";
        case Label::Cyclic: return "cyclic";
        case Label::Undetermined: return "undetermined";
    }
    return "?";
}

namespace {

double segment_distance(double px, double py, double ax, double ay, double bx, double by) {
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    double s = len2 > 0.0 ? ((px - ax) * dx + (py - ay) * dy) / len2 : 0.0;
    s = std::clamp(s, 0.0, 1.0);
    return std::hypot(px - (ax + s * dx), py - (ay + s * dy));
}

}  // namespace

Label classify_trajectory(const TrajectoryRecord& traj, const ClassifyOptions& o) {
    if (traj.dim != 2 || traj.size() < 3) return Label::Undetermined;
    const std::size_t n = traj.size();
    const double x0 = traj.position(0, 0), y0 = traj.position(0, 1);
    const double vx0 = traj.velocity(0, 0), vy0 = traj.velocity(0, 1);
    const double v0n = std::hypot(vx0, vy0);

    double reach = 0.0;
    for (std::size_t k = 1; k + 1 < n && v0n > 0.0; ++k) {
        reach = std::max(reach, std::hypot(traj.position(k, 0) - x0, traj.position(k, 1) - y0));
        if (reach <= 10.0 * o.delta_cycle) continue;
        const double d = segment_distance(x0, y0, traj.position(k, 0), traj.position(k, 1), traj.position(k + 1, 0),
                                          traj.position(k + 1, 1));
        if (d >= o.delta_cycle) continue;
        const double vx = traj.velocity(k, 0), vy = traj.velocity(k, 1);
        const double vn = std::hypot(vx, vy);
        if (vn > 0.0 && (vx * vx0 + vy * vy0) / (vn * v0n) > o.cos_min) return Label::Cyclic;
    }

    std::size_t low = 0, high = n - 1;
    if (traj.position(low, 1) > traj.position(high, 1)) std::swap(low, high);
    if (!(traj.position(low, 1) <= -o.alpha_asym && traj.position(high, 1) >= o.alpha_asym))
        return Label::Undetermined;
    const bool start_left = traj.position(low, 0) < 0.0;
    const bool end_left = traj.position(high, 0) < 0.0;
    if (start_left) return end_left ? Label::LeftToLeft : Label::LeftToRight;
    return end_left ? Label::RightToLeft : Label::RightToRight;
}

double FriedmannResidual::max_abs_constraint() const {
    double m = 0.0;
    for (std::size_t k = 0; k < constraint.size(); ++k)
        if (valid[k]) m = std::max(m, std::abs(constraint[k]));
    return m;
}

double FriedmannResidual::max_abs_field() const {
    double m = 0.0;
    for (std::size_t k = 0; k < field.size(); ++k)
        if (valid[k]) m = std::max(m, std::abs(field[k]));
    return m;
}

FriedmannResidual friedmann_residual(const WDWParams& p, const TrajectoryRecord& traj, const MiniModelParams& model) {
    model.validate();
    if (!model.is_default())
        throw ShapeError("friedmann_residual supports kappa = 1 with vanishing curvature, Lambda and V_M only");
    if (traj.dim != 2) throw ShapeError("expected a (phi, alpha) trajectory");
    const std::size_t n = traj.size();
    FriedmannResidual r;
    r.tau = traj.times;
    r.constraint.assign(n, 0.0);
    r.field.assign(n, 0.0);
    r.classical.assign(n, 0.0);
    r.valid.assign(n, 0);
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double dt = traj.times[k + 1] - traj.times[k - 1];
        const double phi_p = (traj.position(k + 1, 0) - traj.position(k - 1, 0)) / dt;
        const double alpha_p = (traj.position(k + 1, 1) - traj.position(k - 1, 1)) / dt;
        const double phi_pp = (traj.velocity(k + 1, 0) - traj.velocity(k - 1, 0)) / dt;
        const auto d = wdw_derivatives(p, traj.position(k, 0), traj.position(k, 1));
        r.classical[k] = alpha_p * alpha_p - phi_p * phi_p;
        r.constraint[k] = r.classical[k] + d.amp_phi2() - d.amp_alpha2();
        r.field[k] = phi_pp - 0.5 * (d.d_phi_amp_phi2() - d.d_phi_amp_alpha2());
        r.valid[k] = 1;
    }
    return r;
}

namespace {

struct ChiBranch {
    Complex log_value;
    Complex g;  // d_phi log chi
    Complex c;  // -d_phi^2 log chi
};

ChiBranch chi_branch(PacketKind kind, const WDWParams& p, double alpha0, double tau0, double phi, double tau) {
    const double tb = tau - tau0;
    const double sig = p.sigma;
    const Complex s = sig * Complex(1.0, tb / (2.0 * sig * sig));
    const Complex norm = -0.25 * std::log(2.0 * std::numbers::pi * s * s);
    const Complex c = 1.0 / (2.0 * s * sig);
    if (kind == PacketKind::R) {
        const double x = phi - alpha0 - p.u * tb;
        return {norm + I * p.u * (phi - alpha0 - 0.5 * p.u * tb) - 0.5 * c * x * x, I * p.u - c * x, c};
    }
    const double x = phi + alpha0 + p.v * tb;
    return {norm - I * p.v * (phi + alpha0 + 0.5 * p.v * tb) - 0.5 * c * x * x, -I * p.v - c * x, c};
}

int chi_branches(const WDWParams& p, double alpha0, double tau0, double phi, double tau,
                 std::array<ChiBranch, 2>& out) {
    switch (p.mode) {
        case Mode::R: out[0] = chi_branch(PacketKind::R, p, alpha0, tau0, phi, tau); return 1;
        case Mode::L: out[0] = chi_branch(PacketKind::L, p, alpha0, tau0, phi, tau); return 1;
        case Mode::Superposition:
            out[0] = chi_branch(PacketKind::R, p, alpha0, tau0, phi, tau);
            out[1] = chi_branch(PacketKind::L, p, alpha0, tau0, phi, tau);
            return 2;
    }
    return 0;
}

}  // namespace

Complex chi_free_packet(PacketKind kind, const WDWParams& p, double alpha0, double tau0, double phi, double tau) {
    p.validate();
    return std::exp(chi_branch(kind, p, alpha0, tau0, phi, tau).log_value);
}

Complex chi_state(const WDWParams& p, double alpha0, double tau0, double phi, double tau) {
    switch (p.mode) {
        case Mode::R: return chi_free_packet(PacketKind::R, p, alpha0, tau0, phi, tau);
        case Mode::L: return chi_free_packet(PacketKind::L, p, alpha0, tau0, phi, tau);
        case Mode::Superposition:
            return (chi_free_packet(PacketKind::R, p, alpha0, tau0, phi, tau) +
                    chi_free_packet(PacketKind::L, p, alpha0, tau0, phi, tau)) /
                   std::sqrt(2.0);
    }
    return {};
}

ChiRatios chi_ratios(const WDWParams& p, double alpha0, double tau0, double phi, double tau) {
    p.validate();
    std::array<ChiBranch, 2> b;
    const int n = chi_branches(p, alpha0, tau0, phi, tau, b);
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) top = std::max(top, b[k].log_value.real());
    Complex sum{}, d1{}, d2{};
    for (int k = 0; k < n; ++k) {
        const Complex w = std::exp(b[k].log_value - top);
        sum += w;
        d1 += w * b[k].g;
        d2 += w * (b[k].g * b[k].g - b[k].c);
    }
    if (std::norm(sum) < 1e-300)
        throw NodePoint("chi vanishes at phi = " + std::to_string(phi) + ", tau = " + std::to_string(tau));
    return {d1 / sum, d2 / sum};
}

double two_h_closed_form(const WDWParams& p) {
    p.validate();
    const double spread = 1.0 / (4.0 * p.sigma * p.sigma);
    switch (p.mode) {
        case Mode::R: return p.u * p.u + spread;
        case Mode::L: return p.v * p.v + spread;
        case Mode::Superposition: return 0.5 * (p.u * p.u + p.v * p.v) + spread;
    }
    return 0.0;
}

double two_h_quadrature(const WDWParams& p, double alpha0) {
    p.validate();
    const double kmax = std::max({std::abs(p.u), std::abs(p.v), 1e-12});
    const double dx = std::min(p.sigma / 40.0, 0.03 / kmax);
    const double reach = std::abs(alpha0) + 12.0 * p.sigma;
    const Grid1D g = Grid1D::with_spacing(-reach, reach, dx);
    const auto chi = WaveFunction1D::sample(g, [&](double x) { return chi_state(p, alpha0, 0.0, x, 0.0); });
    return 2.0 * expectation_kinetic(normalize(chi), 1.0);
}

UsualSCResult usual_sc_run(const WDWParams& p, double alpha0, double tau0, TauSpan span, double dtau) {
    UsualSCResult r;
    r.two_h_closed = two_h_closed_form(p);
    r.two_h_grid = two_h_quadrature(p, alpha0);
    r.alpha_prime = std::sqrt(r.two_h_closed);
    const auto [lo, hi] = grid_range(tau0, span, dtau);
    for (long long k = lo; k <= hi; ++k) {
        const double t = tau0 + static_cast<double>(k) * dtau;
        r.tau.push_back(t);
        r.alpha.push_back(alpha0 + r.alpha_prime * (t - tau0));
    }
    return r;
}

double bohmian_sc_alpha_prime_sq(const WDWParams& p, double alpha0, double tau0, double phi, double tau) {
    return -chi_ratios(p, alpha0, tau0, phi, tau).d2.real();
}

TrajectoryRecord bohmian_sc_run(const SCMiniState& s0, TauSpan span, double dtau, const StepPolicy& policy) {
    s0.packet.validate();
    if (s0.alpha_sign != 1 && s0.alpha_sign != -1) throw ShapeError("alpha_sign must be +1 or -1");
    const double sign = s0.alpha_sign;
    auto field = [&](const Vec2& y, double t) {
        const auto r = chi_ratios(s0.packet, s0.alpha0, s0.tau0, y[0], t);
        const double a2 = -r.d2.real();
        std::uint32_t flags = 0;
        double ap = 0.0;
        if (a2 < 0.0) flags |= kClassicallyForbidden;
        else ap = sign * std::sqrt(a2);
        return std::pair{Vec2{r.d1.imag(), ap}, flags};
    };
    return sweep(field, Vec2{s0.phi, s0.alpha}, s0.tau, span, dtau, policy);
}

namespace {

struct WindowStats {
    double rms_usual = 0.0, rms_bsc = 0.0, mean_full = 0.0, mean_bsc = 0.0, slope_full = 0.0, slope_bsc = 0.0;
};

WindowStats window_stats(const SchemeComparison& c, double lo, double hi) {
    WindowStats w;
    std::size_t count = 0, first = c.tau.size(), last = 0;
    for (std::size_t k = 0; k < c.tau.size(); ++k) {
        if (c.tau[k] < lo - 1e-12 || c.tau[k] > hi + 1e-12) continue;
        const double du = c.alpha_prime_usual[k] - c.alpha_prime_full[k];
        const double db = c.alpha_prime_bsc[k] - c.alpha_prime_full[k];
        w.rms_usual += du * du;
        w.rms_bsc += db * db;
        w.mean_full += c.alpha_prime_full[k];
        w.mean_bsc += c.alpha_prime_bsc[k];
        first = std::min(first, k);
        last = std::max(last, k);
        ++count;
    }
    if (count == 0) throw ShapeError("comparison window contains no samples");
    const double n = static_cast<double>(count);
    w.rms_usual = std::sqrt(w.rms_usual / n);
    w.rms_bsc = std::sqrt(w.rms_bsc / n);
    w.mean_full /= n;
    w.mean_bsc /= n;
    if (last > first) {
        w.slope_full = (c.alpha_full[last] - c.alpha_full[first]) / (c.phi_full[last] - c.phi_full[first]);
        w.slope_bsc = (c.alpha_bsc[last] - c.alpha_bsc[first]) / (c.phi_bsc[last] - c.phi_bsc[first]);
    }
    return w;
}

}  // namespace

SchemeComparison compare_schemes(const WDWParams& p, double phi0, double alpha0, double tau0, TauSpan span,
                                 double dtau, double window) {
    if (!(window > 0.0)) throw ShapeError("window must be positive");
    const auto full = integrate_wdw(p, MiniState{alpha0, phi0, tau0}, span, dtau);
    const auto usual = usual_sc_run(p, alpha0, tau0, span, dtau);
    SCMiniState s0;
    s0.phi = phi0;
    s0.alpha = alpha0;
    s0.alpha_sign = +1;
    s0.tau = tau0;
    s0.packet = p;
    s0.tau0 = tau0;
    s0.alpha0 = alpha0;
    const auto bsc = bohmian_sc_run(s0, span, dtau);
    if (full.size() != usual.tau.size() || bsc.size() != usual.tau.size())
        throw ShapeError("scheme outputs are not aligned");

    SchemeComparison c;
    c.tau = usual.tau;
    c.alpha_usual = usual.alpha;
    c.alpha_prime_usual.assign(c.tau.size(), usual.alpha_prime);
    for (std::size_t k = 0; k < c.tau.size(); ++k) {
        c.phi_full.push_back(full.position(k, 0));
        c.alpha_full.push_back(full.position(k, 1));
        c.alpha_prime_full.push_back(full.velocity(k, 1));
        c.phi_bsc.push_back(bsc.position(k, 0));
        c.alpha_bsc.push_back(bsc.position(k, 1));
        c.alpha_prime_bsc.push_back(bsc.velocity(k, 1));
    }
    c.flags = full.all_flags() | bsc.all_flags();
    const auto early = window_stats(c, c.tau.front(), c.tau.front() + window);
    const auto late = window_stats(c, c.tau.back() - window, c.tau.back());
    c.slope_early_full = early.slope_full;
    c.slope_late_full = late.slope_full;
    c.slope_early_bsc = early.slope_bsc;
    c.slope_late_bsc = late.slope_bsc;
    c.rms_usual_early = early.rms_usual;
    c.rms_usual_late = late.rms_usual;
    c.rms_bsc_early = early.rms_bsc;
    c.rms_bsc_late = late.rms_bsc;
    c.mean_alpha_prime_full_early = early.mean_full;
    c.mean_alpha_prime_full_late = late.mean_full;
    c.mean_alpha_prime_bsc_early = early.mean_bsc;
    c.mean_alpha_prime_bsc_late = late.mean_bsc;
    return c;
}

}  // namespace bohmsemi::mini
