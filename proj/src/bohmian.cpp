#include "bohmsemi/bohmian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bohmsemi/errors.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/parallel.hpp"
#include "bohmsemi/propagator.hpp"
#include "bohmsemi/stencil.hpp"

namespace bohmsemi {

void NodePolicy::validate() const {
    if (!(eps_node > 0.0)) throw ShapeError("eps_node must be positive");
    if (!(v_max > 0.0)) throw ShapeError("v_max must be positive");
}

namespace {

void require_inside(const Grid1D& g, double x, const char* what) {
    const double tol = 1e-12 * g.dx();
    if (!(x >= g.x_min() - tol && x <= g.x_max() + tol))
        throw OutOfDomain(std::string(what) + " = " + std::to_string(x) + " lies outside [" +
                          std::to_string(g.x_min()) + ", " + std::to_string(g.x_max()) + "]");
}

double clamp_to(const Grid1D& g, double x, std::uint32_t& flags) {
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

std::size_t step_count(double span, double dt) {
    if (!(dt > 0.0)) throw ShapeError("time step must be positive");
    if (!(span >= 0.0)) throw ShapeError("end time precedes start time");
    return static_cast<std::size_t>(std::max<long long>(0, std::llround(span / dt)));
}

}  // namespace

LocalAmplitude1D evaluate(const WaveFunction1D& wf, double x) {
    const auto& g = wf.grid;
    require_inside(g, x, "x");
    const std::size_t n = g.size();
    const auto& p = wf.psi;
    auto psi_at = [&](std::size_t j) { return p[j]; };
    auto dpsi_at = [&](std::size_t j) { return stencil::d1(psi_at, n, j, g.dx()); };
    const auto c = stencil::cubic(g, x);
    return {stencil::apply(c, psi_at), stencil::apply(c, dpsi_at)};
}

LocalAmplitude2D evaluate(const WaveFunction2D& wf, double x1, double x2) {
    const auto& g1 = wf.grid.axis1();
    const auto& g2 = wf.grid.axis2();
    require_inside(g1, x1, "x1");
    require_inside(g2, x2, "x2");
    const std::size_t n1 = g1.size();
    const std::size_t n2 = g2.size();
    const auto c1 = stencil::cubic(g1, x1);
    const auto c2 = stencil::cubic(g2, x2);

    LocalAmplitude2D out{};
    for (std::size_t a = 0; a < 4; ++a) {
        const std::size_t i = c1.first + a;
        Complex psi{}, d1{}, d2{};
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t j = c2.first + b;
            const double w = c2.w[b];
            psi += w * wf.at(i, j);
            d1 += w * stencil::d1([&](std::size_t k) { return wf.at(k, j); }, n1, i, g1.dx());
            d2 += w * stencil::d1([&](std::size_t k) { return wf.at(i, k); }, n2, j, g2.dx());
        }
        out.psi += c1.w[a] * psi;
        out.d1 += c1.w[a] * d1;
        out.d2 += c1.w[a] * d2;
    }
    return out;
}

VelocitySample guidance_velocity(const LocalAmplitude1D& a, double mass, double peak_density,
                                 const NodePolicy& policy) {
    const double rho = std::norm(a.psi);
    VelocitySample out;
    if (rho == 0.0) {
        out.regularized = true;
        return out;
    }
    out.v = std::imag(a.dpsi * std::conj(a.psi)) / (rho * mass);
    if (rho < policy.eps_node * peak_density) {
        out.regularized = true;
        out.v = std::clamp(out.v, -policy.v_max, policy.v_max);
    }
    return out;
}

VelocitySample2D guidance_velocity(const LocalAmplitude2D& a, double m1, double m2, double peak_density,
                                   const NodePolicy& policy) {
    const double rho = std::norm(a.psi);
    VelocitySample2D out;
    if (rho == 0.0) {
        out.regularized = true;
        return out;
    }
    out.v = {std::imag(a.d1 * std::conj(a.psi)) / (rho * m1), std::imag(a.d2 * std::conj(a.psi)) / (rho * m2)};
    if (rho < policy.eps_node * peak_density) {
        out.regularized = true;
        const double speed = std::hypot(out.v[0], out.v[1]);
        if (speed > policy.v_max) {
            out.v[0] *= policy.v_max / speed;
            out.v[1] *= policy.v_max / speed;
        }
    }
    return out;
}

VelocitySample velocity_at(const WaveFunction1D& wf, double x, double mass, const NodePolicy& policy) {
    return guidance_velocity(evaluate(wf, x), mass, wf.peak_density(), policy);
}

VelocitySample2D velocity_at(const WaveFunction2D& wf, double x1, double x2, double m1, double m2,
                             const NodePolicy& policy) {
    return guidance_velocity(evaluate(wf, x1, x2), m1, m2, wf.peak_density(), policy);
}

std::vector<double> probability_current(const WaveFunction1D& wf, double mass) {
    const std::size_t n = wf.psi.size();
    auto psi_at = [&](std::size_t j) { return wf.psi[j]; };
    std::vector<double> j(n);
    for (std::size_t i = 0; i < n; ++i)
        j[i] = std::imag(std::conj(wf.psi[i]) * stencil::d1(psi_at, n, i, wf.grid.dx())) / mass;
    return j;
}

std::size_t QuantumPotential::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

QuantumPotential quantum_potential(const WaveFunction1D& wf, double mass, double eps_node) {
    if (!(mass > 0.0)) throw ShapeError("mass must be positive");
    const std::size_t n = wf.psi.size();
    std::vector<double> amp(n);
    for (std::size_t i = 0; i < n; ++i) amp[i] = std::abs(wf.psi[i]);
    const double threshold = eps_node * wf.peak_density();
    auto amp_at = [&](std::size_t j) { return amp[j]; };

    QuantumPotential q{PotentialField(std::vector<double>(n, 0.0), "quantum potential"),
                       std::vector<std::uint8_t>(n, 0)};
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const double rho = amp[i] * amp[i];
        if (rho <= 0.0 || rho < threshold) continue;
        q.field.values[i] = -stencil::d2(amp_at, n, i, wf.grid.dx()) / (2.0 * mass * amp[i]);
        q.valid[i] = 1;
    }
    return q;
}

FrameHistory1D::FrameHistory1D(std::vector<WaveFunction1D> frames) {
    for (auto& f : frames) push(std::move(f));
}

void FrameHistory1D::push(WaveFunction1D frame) {
    if (!frames_.empty()) {
        if (!(frame.grid == frames_.front().grid)) throw ShapeError("frames must share one grid");
        if (!(frame.t > frames_.back().t)) throw ShapeError("frame times must increase");
    }
    peaks_.push_back(frame.peak_density());
    frames_.push_back(std::move(frame));
}

double FrameHistory1D::t_begin() const {
    if (frames_.empty()) throw FrameGap("no frames stored");
    return frames_.front().t;
}

double FrameHistory1D::t_end() const {
    if (frames_.empty()) throw FrameGap("no frames stored");
    return frames_.back().t;
}

const Grid1D& FrameHistory1D::grid() const {
    if (frames_.empty()) throw FrameGap("no frames stored");
    return frames_.front().grid;
}

bool FrameHistory1D::covers(double t) const {
    if (frames_.empty()) return false;
    const double tol = 1e-9 * std::max(1.0, std::abs(t));
    return t >= t_begin() - tol && t <= t_end() + tol;
}

std::pair<std::size_t, double> FrameHistory1D::locate(double t) const {
    if (!covers(t))
        throw FrameGap("time " + std::to_string(t) + " is not covered by the stored frames");
    if (frames_.size() == 1) return {0, 0.0};
    auto it = std::upper_bound(frames_.begin(), frames_.end(), t,
                               [](double v, const WaveFunction1D& f) { return v < f.t; });
    auto i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - frames_.begin()) - 1));
    i = std::min(i, frames_.size() - 2);
    const double t0 = frames_[i].t;
    const double t1 = frames_[i + 1].t;
    return {i, std::clamp((t - t0) / (t1 - t0), 0.0, 1.0)};
}

LocalAmplitude1D FrameHistory1D::amplitude(double x, double t, double* peak) const {
    const auto [i, w] = locate(t);
    if (frames_.size() == 1 || w == 0.0) {
        if (peak) *peak = peaks_[i];
        return evaluate(frames_[i], x);
    }
    const auto a = evaluate(frames_[i], x);
    const auto b = evaluate(frames_[i + 1], x);
    if (peak) *peak = (1.0 - w) * peaks_[i] + w * peaks_[i + 1];
    return {(1.0 - w) * a.psi + w * b.psi, (1.0 - w) * a.dpsi + w * b.dpsi};
}

namespace {

template <class Amplitude>
TrajectoryRecord integrate_1d(Amplitude&& amplitude, const Grid1D& grid, const ParticleState& x0,
                              double t_end, double dt, double mass, const NodePolicy& policy) {
    policy.validate();
    const std::size_t steps = step_count(t_end - x0.t, dt);
    const double h = steps ? (t_end - x0.t) / static_cast<double>(steps) : 0.0;

    auto field = [&](const std::array<double, 1>& x, double t) {
        std::uint32_t flags = 0;
        const double xc = clamp_to(grid, x[0], flags);
        double peak = 0.0;
        const auto a = amplitude(xc, t, peak);
        const auto s = guidance_velocity(a, mass, peak, policy);
        if (s.regularized) flags |= kNodeRegularized;
        return std::pair{std::array<double, 1>{s.v}, flags};
    };

    TrajectoryRecord rec;
    std::array<double, 1> x{x0.x[0]};
    std::uint32_t flags = 0;
    x[0] = clamp_to(grid, x[0], flags);
    double t = x0.t;
    auto [v, vf] = field(x, t);
    rec.append(t, x, v, flags | vf);
    for (std::size_t k = 0; k < steps; ++k) {
        auto [next, step_flags] = rk4_step<1>(field, x, t, h);
        next[0] = clamp_to(grid, next[0], step_flags);
        x = next;
        t = x0.t + static_cast<double>(k + 1) * h;
        auto [vn, fn] = field(x, t);
        rec.append(t, x, vn, step_flags | fn);
    }
    return rec;
}

}  // namespace

TrajectoryRecord advance_trajectory(const FrameHistory1D& frames, const ParticleState& x0, double t_end,
                                    double dt, double mass, const NodePolicy& policy) {
    if (!frames.covers(x0.t) || !frames.covers(t_end))
        throw FrameGap("frames cover [" + std::to_string(frames.frames().empty() ? 0.0 : frames.t_begin()) +
                       ", " + std::to_string(frames.frames().empty() ? 0.0 : frames.t_end()) +
                       "] but the trajectory needs [" + std::to_string(x0.t) + ", " + std::to_string(t_end) +
                       "]");
    auto amp = [&](double x, double t, double& peak) { return frames.amplitude(x, t, &peak); };
    return integrate_1d(amp, frames.grid(), x0, t_end, dt, mass, policy);
}

TrajectoryRecord advance_trajectory(const AnalyticState1D& state, const ParticleState& x0, double t_end,
                                    double dt, double mass, const NodePolicy& policy) {
    const std::size_t n = 8;
    const Grid1D domain(state.x_min, state.x_max, n);
    auto amp = [&](double x, double t, double& peak) {
        peak = state.peak_density ? state.peak_density(t) : 0.0;
        return state.eval(x, t);
    };
    return integrate_1d(amp, domain, x0, t_end, dt, mass, policy);
}

EquivarianceResult equivariance_test(const WaveFunction1D& wf0, const PotentialField& V, double mass,
                                     std::size_t count, double T, std::uint64_t seed,
                                     const EquivarianceOptions& options) {
    if (!(T > 0.0)) throw ShapeError("equivariance span must be positive");
    const double dt = options.dt > 0.0 ? options.dt : T / 400.0;
    const std::size_t steps = step_count(T, dt);
    const double h = T / static_cast<double>(steps);

    FrameHistory1D frames;
    WaveFunction1D wf = wf0;
    frames.push(wf);
    CrankNicolson1D cn;
    for (std::size_t k = 0; k < steps; ++k) {
        cn.step(wf.psi, V.values, wf.grid.dx(), h, mass);
        wf.t = wf0.t + static_cast<double>(k + 1) * h;
        frames.push(wf);
    }

    EquivarianceResult r;
    r.initial_positions = sample_density(wf0, count, seed);
    r.ks_initial = ks_distance(r.initial_positions, wf0);
    r.final_positions.assign(count, 0.0);
    std::vector<std::size_t> flagged(count, 0);
    const double t_end = wf.t;
    parallel_for(count, options.threads, [&](std::size_t i) {
        ParticleState p;
        p.x[0] = r.initial_positions[i];
        p.t = wf0.t;
        const auto rec = advance_trajectory(frames, p, t_end, h, mass, options.policy);
        r.final_positions[i] = rec.positions.back();
        flagged[i] = rec.count(kNodeRegularized | kBoundaryClamped);
    });
    for (auto f : flagged) r.flagged_steps += f;
    r.ks_final = ks_distance(r.final_positions, wf);
    r.final_state = std::move(wf);
    return r;
}

namespace {

/// dQ/dx at grid nodes, valid where the whole five-point stencil is valid.
struct QuantumForceGrid {
    std::vector<double> dq;
    std::vector<std::uint8_t> valid;
};

QuantumForceGrid quantum_gradient(const WaveFunction1D& wf, double mass, double eps_node) {
    const auto q = quantum_potential(wf, mass, eps_node);
    const std::size_t n = wf.psi.size();
    QuantumForceGrid g{std::vector<double>(n, 0.0), std::vector<std::uint8_t>(n, 0)};
    auto q_at = [&](std::size_t j) { return q.field.values[j]; };
    for (std::size_t j = 2; j + 2 < n; ++j) {
        bool ok = true;
        for (std::size_t k = j - 2; k <= j + 2; ++k) ok = ok && q.valid[k];
        if (!ok) continue;
        g.dq[j] = stencil::d1(q_at, n, j, wf.grid.dx());
        g.valid[j] = 1;
    }
    return g;
}

}  // namespace

double NewtonResidual::max_abs_residual() const {
    double m = 0.0;
    for (std::size_t k = 0; k < residual.size(); ++k)
        if (valid[k]) m = std::max(m, std::abs(residual[k]));
    return m;
}

double NewtonResidual::max_abs_quantum_force() const {
    double m = 0.0;
    for (std::size_t k = 0; k < quantum_force.size(); ++k)
        if (valid[k]) m = std::max(m, std::abs(quantum_force[k]));
    return m;
}

double NewtonResidual::max_abs_classical_force() const {
    double m = 0.0;
    for (std::size_t k = 0; k < classical_force.size(); ++k)
        if (valid[k]) m = std::max(m, std::abs(classical_force[k]));
    return m;
}

bool NewtonResidual::classical(double ratio) const {
    return max_abs_quantum_force() <= ratio * max_abs_classical_force();
}

NewtonResidual newton_residual(const TrajectoryRecord& traj, const FrameHistory1D& frames,
                               const PotentialField& V, double mass, double eps_node) {
    if (traj.dim != 1) throw ShapeError("newton_residual expects a 1D trajectory");
    const auto& grid = frames.grid();
    if (V.size() != grid.size()) throw ShapeError("potential does not match the grid");
    const std::size_t n = grid.size();
    const std::size_t count = traj.size();

    std::vector<std::optional<QuantumForceGrid>> cache(frames.frames().size());
    auto qgrad = [&](std::size_t f) -> const QuantumForceGrid& {
        if (!cache[f]) cache[f] = quantum_gradient(frames.frames()[f], mass, eps_node);
        return *cache[f];
    };
    auto v_at = [&](std::size_t j) { return V.values[j]; };

    NewtonResidual r;
    r.times = traj.times;
    r.residual.assign(count, 0.0);
    r.quantum_force.assign(count, 0.0);
    r.classical_force.assign(count, 0.0);
    r.newton_deviation.assign(count, 0.0);
    r.valid.assign(count, 0);

    for (std::size_t k = 1; k + 1 < count; ++k) {
        const double x = traj.position(k);
        const double t = traj.times[k];
        const auto c = stencil::cubic(grid, x);
        const double dV = stencil::apply(c, [&](std::size_t j) { return stencil::d1(v_at, n, j, grid.dx()); });

        const auto [fi, w] = frames.locate(t);
        bool ok = true;
        auto grad_from = [&](std::size_t f) {
            const auto& g = qgrad(f);
            double s = 0.0;
            for (std::size_t a = 0; a < 4; ++a) {
                ok = ok && g.valid[c.first + a];
                s += c.w[a] * g.dq[c.first + a];
            }
            return s;
        };
        double dQ = grad_from(fi);
        if (w > 0.0) dQ = (1.0 - w) * dQ + w * grad_from(fi + 1);

        const double accel = (traj.velocity(k + 1) - traj.velocity(k - 1)) / (traj.times[k + 1] - traj.times[k - 1]);
        r.classical_force[k] = -dV;
        r.quantum_force[k] = -dQ;
        r.newton_deviation[k] = mass * accel + dV;
        r.residual[k] = mass * accel + dV + dQ;
        r.valid[k] = ok && !(traj.flags[k] & (kNodeRegularized | kBoundaryClamped)) ? 1 : 0;
    }
    return r;
}

}  // namespace bohmsemi
