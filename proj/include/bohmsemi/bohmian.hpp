#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bohmsemi/grid.hpp"
#include "bohmsemi/trajectory.hpp"

namespace bohmsemi {

/// Regularisation of the guidance law near nodes of psi, where Im(grad psi/psi)
/// is singular.
struct NodePolicy {
    double eps_node = 1e-12;  // density threshold as a fraction of the peak |psi|^2
    double v_max = 1e3;       // speed cap applied below the threshold

    void validate() const;
};

struct ParticleState {
    std::array<double, 2> x{};  // only x[0] is used in 1D
    double t = 0.0;
};

/// psi and its gradient interpolated to an off-grid point.
struct LocalAmplitude1D {
    Complex psi;
    Complex dpsi;
};

struct LocalAmplitude2D {
    Complex psi;
    Complex d1;
    Complex d2;
};

/// Cubic interpolation of psi and of its central-difference derivative.
/// Throws OutOfDomain outside the grid.
LocalAmplitude1D evaluate(const WaveFunction1D& wf, double x);
LocalAmplitude2D evaluate(const WaveFunction2D& wf, double x1, double x2);

struct VelocitySample {
    double v = 0.0;
    bool regularized = false;
};

struct VelocitySample2D {
    std::array<double, 2> v{};
    bool regularized = false;
};

/// Guidance velocity from an interpolated amplitude; `peak_density` is the
/// reference for the node threshold.
VelocitySample guidance_velocity(const LocalAmplitude1D& a, double mass, double peak_density,
                                 const NodePolicy& policy);
VelocitySample2D guidance_velocity(const LocalAmplitude2D& a, double m1, double m2,
                                   double peak_density, const NodePolicy& policy);

/// v = Im(psi'/psi)/m at x.
VelocitySample velocity_at(const WaveFunction1D& wf, double x, double mass, const NodePolicy& policy = {});
VelocitySample2D velocity_at(const WaveFunction2D& wf, double x1, double x2, double m1, double m2,
                             const NodePolicy& policy = {});

/// Discretised quantum current Im(psi* psi')/m at the grid nodes.
std::vector<double> probability_current(const WaveFunction1D& wf, double mass);

/// Q = -(1/2m) |psi|''/|psi| on the grid, with a validity mask. Cells with
/// density below eps_node * peak, and the two outermost cells on each side,
/// are invalid and hold 0.
struct QuantumPotential {
    PotentialField field;
    std::vector<std::uint8_t> valid;

    std::size_t valid_count() const;
};

QuantumPotential quantum_potential(const WaveFunction1D& wf, double mass, double eps_node = 1e-12);

/// Wave function as a closed-form function of (x, t).
struct AnalyticState1D {
    std::function<LocalAmplitude1D(double x, double t)> eval;
    std::function<double(double t)> peak_density;
    double x_min;
    double x_max;
};

/// Time-ordered snapshots; psi between two snapshots is interpolated linearly.
class FrameHistory1D {
public:
    FrameHistory1D() = default;
    explicit FrameHistory1D(std::vector<WaveFunction1D> frames);

    void push(WaveFunction1D frame);
    const std::vector<WaveFunction1D>& frames() const { return frames_; }
    double t_begin() const;
    double t_end() const;
    const Grid1D& grid() const;
    bool covers(double t) const;

    /// Interpolated amplitude and peak density at (x, t). Throws FrameGap.
    LocalAmplitude1D amplitude(double x, double t, double* peak = nullptr) const;

    /// Index i and weight w such that psi(t) = (1-w) frame[i] + w frame[i+1].
    std::pair<std::size_t, double> locate(double t) const;

private:
    std::vector<WaveFunction1D> frames_;
    std::vector<double> peaks_;
};

/// RK4 integration of dx/dt = v^psi(x, t) from x0 over [x0.t, t_end] in steps of dt.
/// Positions leaving the grid are clamped and flagged with kBoundaryClamped.
TrajectoryRecord advance_trajectory(const FrameHistory1D& frames, const ParticleState& x0, double t_end,
                                    double dt, double mass, const NodePolicy& policy = {});
TrajectoryRecord advance_trajectory(const AnalyticState1D& state, const ParticleState& x0, double t_end,
                                    double dt, double mass, const NodePolicy& policy = {});

struct EquivarianceOptions {
    double dt = 0.0;  // 0: T / 400
    unsigned threads = 1;
    NodePolicy policy{};
};

struct EquivarianceResult {
    double ks_initial = 0.0;  // sample vs |psi(0)|^2
    double ks_final = 0.0;    // X(T) vs |psi(T)|^2
    std::vector<double> initial_positions;
    std::vector<double> final_positions;
    std::size_t flagged_steps = 0;
    std::optional<WaveFunction1D> final_state;
};

/// Samples `count` positions from |psi0|^2, evolves psi and every trajectory to
/// T and compares the transported ensemble with |psi(T)|^2.
EquivarianceResult equivariance_test(const WaveFunction1D& wf0, const PotentialField& V, double mass,
                                     std::size_t count, double T, std::uint64_t seed,
                                     const EquivarianceOptions& options = {});

/// Classicality diagnostics along a trajectory. `residual` is
/// m x'' + d/dx (V + Q), which vanishes for exact Bohmian motion; the
/// deviation from Newton's law is m x'' + dV/dx and equals the quantum force
/// -dQ/dx. Entries whose stencils touch invalid cells or the trajectory ends
/// are marked invalid.
struct NewtonResidual {
    std::vector<double> times;
    std::vector<double> residual;
    std::vector<double> quantum_force;
    std::vector<double> classical_force;
    std::vector<double> newton_deviation;
    std::vector<std::uint8_t> valid;

    double max_abs_residual() const;
    double max_abs_quantum_force() const;
    double max_abs_classical_force() const;
    /// True when max |quantum force| <= ratio * max |classical force| over valid samples.
    bool classical(double ratio = 0.1) const;
};

NewtonResidual newton_residual(const TrajectoryRecord& traj, const FrameHistory1D& frames,
                               const PotentialField& V, double mass, double eps_node = 1e-12);

}  // namespace bohmsemi
