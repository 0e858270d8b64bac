#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bohmsemi/grid.hpp"
#include "bohmsemi/trajectory.hpp"

// Flat FLRW mini-superspace with a massless homogeneous scalar field, in the
// time parameter tau (dtau e^{3 alpha} = dt). Wheeler-DeWitt equation
// (d_alpha^2 - d_phi^2) psi = 0; trajectories live in the (phi, alpha) plane.
namespace bohmsemi::mini {

/// Gravitational and matter model constants. Only the defaults (kappa = 1 and
/// vanishing curvature, cosmological constant and matter potential) are
/// supported by the dynamics below; other values are rejected.
struct MiniModelParams {
    double kappa = 1.0;
    double k_curv = 0.0;
    double Lambda = 0.0;
    double V_M = 0.0;

    void validate() const;
    bool is_default() const;
};

enum class Mode { R, L, Superposition };

const char* to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// psi_R = exp[iu(phi - alpha) - (phi - alpha)^2 / 4 sigma^2]
/// psi_L = exp[-iv(phi + alpha) - (phi + alpha)^2 / 4 sigma^2]
struct WDWParams {
    double u = 1.0;
    double v = 5.0;
    double sigma = 1.0;
    Mode mode = Mode::Superposition;

    /// Throws ShapeError when sigma <= 0 or a value is not finite.
    void validate() const;
    /// Human-readable notes when the parameters leave the regime v > u >> 0, sigma u >> 1.
    std::vector<std::string> regime_warnings() const;
};

struct MiniState {
    double alpha = 0.0;
    double phi = 0.0;
    double tau = 0.0;
};

/// Conditional packet chi(phi, tau) and the Bohmian semi-classical configuration.
struct SCMiniState {
    double phi = 0.0;
    double alpha = 0.0;
    int alpha_sign = +1;
    double tau = 0.0;
    WDWParams packet{};
    double tau0 = 0.0;
    double alpha0 = -8.0;
};

Complex psi_wdw(const WDWParams& p, double phi, double alpha);

/// Ratios of closed-form partial derivatives to psi. `mixed(a, b)` is
/// d_alpha^a d_phi^b psi / psi for a + b <= 3.
struct WDWDerivatives {
    Complex ratio[4][4]{};
    double log_abs_psi = 0.0;  // log |psi|, finite even where |psi| underflows

    Complex mixed(int a, int b) const { return ratio[a][b]; }
    /// d^2|psi|/|psi| along phi and alpha.
    double amp_phi2() const;
    double amp_alpha2() const;
    /// d_phi of the two amplitude ratios above.
    double d_phi_amp_phi2() const;
    double d_phi_amp_alpha2() const;
};

/// Throws NodePoint when psi vanishes to working precision relative to its branches.
WDWDerivatives wdw_derivatives(const WDWParams& p, double phi, double alpha);

struct WDWVelocity {
    double alpha_prime = 0.0;
    double phi_prime = 0.0;
};

/// alpha' = -Im(d_alpha psi / psi), phi' = Im(d_phi psi / psi). Throws NodePoint.
WDWVelocity wdw_velocity(const WDWParams& p, double phi, double alpha);

/// Adaptive control shared by the mini-superspace integrators: every output
/// step dtau is covered by RK4 sub-steps whose size is halved (step doubling
/// error estimate, or a node hit) down to floor_fraction * dtau.
struct StepPolicy {
    double tol = 1e-10;
    double floor_fraction = 1e-6;
    double alpha_stop = 0.0;  // > 0: stop a direction once |alpha| >= alpha_stop

    void validate() const;
};

/// Integration window [begin, end] in absolute tau; the start state must lie inside.
struct TauSpan {
    double begin = 0.0;
    double end = 20.0;
};

/// Full Bohmian trajectory through s0, integrated backward to span.begin and forward to
/// span.end. Coordinates are (phi, alpha); samples are ascending in tau.
TrajectoryRecord integrate_wdw(const WDWParams& p, const MiniState& s0, TauSpan span, double dtau,
                               const StepPolicy& policy = {});

enum class Label { LeftToLeft, RightToRight, RightToLeft, LeftToRight, Cyclic, Undetermined };

const char* to_string(Label l);

struct ClassifyOptions {
    double alpha_asym = 10.0;  // typically 10 sigma
    double delta_cycle = 1e-3;
    double cos_min = 0.999;
};

/// Sides are the sign of phi at the low-alpha and high-alpha ends. Cyclic when
/// the path comes back within delta_cycle of its first point moving in the same
/// direction.
Label classify_trajectory(const TrajectoryRecord& traj, const ClassifyOptions& options = {});

/// Violation of the second-order equations in the tau gauge:
///   constraint  = alpha'^2 - phi'^2 + d_phi^2|psi|/|psi| - d_alpha^2|psi|/|psi|
///   field       = phi'' - (1/2) d_phi (d_phi^2|psi|/|psi| - d_alpha^2|psi|/|psi|)
/// with first derivatives from centred differences of positions and phi'' from centred
/// differences of recorded velocities. `classical` is alpha'^2 - phi'^2 alone.
struct FriedmannResidual {
    std::vector<double> tau, constraint, field, classical;
    std::vector<std::uint8_t> valid;  // false at the two ends

    double max_abs_constraint() const;
    double max_abs_field() const;
};

FriedmannResidual friedmann_residual(const WDWParams& p, const TrajectoryRecord& traj,
                                     const MiniModelParams& model = {});

enum class PacketKind { R, L };

/// Freely evolved conditional packets, tau_bar = tau - tau0, s = sigma (1 + i tau_bar / 2 sigma^2):
///   chi_R = [2 pi s^2]^{-1/4} exp[iu(phi_R - u tau_bar/2) - (phi_R - u tau_bar)^2 / 4 s sigma],  phi_R = phi - alpha0
///   chi_L = [2 pi s^2]^{-1/4} exp[-iv(phi_L + v tau_bar/2) - (phi_L + v tau_bar)^2 / 4 s sigma], phi_L = phi + alpha0
Complex chi_free_packet(PacketKind kind, const WDWParams& p, double alpha0, double tau0, double phi, double tau);

/// chi for p.mode: chi_R, chi_L, or (chi_R + chi_L)/sqrt(2).
Complex chi_state(const WDWParams& p, double alpha0, double tau0, double phi, double tau);

/// d_phi chi / chi and d_phi^2 chi / chi for p.mode, evaluated without underflow.
struct ChiRatios {
    Complex d1;
    Complex d2;
};
ChiRatios chi_ratios(const WDWParams& p, double alpha0, double tau0, double phi, double tau);

/// Closed-form 2<H_M> for p.mode (u^2 + 1/4 sigma^2, v^2 + 1/4 sigma^2, (u^2 + v^2)/2 + 1/4 sigma^2).
double two_h_closed_form(const WDWParams& p);
/// -<chi|d_phi^2|chi>/<chi|chi> at tau0 by grid quadrature (central second differences).
double two_h_quadrature(const WDWParams& p, double alpha0);

struct UsualSCResult {
    std::vector<double> tau, alpha;
    double alpha_prime = 0.0;  // sqrt of the closed form, positive branch
    double two_h_closed = 0.0;
    double two_h_grid = 0.0;
};

/// alpha(tau) = alpha0 + alpha' (tau - tau0) on the output grid tau0 + k dtau within span.
UsualSCResult usual_sc_run(const WDWParams& p, double alpha0, double tau0, TauSpan span, double dtau);

/// Bohmian semi-classical trajectory: phi' = Im(chi'/chi), alpha' = alpha_sign sqrt(-Re(chi''/chi)).
/// Where -Re(chi''/chi) < 0 the step is flagged kClassicallyForbidden and alpha' = 0.
/// Coordinates (phi, alpha); velocities (phi', alpha').
TrajectoryRecord bohmian_sc_run(const SCMiniState& s0, TauSpan span, double dtau, const StepPolicy& policy = {});

/// alpha'^2 of the Bohmian semi-classical scheme at (phi, tau), before the branch is taken.
double bohmian_sc_alpha_prime_sq(const WDWParams& p, double alpha0, double tau0, double phi, double tau);

struct SchemeComparison {
    std::vector<double> tau;
    std::vector<double> phi_full, alpha_full, alpha_prime_full;
    std::vector<double> alpha_usual, alpha_prime_usual;
    std::vector<double> phi_bsc, alpha_bsc, alpha_prime_bsc;
    // dalpha/dphi over the first and last windows
    double slope_early_full = 0.0, slope_late_full = 0.0;
    double slope_early_bsc = 0.0, slope_late_bsc = 0.0;
    // RMS of alpha' differences against the full scheme in the windows
    double rms_usual_early = 0.0, rms_usual_late = 0.0;
    double rms_bsc_early = 0.0, rms_bsc_late = 0.0;
    double mean_alpha_prime_full_early = 0.0, mean_alpha_prime_full_late = 0.0;
    double mean_alpha_prime_bsc_early = 0.0, mean_alpha_prime_bsc_late = 0.0;
    std::uint32_t flags = 0;
};

/// All three schemes from the shared point (phi0, alpha0) at tau0 on a common tau grid.
/// `window` is the length of the early and late windows at the two ends of the span.
SchemeComparison compare_schemes(const WDWParams& p, double phi0, double alpha0, double tau0, TauSpan span,
                                 double dtau, double window);

}  // namespace bohmsemi::mini
