#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bohmsemi/bohmian.hpp"
#include "bohmsemi/grid.hpp"

namespace bohmsemi {

/// Two-particle interaction V(x1, x2) together with its x2-derivative, which
/// is the only derivative the classical sector needs.
struct CouplingPotential {
    std::function<double(double x1, double x2)> value;
    std::function<double(double x1, double x2)> d2;
    std::string label;

    /// V = lambda x1 x2
    static CouplingPotential bilinear(double lambda);
    /// V = k (x1 - x2)^2 / 2
    static CouplingPotential harmonic(double k);
    /// V = f1(x1) + f2(x2); df2 is the derivative of f2.
    static CouplingPotential separable(std::function<double(double)> f1, std::function<double(double)> f2,
                                       std::function<double(double)> df2, std::string label = "separable");

    /// V(., X2) on axis 1.
    PotentialField slice(const Grid1D& axis1, double X2) const;
    PotentialField sample(const Grid2D& grid) const;
};

struct MeanFieldState {
    WaveFunction1D chi;
    double X2 = 0.0;
    double P2 = 0.0;
    double t = 0.0;
};

struct BohmianSCState {
    WaveFunction1D chi;
    double X1 = 0.0;
    double X2 = 0.0;
    double P2 = 0.0;
    double t = 0.0;
    std::uint32_t flags = 0;  // events of the last step
};

struct FullQuantumState {
    WaveFunction2D psi;
    double X1 = 0.0;
    double X2 = 0.0;
    double t = 0.0;
    std::uint32_t flags = 0;
};

/// Mean-field scheme: chi feels V(x1, X2); X2 feels the force averaged over |chi|^2.
/// Kick-drift, wave step with V frozen at the midpoint X2, drift-kick.
MeanFieldState meanfield_step(const MeanFieldState& s, const CouplingPotential& V, double m1, double m2, double dt);

/// Bohmian semi-classical scheme: as meanfield_step, but X2 feels -d2 V(X1, X2) and X1 follows
/// the guidance velocity of chi.
BohmianSCState bohmian_sc_step(const BohmianSCState& s, const CouplingPotential& V, double m1, double m2,
                               double dt, const NodePolicy& policy = {});

/// Full two-particle reference: 2D Crank-Nicolson step, then RK4 on both guidance velocities with
/// psi interpolated linearly in time across the step.
FullQuantumState full_step(const FullQuantumState& s, const PotentialField& V, double m1, double m2, double dt,
                           const NodePolicy& policy = {});

struct ConditionalWave {
    WaveFunction1D chi;  // normalized
    double raw_norm = 0.0;  // L2 norm of the slice before normalization
};

/// chi(x1) = psi(x1, X2), cubic interpolation along axis 2. Throws ZeroNorm or OutOfDomain.
ConditionalWave conditional_wavefunction(const WaveFunction2D& psi, double X2);

struct InteractionTerm {
    std::vector<Complex> field;  // I(x1) on axis 1
    double ratio = 0.0;          // ||I|| / ||H_eff chi||
};

/// The term separating the conditional wave function from the one-particle equation:
/// I = -(1/2m2) d2^2 psi + i d2 psi * v2, evaluated at x2 = X2, with H_eff = -d1^2/2m1 + V(x1, X2).
InteractionTerm interaction_term(const WaveFunction2D& psi, double X1, double X2, double m1, double m2,
                                 const CouplingPotential& V, const NodePolicy& policy = {});

/// Declarative two-particle experiment run under all three schemes with matched initial data.
struct TwoParticleSetup {
    Grid2D grid;
    CouplingPotential V;
    double m1 = 1.0;
    double m2 = 10.0;
    std::function<Complex(double x1, double x2)> psi0{};
    double X1 = 0.0;
    double X2 = 0.0;
    double dt = 0.01;
    std::size_t steps = 100;
    NodePolicy policy{};
    /// Called at step 0 and every `snapshot_stride` steps (0: never) with the scheme's wave
    /// function: psi for "full", chi otherwise. Calls for different schemes may be concurrent.
    std::size_t snapshot_stride = 0;
    std::function<void(const std::string& scheme, std::size_t step, const WaveFunction1D* chi,
                       const WaveFunction2D* psi)>
        snapshot{};
};

struct SchemeSeries {
    std::vector<double> t, X1, X2, P2, norm, ratio;
    std::size_t flagged_steps = 0;
};

struct TwoParticleComparison {
    SchemeSeries full, meanfield, bohmian;
    double err_meanfield = 0.0;  // RMS over t of |X2_scheme - X2_full|
    double err_bohmian = 0.0;
    double edge_density = 0.0;  // max |psi|^2 on the outer boundary lines over the run
};

/// Runs the three schemes. The semi-classical schemes start from the conditional wave function of
/// psi0 at X2 and from P2 = m2 v2(X1, X2, 0). `threads` > 1 runs the schemes concurrently.
TwoParticleComparison compare_two_particle(const TwoParticleSetup& setup, unsigned threads = 1);

}  // namespace bohmsemi
