#pragma once

#include <vector>

#include "bohmsemi/grid.hpp"

namespace bohmsemi {

/// Crank-Nicolson propagator for i d/dt psi = (-d^2/dx^2 / 2m + V) psi with
/// Dirichlet zero walls at both ends of the grid.
///
/// The boundary samples are pinned to zero and the interior is advanced with
/// the Cayley form (1 + i dt H/2) psi' = (1 - i dt H/2) psi, which preserves
/// the discrete norm up to roundoff of the tridiagonal solve. The object owns
/// its scratch buffers; use one instance per thread.
class CrankNicolson1D {
public:
    CrankNicolson1D() = default;

    /// Advances `psi` (length n, in place) by dt. `potential` has length n.
    void step(std::span<Complex> psi, std::span<const double> potential, double dx, double dt,
              double mass);

private:
    std::vector<Complex> rhs_;
    std::vector<Complex> c_prime_;
};

/// One Crank-Nicolson step; returns a new state at wf.t + dt.
WaveFunction1D cn_step_1d(const WaveFunction1D& wf, const PotentialField& V, double dt, double mass);

/// 2D propagator. The step is the symmetric product
///   C1(dt/2) C2(dt) C1(dt/2),
/// of Cayley factors for H_k = -d_k^2/2m_k + V/2. Each factor is exactly
/// unitary, so the norm is preserved to roundoff and the splitting is second
/// order in dt.
class CrankNicolson2D {
public:
    void step(WaveFunction2D& wf, const PotentialField& V, double dt, double m1, double m2);

private:
    void sweep_axis1(WaveFunction2D& wf, const PotentialField& V, double dt, double m1);
    void sweep_axis2(WaveFunction2D& wf, const PotentialField& V, double dt, double m2);

    CrankNicolson1D line_;
    std::vector<Complex> buf_;
    std::vector<double> pot_;
};

WaveFunction2D cn_step_2d(const WaveFunction2D& wf, const PotentialField& V, double dt, double m1,
                          double m2);

}  // namespace bohmsemi
