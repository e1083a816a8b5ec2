// dde_engine.hpp: method-of-steps integration of the rotating-frame
// amplitude equations
//
//   dU_e/dt = −i g_n U_s − (Γ/2) U_e − (γ/2) e^{iω_e τ} U_e(t−τ) Θ(t−τ)
//   dU_s/dt =  i δ  U_s − i g_n U_e
//
// The grid spacing divides τ exactly, so the delayed sample of every step
// start/end is a stored node and the feedback switches on bit-exactly at t = τ.
// Stage values between nodes come from cubic interpolation restricted to one
// delay interval, where the solution is smooth.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "giantbic/core_model.hpp"

namespace giantbic {

struct InitialCondition {
    cplx u_e0{1.0, 0.0};
    cplx u_s0{0.0, 0.0};
};

struct IntegratorOptions {
    int steps_per_delay = 200;
    /// Bound on the a-priori local truncation estimate (h·ρ)^5/120 per step,
    /// ρ being the fastest rate of the linear system.
    double local_error_tol = 1e-8;
};

/// Rotating-frame amplitudes on the grid t_k = k·dt.
struct Trajectory {
    int n = 0;
    double dt = 0.0;
    /// Nodes per delay interval. Derivatives of the solution jump at multiples
    /// of this index; 0 when the delayed feedback is switched off.
    int delay_steps = 0;
    double omega_e = 0.0;
    std::vector<cplx> u_e;
    std::vector<cplx> u_s;

    [[nodiscard]] std::size_t size() const { return u_e.size(); }
    [[nodiscard]] double time(std::size_t k) const { return static_cast<double>(k) * dt; }
    [[nodiscard]] double horizon() const { return u_e.empty() ? 0.0 : time(u_e.size() - 1); }

    /// Cubic interpolation of U_e. Throws std::out_of_range outside [0, horizon].
    [[nodiscard]] cplx rotating_excited_at(double t) const;
    /// u_e(t) = U_e(t) e^{−iω_e t}; the phase is applied exactly after interpolation.
    [[nodiscard]] cplx lab_excited_at(double t) const;
};

/// Solves the delay equations on [0, t_max] with dt = τ / steps_per_delay.
/// Throws std::invalid_argument on bad inputs and NumericalError("dde-engine")
/// when the step is too coarse for the requested local error.
[[nodiscard]] Trajectory integrate(const SystemParams& p, int n, const InitialCondition& init,
                                   double t_max, const IntegratorOptions& options = {});

/// Point-like atom (τ → ∞): same grid, feedback term never activates.
[[nodiscard]] Trajectory integrate_point_atom(const SystemParams& p, int n,
                                              const InitialCondition& init, double t_max,
                                              const IntegratorOptions& options = {});

/// P_ne(t_k) = |U_e(t_k)|².
[[nodiscard]] std::vector<double> population(const Trajectory& traj);

/// CSV with header `t,re_ue,im_ue,re_us,im_us,p_e`.
[[nodiscard]] std::string trajectory_csv(const Trajectory& traj);

}  // namespace giantbic
