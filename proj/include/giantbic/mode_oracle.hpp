// mode_oracle.hpp: brute-force reference for the delay equations.
//
// The waveguide continuum is replaced by 2K discrete modes k_j = (j + ½)dk,
// j = −K … K−1, and the full single-excitation Schrödinger system is
// integrated without eliminating the field. Agreement with the DDE engine on
// horizons shorter than the recurrence time 2π/(v·dk) validates the retarded
// feedback term from first principles.
//
// All amplitudes live in the frame rotating at ω_e, so the fastest phase the
// stepper must resolve is max|ω_k − ω_e| rather than v·k_max.

#pragma once

#include <string>
#include <vector>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"
#include "giantbic/field.hpp"

namespace giantbic {

struct ModeGrid {
    double k_max = 0.0;
    int K = 8192;

    [[nodiscard]] double dk() const { return k_max / K; }
    /// j ∈ [0, 2K); index j corresponds to (j − K + ½)·dk.
    [[nodiscard]] double k(int j) const { return (j - K + 0.5) * dk(); }
    [[nodiscard]] int size() const { return 2 * K; }
    [[nodiscard]] double recurrence_time(double v) const { return 2.0 * kPi / (v * dk()); }

    /// K = 8192 and a band [0, 2ω_e] centred on the atomic resonance.
    [[nodiscard]] static ModeGrid defaults(const SystemParams& p, int K = 8192);
};

/// Snapshot of the full state. psi holds ψ_k on the mode grid with the
/// continuum normalisation Σ|ψ_k|²dk.
struct FullState {
    double t = 0.0;
    double dt = 0.0;  ///< oracle step that produced the state

    cplx u_e{0.0, 0.0};
    cplx u_s{0.0, 0.0};
    std::vector<cplx> psi;
};

struct OracleOptions {
    /// Store every `sample_stride`-th step in the returned trajectory.
    int sample_stride = 1;
    /// Times at which to keep a FullState; snapped to the nearest step.
    std::vector<double> snapshot_times;
};

struct OracleRun {
    Trajectory trajectory;             ///< rotating-frame atom amplitudes
    std::vector<FullState> snapshots;
    double max_norm_drift = 0.0;       ///< max_t |N(t) − N(0)|
    std::vector<std::string> warnings;
};

/// Largest step the oracle accepts: 0.1 over the fastest rate in the rotating frame.
[[nodiscard]] double max_oracle_step(const SystemParams& p, int n, const ModeGrid& grid);

/// Integrates i dψ_k/dt = ω_k ψ_k + c_k u_e, i du_e/dt = ω_e u_e + g_n u_s + Σ_k c_k* ψ_k dk,
/// i du_s/dt = (ω_s + ω_c) u_s + g_n u_e from ψ_k(0) = 0 with classical RK4.
/// c_k = (J1 e^{−ikd/2} + J2 e^{ikd/2})/√2, normalised so the Markov limit of the
/// discretised bath reproduces derive_rates' Γ and γ.
[[nodiscard]] OracleRun integrate_full(const SystemParams& p, int n, const InitialCondition& init,
                                       const ModeGrid& grid, double t_max, double dt,
                                       const OracleOptions& options = {});

/// I(x,t) = |Σ_k e^{ikx} ψ_k(t) dk/√(2π)|² at every grid point. Each grid time
/// must match a snapshot to within half an oracle step (or half the grid spacing).
[[nodiscard]] IntensityField oracle_intensity(const std::vector<FullState>& history,
                                              const ModeGrid& grid, const SpacetimeGrid& xt);

struct PopulationComparison {
    std::vector<double> t;
    std::vector<double> p_dde;
    std::vector<double> p_oracle;
    double max_diff = 0.0;
    double max_norm_drift = 0.0;
    std::vector<std::string> warnings;
};

/// Runs both engines on the DDE grid (the oracle step is an exact divisor of it)
/// and compares P_ne on [0, t_max].
[[nodiscard]] PopulationComparison compare_with_dde(const SystemParams& p, int n,
                                                    const InitialCondition& init, double t_max,
                                                    const ModeGrid& grid,
                                                    const IntegratorOptions& dde_options = {});

/// CSV with header `t,p_dde,p_oracle,abs_diff`.
[[nodiscard]] std::string comparison_csv(const PopulationComparison& cmp);

}  // namespace giantbic
