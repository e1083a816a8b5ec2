// spectral.hpp: bound states in the continuum of the giant-atom/cavity
// system: pole conditions, designs hosting one or two trapped dressed
// states, and their long-time amplitudes.
//
// A pure-imaginary pole s = −iω of the Laplace-transformed amplitude needs
// Γ = ±γ; ω must then be one of the rotating-frame dressed energies ω'_{n±}
// and the round-trip phase (ω + ω_e)τ must be an odd (Γ = γ) or even
// (Γ = −γ) multiple of π.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"

namespace giantbic {

enum class Branch { plus, minus };

[[nodiscard]] inline int sign_of(Branch b) { return b == Branch::plus ? 1 : -1; }
[[nodiscard]] inline const char* to_string(Branch b) { return b == Branch::plus ? "+" : "-"; }

struct BicSolution {
    int n = 0;
    Branch branch = Branch::plus;
    double omega = 0.0;          ///< ω'_{n±}, pole frequency in the frame rotating at ω_e
    double omega_lab = 0.0;      ///< ω_{n±} = ω_e + ω'
    long long q = 0;             ///< winding integer of the phase condition
    cplx residue_e{0.0, 0.0};    ///< long-time coefficient of U_e for the given initial state
    double phase_residual = 0.0; ///< |(ω + ω_e)τ − target multiple of π|
    double pole_residual_re = 0.0;  ///< normalized residual of the real pole condition
    double pole_residual_im = 0.0;  ///< normalized residual of the imaginary pole condition
};

struct BicSearch {
    std::vector<BicSolution> solutions;
    std::vector<std::string> warnings;  ///< near misses and skipped branches
};

inline constexpr double kDefaultBicTol = 1e-9;

/// Pure-imaginary poles of subspace n. Empty unless Γ = |γ| within tol·Γ.
/// Residues are evaluated for `init` (default: atom excited, cavity-shifted
/// state empty).
[[nodiscard]] BicSearch find_bics(const SystemParams& p, int n, double tol = kDefaultBicTol,
                                  const InitialCondition& init = {});

struct DoubleBicDesign {
    double omega_e = 0.0;
    double g_n = 0.0;
    long long q_plus = 0;
    long long q_minus = 0;
    double target_offset = 0.0;  ///< omega_e − omega_e_target
};

/// Resonant (δ = 0) design trapping population in both dressed states:
/// (ω_e ± g_n)τ = (2q_± + 1)π, i.e. ω_e = (q_+ + q_− + 1)π/τ and
/// g_n = (q_+ − q_−)π/τ. The integers fix ω_e completely; the target is only
/// compared against the result.
[[nodiscard]] DoubleBicDesign design_double_bic(double omega_e_target, double tau,
                                                long long q_plus, long long q_minus);

/// Same design with the integer pair chosen so ω_e lands nearest the target
/// for a prescribed difference q_+ − q_−.
[[nodiscard]] DoubleBicDesign design_double_bic_near(double omega_e_target, double tau,
                                                     long long q_difference);

/// Long-time lab-frame amplitude u_ne(t) = Σ residue·e^{−iω_{n±}t} over the
/// branches that find_bics reports. Requires |γ| = Γ.
[[nodiscard]] cplx longtime_amplitude(const SystemParams& p, int n, const InitialCondition& init,
                                      double t, double tol = kDefaultBicTol);

/// Candidate separation d = 2πv(q_m^α − q_n^β)/(αg_m − βg_n) for one trapped
/// state in each of the subspaces m and n (δ = 0). The candidate is necessary,
/// not sufficient: confirm it with confirm_coexistence.
[[nodiscard]] double coexistence_distance(const SystemParams& p, int m, int n, Branch alpha,
                                          Branch beta, long long q_m, long long q_n);

/// True when find_bics reports branch α in subspace m and branch β in n.
[[nodiscard]] bool confirm_coexistence(const SystemParams& p, int m, int n, Branch alpha,
                                       Branch beta, double tol = kDefaultBicTol);

struct RatioWitness {
    bool rational = false;
    long long q_diff_n = 0;  ///< q_n⁺ − q_n⁻
    long long q_diff_m = 0;  ///< q_m⁺ − q_m⁻
};

/// At δ = 0, Δ_n/Δ_m = √((n+1)/(m+1)); oscillating BICs in both subspaces
/// need this ratio rational. Returns the minimal integer pair when it is.
[[nodiscard]] RatioWitness oscillation_ratio_check(const SystemParams& p, int m, int n);

}  // namespace giantbic
