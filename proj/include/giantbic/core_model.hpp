// core_model.hpp: physical parameters of the Λ-type giant atom, its
// waveguide/cavity rates and the dressed atom–cavity quantities of each
// excitation subspace.
//
// Conventions: ω_g = 0, ħ = 1. Presets work in natural units v = 1, Γ = 1.

#pragma once

#include <complex>
#include <numbers>

namespace giantbic {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

/// Raw model constants. The two coupling points sit at x = ±d/2.
struct SystemParams {
    double omega_e = 0.0;  ///< excited-state energy
    double omega_s = 0.0;  ///< metastable-state energy
    double omega_c = 0.0;  ///< cavity frequency
    double g = 0.0;        ///< atom–cavity coupling (real, ≥ 0)
    double j1_mag = 0.0;   ///< |J_1|
    double j2_mag = 0.0;   ///< |J_2|
    double phi1 = 0.0;     ///< arg J_1
    double phi2 = 0.0;     ///< arg J_2
    double v = 1.0;        ///< waveguide group velocity
    double d = 1.0;        ///< separation of the coupling points
};

struct DerivedRates {
    double gamma_total = 0.0;       ///< Γ = 2π(|J1|² + |J2|²)/v
    double gamma_coll = 0.0;        ///< γ = 4π|J1 J2| cos(φ1 − φ2)/v
    double tau = 0.0;               ///< τ = d/v
    double delta = 0.0;             ///< δ = ω_e − ω_s − ω_c
    double lambda_e = 0.0;          ///< λ_e = 2πv/ω_e
    double coherence_length = 0.0;  ///< L_c = v/Γ (infinite when Γ = 0)
};

/// Dressed-state quantities of the subspace with n cavity photons
/// (N = n + 1 excitations).
struct SubspaceParams {
    int n = 0;
    double g_n = 0.0;          ///< g√(n+1)
    double delta_n = 0.0;      ///< Δ_n = √(g_n² + δ²/4)
    double omega_plus = 0.0;   ///< ω_{n+} = ω_e − δ/2 + Δ_n
    double omega_minus = 0.0;  ///< ω_{n−} = ω_e − δ/2 − Δ_n
    double theta_n = 0.0;      ///< mixing angle
    double lambda_plus = 0.0;  ///< 2πv/ω_{n+}
    double lambda_minus = 0.0; ///< 2πv/ω_{n−}; non-positive frequencies give a non-physical value

    /// ω'_{n±} = ω_{n±} − ω_e, the dressed energies in the frame rotating at ω_e.
    [[nodiscard]] double shift_plus(double omega_e) const { return omega_plus - omega_e; }
    [[nodiscard]] double shift_minus(double omega_e) const { return omega_minus - omega_e; }

    /// cos²θ_n, the excited-state weight of |n+⟩. For Δ_n = 0 (g = 0, δ = 0)
    /// the excited state is assigned wholly to the + branch.
    [[nodiscard]] double weight_plus() const;
    /// sin²θ_n, the excited-state weight of |n−⟩.
    [[nodiscard]] double weight_minus() const;
};

/// Rotating-frame amplitudes U_e = u_e e^{iω_e t}, U_s = u_s e^{iω_e t}.
struct Amplitudes {
    cplx excited{0.0, 0.0};
    cplx metastable{0.0, 0.0};
};

/// Throws std::invalid_argument for v ≤ 0, d ≤ 0, ω_e ≤ 0, negative couplings
/// or non-finite fields.
void validate(const SystemParams& p);

[[nodiscard]] DerivedRates derive_rates(const SystemParams& p);

[[nodiscard]] SubspaceParams subspace_params(const SystemParams& p, int n);

[[nodiscard]] Amplitudes to_rotating_frame(cplx u_e, cplx u_s, double t, double omega_e);
[[nodiscard]] Amplitudes from_rotating_frame(cplx big_u_e, cplx big_u_s, double t, double omega_e);

/// Symmetric couplings J1 = J2 reproducing the requested (Γ, γ) pair.
/// Throws std::invalid_argument when |γ| > Γ, since Γ ≥ |γ| for any couplings.
struct CouplingSpec {
    double j1_mag = 0.0;
    double j2_mag = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};
[[nodiscard]] CouplingSpec couplings_for_rates(double gamma_total, double gamma_coll, double v);

}  // namespace giantbic
