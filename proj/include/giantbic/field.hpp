// field.hpp: emitted waveguide field of one excitation subspace.
//
// The propagating amplitude is built from retarded atomic amplitudes read
// off a stored trajectory; the steady form superposes the standing waves of
// the trapped dressed states between the coupling points.
//
// Both forms assume |J1| = |J2| and φ1 − φ2 an integer multiple of π and
// reject anything else.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"
#include "giantbic/spectral.hpp"

namespace giantbic {

struct SpacetimeGrid {
    double x_min = -3.0;
    double x_max = 3.0;
    int nx = 601;
    double t_min = 0.0;
    double t_max = 50.0;
    int nt = 1001;

    /// Throws std::invalid_argument unless x_min < x_max, t_min ≤ t_max, nx, nt ≥ 2.
    void validate() const;
    [[nodiscard]] double x(int i) const { return x_min + (x_max - x_min) * i / (nx - 1); }
    [[nodiscard]] double t(int j) const { return t_min + (t_max - t_min) * j / (nt - 1); }

    /// x ∈ [−3d, 3d] with 601 points, t ∈ [0, horizon] with 1001 points.
    [[nodiscard]] static SpacetimeGrid figure_default(double d, double horizon);
};

/// I(x_i, t_j), stored row-major: values[j * nx + i].
struct IntensityField {
    SpacetimeGrid grid;
    std::vector<double> values;

    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(j) * grid.nx + i];
    }
};

/// Throws std::invalid_argument unless |J1| = |J2| and φ1 − φ2 ∈ πℤ.
void require_symmetric_couplings(const SystemParams& p);

/// Ψ_n(x,t) = −i√(Γ/8v) Σ_j e^{iφ_j} u_ne(t − |τ_x^∓|) Θ(t − |τ_x^∓|) with
/// τ_x^± = x/v ± τ/2. Throws std::out_of_range beyond the trajectory horizon.
[[nodiscard]] cplx emitted_amplitude(const Trajectory& traj, const SystemParams& p, double x,
                                     double t);

[[nodiscard]] IntensityField intensity_map(const Trajectory& traj, const SystemParams& p,
                                           const SpacetimeGrid& grid);

/// Σ over the given trapped states of e^{iφ1}√(Γ/2v) u_ne^±(t) sin(ω_{n±}(d − 2x)/(2v))
/// inside [−d/2, d/2], zero outside. u_ne^±(t) = residue·e^{−iω_{n±}t}.
[[nodiscard]] cplx steady_bic_field(const SystemParams& p, const std::vector<BicSolution>& bics,
                                    double x, double t);

/// T_nb = 2π/|ω_{n+} − ω_{n−}| = π/Δ_n.
[[nodiscard]] double beat_period(const SubspaceParams& sub);

/// CSV with header `x,t,intensity`, rows ordered by t then x.
[[nodiscard]] std::string intensity_csv(const IntensityField& field);

}  // namespace giantbic
