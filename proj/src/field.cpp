#include "giantbic/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "giantbic/csv.hpp"

namespace giantbic {

void SpacetimeGrid::validate() const {
    if (!(x_min < x_max)) throw std::invalid_argument("SpacetimeGrid: need x_min < x_max");
    if (!(t_min <= t_max)) throw std::invalid_argument("SpacetimeGrid: need t_min <= t_max");
    if (nx < 2 || nt < 2) throw std::invalid_argument("SpacetimeGrid: need nx, nt >= 2");
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !std::isfinite(t_min) ||
        !std::isfinite(t_max)) {
        throw std::invalid_argument("SpacetimeGrid: bounds must be finite");
    }
}

SpacetimeGrid SpacetimeGrid::figure_default(double d, double horizon) {
    return SpacetimeGrid{-3.0 * d, 3.0 * d, 601, 0.0, horizon, 1001};
}

void require_symmetric_couplings(const SystemParams& p) {
    const double scale = std::max(p.j1_mag, p.j2_mag);
    if (std::abs(p.j1_mag - p.j2_mag) > 1e-12 * scale) {
        throw std::invalid_argument("field reconstruction requires |J1| = |J2|");
    }
    const double turns = (p.phi1 - p.phi2) / kPi;
    if (std::abs(turns - std::round(turns)) > 1e-9) {
        throw std::invalid_argument("field reconstruction requires phi1 - phi2 = n*pi");
    }
}

namespace {

struct FieldConstants {
    double prefactor;  // √(Γ/8v)
    cplx phase1;
    cplx phase2;
    double half_tau;
    double v;
};

FieldConstants field_constants(const SystemParams& p) {
    require_symmetric_couplings(p);
    const DerivedRates r = derive_rates(p);
    return {std::sqrt(r.gamma_total / (8.0 * p.v)), std::polar(1.0, p.phi1),
            std::polar(1.0, p.phi2), 0.5 * r.tau, p.v};
}

cplx amplitude(const Trajectory& traj, const FieldConstants& c, double x, double t) {
    const double retard_minus = std::abs(x / c.v - c.half_tau);
    const double retard_plus = std::abs(x / c.v + c.half_tau);
    cplx sum{0.0, 0.0};
    if (t >= retard_minus) sum += c.phase1 * traj.lab_excited_at(t - retard_minus);
    if (t >= retard_plus) sum += c.phase2 * traj.lab_excited_at(t - retard_plus);
    return cplx{0.0, -c.prefactor} * sum;
}

}  // namespace

cplx emitted_amplitude(const Trajectory& traj, const SystemParams& p, double x, double t) {
    return amplitude(traj, field_constants(p), x, t);
}

IntensityField intensity_map(const Trajectory& traj, const SystemParams& p,
                             const SpacetimeGrid& grid) {
    grid.validate();
    const FieldConstants c = field_constants(p);
    IntensityField field;
    field.grid = grid;
    field.values.resize(static_cast<std::size_t>(grid.nx) * grid.nt);
    for (int j = 0; j < grid.nt; ++j) {
        const double t = grid.t(j);
        for (int i = 0; i < grid.nx; ++i) {
            field.values[static_cast<std::size_t>(j) * grid.nx + i] =
                std::norm(amplitude(traj, c, grid.x(i), t));
        }
    }
    return field;
}

cplx steady_bic_field(const SystemParams& p, const std::vector<BicSolution>& bics, double x,
                      double t) {
    require_symmetric_couplings(p);
    const DerivedRates r = derive_rates(p);
    const double half_d = 0.5 * p.d;
    if (x < -half_d || x > half_d) return {0.0, 0.0};
    const double prefactor = std::sqrt(r.gamma_total / (2.0 * p.v));
    cplx sum{0.0, 0.0};
    for (const BicSolution& b : bics) {
        // sin(ω(d/2 − x)/v); on the left half the argument is reduced against
        // ωτ ≡ 0 (mod π) so both coupling points are exact nodes.
        double standing = 0.0;
        if (x >= 0.0) {
            standing = std::sin(b.omega_lab * (half_d - x) / p.v);
        } else {
            // sin(mπ − y) = −(−1)^m sin y with m the integer nearest ωτ/π.
            const double multiple = std::round(b.omega_lab * r.tau / kPi);
            const double sign = std::fmod(multiple, 2.0) == 0.0 ? -1.0 : 1.0;
            standing = sign * std::sin(b.omega_lab * (half_d + x) / p.v);
        }
        sum += b.residue_e * std::polar(1.0, -b.omega_lab * t) * standing;
    }
    return std::polar(prefactor, p.phi1) * sum;
}

double beat_period(const SubspaceParams& sub) {
    if (!(sub.delta_n > 0.0)) throw std::invalid_argument("beat_period: requires Delta_n > 0");
    return kPi / sub.delta_n;
}

std::string intensity_csv(const IntensityField& field) {
    std::string out = "x,t,intensity\n";
    out.reserve(out.size() + field.values.size() * 48);
    for (int j = 0; j < field.grid.nt; ++j) {
        const double t = field.grid.t(j);
        for (int i = 0; i < field.grid.nx; ++i) {
            append_number(out, field.grid.x(i));
            out += ',';
            append_number(out, t);
            out += ',';
            append_number(out, field.at(i, j));
            out += '\n';
        }
    }
    return out;
}

}  // namespace giantbic
