#include "giantbic/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace giantbic {

namespace {

void require_finite(double value, const char* name) {
    if (!std::isfinite(value)) {
        throw std::invalid_argument(std::string("SystemParams.") + name + " must be finite");
    }
}

}  // namespace

void validate(const SystemParams& p) {
    require_finite(p.omega_e, "omega_e");
    require_finite(p.omega_s, "omega_s");
    require_finite(p.omega_c, "omega_c");
    require_finite(p.g, "g");
    require_finite(p.j1_mag, "j1_mag");
    require_finite(p.j2_mag, "j2_mag");
    require_finite(p.phi1, "phi1");
    require_finite(p.phi2, "phi2");
    require_finite(p.v, "v");
    require_finite(p.d, "d");
    if (p.v <= 0.0) throw std::invalid_argument("SystemParams.v must be > 0");
    if (p.d <= 0.0) throw std::invalid_argument("SystemParams.d must be > 0");
    if (p.omega_e <= 0.0) throw std::invalid_argument("SystemParams.omega_e must be > 0");
    if (p.g < 0.0) throw std::invalid_argument("SystemParams.g must be >= 0");
    if (p.j1_mag < 0.0 || p.j2_mag < 0.0) {
        throw std::invalid_argument("SystemParams coupling magnitudes must be >= 0");
    }
}

DerivedRates derive_rates(const SystemParams& p) {
    validate(p);
    DerivedRates r;
    r.gamma_total = 2.0 * kPi * (p.j1_mag * p.j1_mag + p.j2_mag * p.j2_mag) / p.v;
    r.gamma_coll = 4.0 * kPi * p.j1_mag * p.j2_mag * std::cos(p.phi1 - p.phi2) / p.v;
    r.tau = p.d / p.v;
    r.delta = p.omega_e - p.omega_s - p.omega_c;
    r.lambda_e = 2.0 * kPi * p.v / p.omega_e;
    r.coherence_length = r.gamma_total > 0.0 ? p.v / r.gamma_total
                                                : std::numeric_limits<double>::infinity();
    // (|J1| − |J2|)² ≥ 0 bounds the interference term; rounding can push it a hair over.
    if (std::abs(r.gamma_coll) > r.gamma_total * (1.0 + 1e-14)) {
        throw std::logic_error("derive_rates: |gamma| exceeds Gamma");
    }
    return r;
}

double SubspaceParams::weight_plus() const {
    if (delta_n == 0.0) return 1.0;
    const double c = std::cos(theta_n);
    return c * c;
}

double SubspaceParams::weight_minus() const {
    if (delta_n == 0.0) return 0.0;
    const double s = std::sin(theta_n);
    return s * s;
}

SubspaceParams subspace_params(const SystemParams& p, int n) {
    if (n < 0) throw std::invalid_argument("subspace_params: n must be >= 0");
    const DerivedRates r = derive_rates(p);
    SubspaceParams s;
    s.n = n;
    s.g_n = p.g * std::sqrt(static_cast<double>(n) + 1.0);
    s.delta_n = std::sqrt(s.g_n * s.g_n + 0.25 * r.delta * r.delta);
    s.omega_plus = p.omega_e - 0.5 * r.delta + s.delta_n;
    s.omega_minus = p.omega_e - 0.5 * r.delta - s.delta_n;
    if (s.delta_n > 0.0) {
        // sinθ = √((2Δ−δ)/(4Δ)), cosθ = √((2Δ+δ)/(4Δ)); clamp guards rounding below zero.
        const double sin2 = std::max(0.0, (2.0 * s.delta_n - r.delta) / (4.0 * s.delta_n));
        const double cos2 = std::max(0.0, (2.0 * s.delta_n + r.delta) / (4.0 * s.delta_n));
        s.theta_n = std::atan2(std::sqrt(sin2), std::sqrt(cos2));
    } else {
        s.theta_n = 0.0;
    }
    s.lambda_plus = 2.0 * kPi * p.v / s.omega_plus;
    s.lambda_minus = 2.0 * kPi * p.v / s.omega_minus;
    return s;
}

Amplitudes to_rotating_frame(cplx u_e, cplx u_s, double t, double omega_e) {
    const cplx phase = std::polar(1.0, omega_e * t);
    return {u_e * phase, u_s * phase};
}

Amplitudes from_rotating_frame(cplx big_u_e, cplx big_u_s, double t, double omega_e) {
    const cplx phase = std::polar(1.0, -omega_e * t);
    return {big_u_e * phase, big_u_s * phase};
}

CouplingSpec couplings_for_rates(double gamma_total, double gamma_coll, double v) {
    if (!(v > 0.0)) throw std::invalid_argument("couplings_for_rates: v must be > 0");
    if (!(gamma_total >= 0.0)) throw std::invalid_argument("couplings_for_rates: Gamma must be >= 0");
    if (std::abs(gamma_coll) > gamma_total) {
        throw std::invalid_argument("couplings_for_rates: Gamma >= |gamma| is required");
    }
    CouplingSpec c;
    c.j1_mag = std::sqrt(gamma_total * v / (4.0 * kPi));
    c.j2_mag = c.j1_mag;
    c.phi1 = 0.0;
    c.phi2 = gamma_total > 0.0 ? -std::acos(gamma_coll / gamma_total) : 0.0;
    return c;
}

}  // namespace giantbic
