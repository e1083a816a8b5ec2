#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"

namespace testing {

using giantbic::cplx;
using giantbic::kPi;

/// Symmetric-coupling parameter set in natural units (v = 1).
inline giantbic::SystemParams make_params(double gamma_total, double gamma_coll, double tau,
                                          double omega_e, double g, double delta = 0.0) {
    giantbic::SystemParams p;
    const auto c = giantbic::couplings_for_rates(gamma_total, gamma_coll, 1.0);
    p.j1_mag = c.j1_mag;
    p.j2_mag = c.j2_mag;
    p.phi1 = c.phi1;
    p.phi2 = c.phi2;
    p.omega_e = omega_e;
    p.g = g;
    p.omega_s = 0.0;
    p.omega_c = omega_e - delta;
    p.v = 1.0;
    p.d = tau;
    return p;
}

/// The designed two-trap preset: Γ = γ = τ = 1, ω_e = 202π, g = π.
inline giantbic::SystemParams double_bic_params() { return make_params(1, 1, 1, 202 * kPi, kPi); }

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(unsigned long long seed) : engine(seed) {}
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine); }
    cplx in_disk(double radius) {
        const double r = radius * std::sqrt(uniform(0.0, 1.0));
        return std::polar(r, uniform(-kPi, kPi));
    }
};

inline std::size_t node(const giantbic::Trajectory& t, double time) {
    return static_cast<std::size_t>(std::llround(time / t.dt));
}

}  // namespace testing
