#include "giantbic/dde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "giantbic/csv.hpp"
#include "giantbic/errors.hpp"
#include "giantbic/interpolation.hpp"

namespace giantbic {

namespace {

constexpr cplx kI{0.0, 1.0};

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

// Interpolates `values` at fractional node position `pos` with a 4-node stencil
// confined to [lo, hi].
cplx interpolate(const std::vector<cplx>& values, double pos, std::size_t lo, std::size_t hi) {
    const std::size_t start = cubic_stencil_start(pos, lo, hi);
    const auto w = cubic_lagrange_weights(pos - static_cast<double>(start));
    return w[0] * values[start] + w[1] * values[start + 1] + w[2] * values[start + 2] +
           w[3] * values[start + 3];
}

Trajectory run(const SystemParams& p, int n, const InitialCondition& init, double t_max,
               const IntegratorOptions& options, bool with_delay) {
    if (n < 0) throw std::invalid_argument("integrate: n must be >= 0");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw std::invalid_argument("integrate: t_max must be finite and > 0");
    }
    if (options.steps_per_delay < 20) {
        throw std::invalid_argument("integrate: steps_per_delay must be >= 20");
    }
    if (!finite(init.u_e0) || !finite(init.u_s0)) {
        throw std::invalid_argument("integrate: initial amplitudes must be finite");
    }
    if (std::norm(init.u_e0) + std::norm(init.u_s0) > 1.0 + 1e-12) {
        throw std::invalid_argument("integrate: |u_e0|^2 + |u_s0|^2 must not exceed 1");
    }

    const DerivedRates rates = derive_rates(p);
    const SubspaceParams sub = subspace_params(p, n);
    const int per_delay = options.steps_per_delay;
    const double h = rates.tau / per_delay;
    const double g_n = sub.g_n;
    const double half_gamma = 0.5 * rates.gamma_total;
    const cplx feedback = 0.5 * rates.gamma_coll * std::polar(1.0, p.omega_e * rates.tau);

    const double rho = 0.5 * (rates.gamma_total + std::abs(rates.gamma_coll)) +
                       0.5 * std::abs(rates.delta) + sub.delta_n;
    const double estimate = std::pow(h * rho, 5) / 120.0;
    if (estimate > options.local_error_tol) {
        std::ostringstream msg;
        msg << "step size " << h << " too coarse: local error estimate " << estimate
            << " exceeds tolerance " << options.local_error_tol
            << " (increase steps_per_delay)";
        throw NumericalError("dde-engine", msg.str());
    }

    const auto steps = static_cast<std::size_t>(std::ceil(t_max / h - 1e-9));

    Trajectory traj;
    traj.n = n;
    traj.dt = h;
    traj.delay_steps = with_delay ? per_delay : 0;
    traj.omega_e = p.omega_e;
    traj.u_e.resize(steps + 1);
    traj.u_s.resize(steps + 1);
    traj.u_e[0] = init.u_e0;
    traj.u_s[0] = init.u_s0;

    const auto rhs_e = [&](cplx ue, cplx us, cplx delayed) {
        return -kI * g_n * us - half_gamma * ue - feedback * delayed;
    };
    const auto rhs_s = [&](cplx ue, cplx us) { return kI * rates.delta * us - kI * g_n * ue; };

    const auto N = static_cast<std::size_t>(per_delay);
    for (std::size_t k = 0; k < steps; ++k) {
        cplx d_start{0.0}, d_mid{0.0}, d_end{0.0};
        if (with_delay && k >= N) {
            const std::size_t j = k - N;
            const std::size_t lo = (j / N) * N;
            d_start = traj.u_e[j];
            d_end = traj.u_e[j + 1];
            d_mid = interpolate(traj.u_e, static_cast<double>(j) + 0.5, lo, lo + N);
        }
        const cplx ue = traj.u_e[k];
        const cplx us = traj.u_s[k];

        const cplx k1e = rhs_e(ue, us, d_start);
        const cplx k1s = rhs_s(ue, us);
        const cplx k2e = rhs_e(ue + 0.5 * h * k1e, us + 0.5 * h * k1s, d_mid);
        const cplx k2s = rhs_s(ue + 0.5 * h * k1e, us + 0.5 * h * k1s);
        const cplx k3e = rhs_e(ue + 0.5 * h * k2e, us + 0.5 * h * k2s, d_mid);
        const cplx k3s = rhs_s(ue + 0.5 * h * k2e, us + 0.5 * h * k2s);
        const cplx k4e = rhs_e(ue + h * k3e, us + h * k3s, d_end);
        const cplx k4s = rhs_s(ue + h * k3e, us + h * k3s);

        traj.u_e[k + 1] = ue + (h / 6.0) * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
        traj.u_s[k + 1] = us + (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        if (!finite(traj.u_e[k + 1]) || !finite(traj.u_s[k + 1])) {
            throw NumericalError("dde-engine", "non-finite amplitude at t = " +
                                                   std::to_string(traj.time(k + 1)));
        }
    }
    return traj;
}

}  // namespace

cplx Trajectory::rotating_excited_at(double t) const {
    if (u_e.empty() || !(t >= 0.0) || t > horizon() * (1.0 + 1e-12)) {
        throw std::out_of_range("Trajectory: time " + std::to_string(t) +
                                " outside the stored horizon");
    }
    const double pos = std::min(t / dt, static_cast<double>(u_e.size() - 1));
    const double node = std::round(pos);
    if (pos == node) return u_e[static_cast<std::size_t>(node)];
    if (u_e.size() < 4) {
        // Too short for a cubic: linear is the best available.
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - static_cast<double>(i);
        return (1.0 - f) * u_e[i] + f * u_e[i + 1];
    }
    const std::size_t last = u_e.size() - 1;
    std::size_t lo = 0, hi = last;
    if (delay_steps > 0) {
        const auto N = static_cast<std::size_t>(delay_steps);
        lo = (static_cast<std::size_t>(pos) / N) * N;
        hi = std::min(lo + N, last);
        if (hi - lo < 3) lo = hi - 3;
    }
    return interpolate(u_e, pos, lo, hi);
}

cplx Trajectory::lab_excited_at(double t) const {
    return rotating_excited_at(t) * std::polar(1.0, -omega_e * t);
}

Trajectory integrate(const SystemParams& p, int n, const InitialCondition& init, double t_max,
                     const IntegratorOptions& options) {
    return run(p, n, init, t_max, options, true);
}

Trajectory integrate_point_atom(const SystemParams& p, int n, const InitialCondition& init,
                                double t_max, const IntegratorOptions& options) {
    return run(p, n, init, t_max, options, false);
}

std::vector<double> population(const Trajectory& traj) {
    std::vector<double> out(traj.u_e.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = std::norm(traj.u_e[k]);
    return out;
}

std::string trajectory_csv(const Trajectory& traj) {
    std::string out = "t,re_ue,im_ue,re_us,im_us,p_e\n";
    out.reserve(out.size() + traj.size() * 120);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        append_number(out, traj.time(k));
        for (double value : {traj.u_e[k].real(), traj.u_e[k].imag(), traj.u_s[k].real(),
                             traj.u_s[k].imag(), std::norm(traj.u_e[k])}) {
            out += ',';
            append_number(out, value);
        }
        out += '\n';
    }
    return out;
}

}  // namespace giantbic
