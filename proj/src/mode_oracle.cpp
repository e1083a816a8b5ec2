#include "giantbic/mode_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "giantbic/csv.hpp"

namespace giantbic {

ModeGrid ModeGrid::defaults(const SystemParams& p, int K) {
    return ModeGrid{2.0 * p.omega_e / p.v, K};
}

double max_oracle_step(const SystemParams& p, int n, const ModeGrid& grid) {
    const DerivedRates r = derive_rates(p);
    const SubspaceParams sub = subspace_params(p, n);
    const double band = std::max(p.omega_e, p.v * grid.k_max - p.omega_e);
    const double atom = sub.delta_n + 0.5 * std::abs(r.delta) + r.gamma_total;
    return 0.1 / std::max(band, atom);
}

OracleRun integrate_full(const SystemParams& p, int n, const InitialCondition& init,
                         const ModeGrid& grid, double t_max, double dt,
                         const OracleOptions& options) {
    const DerivedRates rates = derive_rates(p);
    const SubspaceParams sub = subspace_params(p, n);
    if (grid.K < 1 || !(grid.k_max > 0.0)) {
        throw std::invalid_argument("integrate_full: mode grid needs K >= 1 and k_max > 0");
    }
    if (!(t_max > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("integrate_full: t_max and dt must be > 0");
    }
    if (dt > max_oracle_step(p, n, grid)) {
        throw std::invalid_argument("integrate_full: dt does not resolve the fastest mode");
    }
    if (options.sample_stride < 1) {
        throw std::invalid_argument("integrate_full: sample_stride must be >= 1");
    }

    OracleRun run;
    if (p.v * grid.k_max <= p.omega_e + 10.0 * rates.gamma_total) {
        run.warnings.push_back("mode band does not cover the resonance with a 10 Gamma margin");
    }
    if (grid.recurrence_time(p.v) <= t_max) {
        std::ostringstream msg;
        msg << "recurrence time " << grid.recurrence_time(p.v) << " <= horizon " << t_max
            << ": wrap-around contaminates late times";
        run.warnings.push_back(msg.str());
    }

    const int modes = grid.size();
    const double dk = grid.dk();
    const double g_n = sub.g_n;
    const double delta = rates.delta;
    const cplx j1 = std::polar(p.j1_mag, p.phi1);
    const cplx j2 = std::polar(p.j2_mag, p.phi2);
    const double weight = std::sqrt(0.5 * dk);

    // Scaled amplitudes χ_j = ψ_j √dk make the discrete system plainly unitary.
    std::vector<double> det(modes), ar(modes), ai(modes);
    for (int j = 0; j < modes; ++j) {
        const double k = grid.k(j);
        det[j] = p.v * std::abs(k) - p.omega_e;
        const cplx a = (j1 * std::polar(1.0, -0.5 * k * p.d) + j2 * std::polar(1.0, 0.5 * k * p.d)) * weight;
        ar[j] = a.real();
        ai[j] = a.imag();
    }
    std::vector<double> xr(modes, 0.0), xi(modes, 0.0);
    std::vector<double> kr(modes), ki(modes), accr(modes), acci(modes);

    const auto steps = static_cast<long long>(std::ceil(t_max / dt - 1e-9));
    const long long stride = options.sample_stride;

    std::vector<long long> snapshot_steps;
    for (double ts : options.snapshot_times) {
        if (ts < 0.0 || ts > static_cast<double>(steps) * dt * (1.0 + 1e-12)) {
            throw std::invalid_argument("integrate_full: snapshot time outside the horizon");
        }
        snapshot_steps.push_back(std::llround(ts / dt));
    }
    std::vector<std::size_t> snapshot_order(snapshot_steps.size());
    for (std::size_t i = 0; i < snapshot_order.size(); ++i) snapshot_order[i] = i;
    std::sort(snapshot_order.begin(), snapshot_order.end(),
              [&](std::size_t a, std::size_t b) { return snapshot_steps[a] < snapshot_steps[b]; });
    run.snapshots.resize(snapshot_steps.size());
    std::size_t next_snapshot = 0;

    cplx ue = init.u_e0;
    cplx us = init.u_s0;
    cplx s0{0.0, 0.0};  // Σ conj(a_j) χ_j
    const double norm0 = std::norm(ue) + std::norm(us);

    Trajectory& traj = run.trajectory;
    traj.n = n;
    traj.dt = dt * static_cast<double>(stride);
    traj.delay_steps = 0;
    traj.omega_e = p.omega_e;
    traj.u_e.reserve(static_cast<std::size_t>(steps / stride) + 1);
    traj.u_s.reserve(static_cast<std::size_t>(steps / stride) + 1);

    const auto record = [&](long long step, double bath_norm) {
        if (step % stride == 0) {
            traj.u_e.push_back(ue);
            traj.u_s.push_back(us);
        }
        const double drift = std::abs(std::norm(ue) + std::norm(us) + bath_norm - norm0);
        run.max_norm_drift = std::max(run.max_norm_drift, drift);
        while (next_snapshot < snapshot_order.size() &&
               snapshot_steps[snapshot_order[next_snapshot]] == step) {
            FullState& s = run.snapshots[snapshot_order[next_snapshot]];
            s.t = static_cast<double>(step) * dt;
            s.dt = dt;
            s.u_e = ue;
            s.u_s = us;
            s.psi.resize(modes);
            const double inv = 1.0 / std::sqrt(dk);
            for (int j = 0; j < modes; ++j) s.psi[j] = cplx{xr[j], xi[j]} * inv;
            ++next_snapshot;
        }
    };
    record(0, 0.0);

    constexpr cplx kI{0.0, 1.0};
    const auto atom_e = [&](cplx u_s, cplx s) { return -kI * (g_n * u_s + s); };
    const auto atom_s = [&](cplx u_e, cplx u_s) { return kI * delta * u_s - kI * g_n * u_e; };

    // One pass over the modes: χ_stage = χ + c·h·k_prev, k = −i(Δχ_stage + a u_stage),
    // acc += w·k, returns Σ conj(a) k. Deterministic sequential reduction.
    const auto stage = [&](double coeff, cplx u_stage, double acc_weight, bool first) {
        const double ur = u_stage.real(), ui = u_stage.imag();
        double tr = 0.0, ti = 0.0;
        const double* __restrict d_ = det.data();
        const double* __restrict ar_ = ar.data();
        const double* __restrict ai_ = ai.data();
        const double* __restrict xr_ = xr.data();
        const double* __restrict xi_ = xi.data();
        double* __restrict kr_ = kr.data();
        double* __restrict ki_ = ki.data();
        double* __restrict accr_ = accr.data();
        double* __restrict acci_ = acci.data();
        for (int j = 0; j < modes; ++j) {
            const double cr = first ? xr_[j] : xr_[j] + coeff * kr_[j];
            const double ci = first ? xi_[j] : xi_[j] + coeff * ki_[j];
            const double re = d_[j] * cr + ar_[j] * ur - ai_[j] * ui;
            const double im = d_[j] * ci + ar_[j] * ui + ai_[j] * ur;
            const double nr = im;
            const double ni = -re;
            kr_[j] = nr;
            ki_[j] = ni;
            accr_[j] = first ? nr : accr_[j] + acc_weight * nr;
            acci_[j] = first ? ni : acci_[j] + acc_weight * ni;
            tr += ar_[j] * nr + ai_[j] * ni;
            ti += ar_[j] * ni - ai_[j] * nr;
        }
        return cplx{tr, ti};
    };

    for (long long step = 1; step <= steps; ++step) {
        const cplx k1e = atom_e(us, s0);
        const cplx k1s = atom_s(ue, us);
        const cplx t1 = stage(0.0, ue, 1.0, true);

        const cplx ue2 = ue + 0.5 * dt * k1e, us2 = us + 0.5 * dt * k1s;
        const cplx s2 = s0 + 0.5 * dt * t1;
        const cplx k2e = atom_e(us2, s2);
        const cplx k2s = atom_s(ue2, us2);
        const cplx t2 = stage(0.5 * dt, ue2, 2.0, false);

        const cplx ue3 = ue + 0.5 * dt * k2e, us3 = us + 0.5 * dt * k2s;
        const cplx s3 = s0 + 0.5 * dt * t2;
        const cplx k3e = atom_e(us3, s3);
        const cplx k3s = atom_s(ue3, us3);
        const cplx t3 = stage(0.5 * dt, ue3, 2.0, false);

        const cplx ue4 = ue + dt * k3e, us4 = us + dt * k3s;
        const cplx s4 = s0 + dt * t3;
        const cplx k4e = atom_e(us4, s4);
        const cplx k4s = atom_s(ue4, us4);

        // Fourth stage fused with the update of χ and the next Σ conj(a)χ.
        const double ur = ue4.real(), ui = ue4.imag();
        const double h6 = dt / 6.0;
        double sr = 0.0, si = 0.0, bath = 0.0;
        {
            const double* __restrict d_ = det.data();
            const double* __restrict ar_ = ar.data();
            const double* __restrict ai_ = ai.data();
            double* __restrict xr_ = xr.data();
            double* __restrict xi_ = xi.data();
            const double* __restrict kr_ = kr.data();
            const double* __restrict ki_ = ki.data();
            const double* __restrict accr_ = accr.data();
            const double* __restrict acci_ = acci.data();
            for (int j = 0; j < modes; ++j) {
                const double cr = xr_[j] + dt * kr_[j];
                const double ci = xi_[j] + dt * ki_[j];
                const double re = d_[j] * cr + ar_[j] * ur - ai_[j] * ui;
                const double im = d_[j] * ci + ar_[j] * ui + ai_[j] * ur;
                const double nr = xr_[j] + h6 * (accr_[j] + im);
                const double ni = xi_[j] + h6 * (acci_[j] - re);
                xr_[j] = nr;
                xi_[j] = ni;
                sr += ar_[j] * nr + ai_[j] * ni;
                si += ar_[j] * ni - ai_[j] * nr;
                bath += nr * nr + ni * ni;
            }
        }
        ue += h6 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
        us += h6 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
        s0 = cplx{sr, si};
        record(step, bath);
    }
    return run;
}

IntensityField oracle_intensity(const std::vector<FullState>& history, const ModeGrid& grid,
                                const SpacetimeGrid& xt) {
    xt.validate();
    IntensityField field;
    field.grid = xt;
    field.values.assign(static_cast<std::size_t>(xt.nx) * xt.nt, 0.0);
    const double dk = grid.dk();
    const double norm = dk / std::sqrt(2.0 * kPi);
    const double tol = xt.nt > 1 ? 0.5 * (xt.t_max - xt.t_min) / (xt.nt - 1) : 0.0;
    for (int jt = 0; jt < xt.nt; ++jt) {
        const double t = xt.t(jt);
        const FullState* match = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const FullState& s : history) {
            const double gap = std::abs(s.t - t);
            if (gap < best) {
                best = gap;
                match = &s;
            }
        }
        const double slack = match ? 0.5 * match->dt * (1.0 + 1e-9) : 0.0;
        if (match == nullptr || best > std::max({tol, slack, 1e-9 * (1.0 + std::abs(t))})) {
            throw std::invalid_argument("oracle_intensity: no snapshot at requested time");
        }
        if (static_cast<int>(match->psi.size()) != grid.size()) {
            throw std::invalid_argument("oracle_intensity: snapshot does not match the mode grid");
        }
        for (int ix = 0; ix < xt.nx; ++ix) {
            const double x = xt.x(ix);
            // e^{ik_j x} by recurrence from k_0 = (−K + ½)dk.
            const cplx step = std::polar(1.0, dk * x);
            cplx phase = std::polar(1.0, grid.k(0) * x);
            cplx sum{0.0, 0.0};
            for (int j = 0; j < grid.size(); ++j) {
                sum += phase * match->psi[j];
                phase *= step;
                if ((j & 1023) == 1023) phase = std::polar(1.0, grid.k(j + 1) * x);
            }
            field.values[static_cast<std::size_t>(jt) * xt.nx + ix] = std::norm(sum * norm);
        }
    }
    return field;
}

PopulationComparison compare_with_dde(const SystemParams& p, int n, const InitialCondition& init,
                                      double t_max, const ModeGrid& grid,
                                      const IntegratorOptions& dde_options) {
    const Trajectory dde = integrate(p, n, init, t_max, dde_options);
    const double h = dde.dt;
    const auto substeps =
        static_cast<int>(std::ceil(h / max_oracle_step(p, n, grid) * (1.0 + 1e-12)));
    OracleOptions oracle_options;
    oracle_options.sample_stride = substeps;
    const OracleRun oracle =
        integrate_full(p, n, init, grid, dde.horizon(), h / substeps, oracle_options);

    PopulationComparison cmp;
    cmp.max_norm_drift = oracle.max_norm_drift;
    cmp.warnings = oracle.warnings;
    const std::size_t count = std::min(dde.size(), oracle.trajectory.size());
    for (std::size_t k = 0; k < count; ++k) {
        const double pd = std::norm(dde.u_e[k]);
        const double po = std::norm(oracle.trajectory.u_e[k]);
        cmp.t.push_back(dde.time(k));
        cmp.p_dde.push_back(pd);
        cmp.p_oracle.push_back(po);
        cmp.max_diff = std::max(cmp.max_diff, std::abs(pd - po));
    }
    return cmp;
}

std::string comparison_csv(const PopulationComparison& cmp) {
    std::string out = "t,p_dde,p_oracle,abs_diff\n";
    for (std::size_t k = 0; k < cmp.t.size(); ++k) {
        append_number(out, cmp.t[k]);
        out += ',';
        append_number(out, cmp.p_dde[k]);
        out += ',';
        append_number(out, cmp.p_oracle[k]);
        out += ',';
        append_number(out, std::abs(cmp.p_dde[k] - cmp.p_oracle[k]));
        out += '\n';
    }
    return out;
}

}  // namespace giantbic
