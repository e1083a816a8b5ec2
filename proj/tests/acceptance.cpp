// Acceptance gates 1-10, one PASS/FAIL line each; exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"
#include "giantbic/field.hpp"
#include "giantbic/mode_oracle.hpp"
#include "giantbic/scenario.hpp"
#include "giantbic/spectral.hpp"

using namespace giantbic;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Preset {
    Scenario scenario;
    const SystemParams& params() const { return scenario.points.front().params; }
    Trajectory run(int n, double t_max) const {
        return integrate(params(), n, scenario.init, t_max, scenario.integrator);
    }
};

Preset preset(const std::string& name) { return {load_preset(name)}; }

// Mean spacing of local maxima of samples f(t_k) on [t_lo, t_hi], refined by a
// parabola through each maximum and its neighbours.
double period_from_maxima(const std::vector<double>& t, const std::vector<double>& f, double t_lo,
                          double t_hi) {
    std::vector<double> peaks;
    for (std::size_t k = 1; k + 1 < f.size(); ++k) {
        if (t[k] < t_lo || t[k] > t_hi) continue;
        if (f[k] > f[k - 1] && f[k] >= f[k + 1]) {
            const double denom = f[k - 1] - 2 * f[k] + f[k + 1];
            const double shift = denom == 0.0 ? 0.0 : 0.5 * (f[k - 1] - f[k + 1]) / denom;
            peaks.push_back(t[k] + shift * (t[k + 1] - t[k]));
        }
    }
    if (peaks.size() < 2) return std::nan("");
    return (peaks.back() - peaks.front()) / static_cast<double>(peaks.size() - 1);
}

struct Series {
    std::vector<double> t, p;
};

Series population_series(const Trajectory& traj) {
    Series s;
    s.p = population(traj);
    for (std::size_t k = 0; k < traj.size(); ++k) s.t.push_back(traj.time(k));
    return s;
}

Verdict criterion_1() {
    const Preset pr = preset("exponential");
    const double gamma = derive_rates(pr.params()).gamma_total;
    const auto t0 = std::chrono::steady_clock::now();
    const Trajectory traj = pr.run(0, 10.0 / gamma);
    const double runtime = seconds_since(t0);
    const auto pop = population(traj);
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        worst = std::max(worst, std::abs(pop[k] - std::exp(-gamma * traj.time(k))));
    }
    return {worst < 1e-8 && runtime < 1.0, fmt("max|P - e^-Gt| = %.2e, runtime %.3f s", worst, runtime)};
}

Verdict criterion_2() {
    const Preset pr = preset("predelay-rabi");
    const SystemParams& p = pr.params();
    const DerivedRates r = derive_rates(p);
    const double g = subspace_params(p, 0).g_n, gamma = r.gamma_total;
    const double omega = std::sqrt(g * g - gamma * gamma / 16);
    const Trajectory traj = pr.run(0, r.tau);
    double worst = 0.0, peak = 0.0;
    for (std::size_t k = 0; k < traj.size() && traj.time(k) < r.tau; ++k) {
        const double t = traj.time(k);
        const double closed = std::exp(-gamma * t / 4) * (std::cos(omega * t) - gamma / (4 * omega) * std::sin(omega * t));
        worst = std::max(worst, std::abs(traj.u_e[k] - closed));
        peak = std::max(peak, std::abs(closed));
    }
    const double rel = worst / peak;
    return {rel < 1e-7 && std::abs(r.delta) < 1e-12 && std::abs(g - gamma) < 1e-12 * gamma,
            fmt("sup|U - closed| / sup|closed| = %.2e on [0, %g)", rel, r.tau)};
}

Verdict criterion_3() {
    const double on = population(preset("giant-plateau").run(0, 50.0)).back();
    const double off = population(preset("giant-off").run(0, 50.0)).back();
    return {std::abs(on - 4.0 / 9.0) <= 0.005 && off < 1e-3,
            fmt("P(50) = %.6f at 201pi (4/9 = %.6f), %.2e at 201.5pi", on, 4.0 / 9.0, off)};
}

Verdict criterion_4() {
    const Preset pr = preset("fig3-doublebic");
    const Series s = population_series(pr.run(0, 50.0));
    double worst = 0.0;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        if (s.t[k] < 40.0) continue;
        worst = std::max(worst, std::abs(s.p[k] - 0.64 * std::pow(std::cos(kPi * s.t[k]), 2)));
    }
    const double expected = beat_period(subspace_params(pr.params(), 0));
    const double period = period_from_maxima(s.t, s.p, 40.0, 50.0);
    const double rel = std::abs(period / expected - 1);
    return {worst < 0.01 && rel < 0.005 && std::abs(expected - 1.0) < 1e-12,
            fmt("sup|P - 0.64cos^2(pi t)| = %.2e on [40,50]; period %.6f vs pi/Delta = %.6f (%.1e)", worst,
                period, expected, rel)};
}

Verdict criterion_5() {
    const SystemParams p = preset("fig3-doublebic").params();
    const BicSearch found = find_bics(p, 0);
    bool ok = found.solutions.size() == 2;
    double residual = 0.0;
    for (const BicSolution& b : found.solutions) {
        ok = ok && b.q == (b.branch == Branch::plus ? 101 : 100);
        residual = std::max(residual, b.phase_residual);
    }
    SystemParams dark = p;
    const CouplingSpec c = couplings_for_rates(derive_rates(p).gamma_total, 0.0, p.v);
    dark.j1_mag = c.j1_mag;
    dark.j2_mag = c.j2_mag;
    dark.phi1 = c.phi1;
    dark.phi2 = c.phi2;
    const std::size_t dark_count = find_bics(dark, 0).solutions.size();
    std::string listed;
    for (const BicSolution& b : found.solutions) listed += fmt("(%s,%lld)", to_string(b.branch), b.q);
    return {ok && residual < 1e-9 && dark_count == 0,
            fmt("%s, phase residual %.1e; %zu solution(s) at gamma = 0", listed.c_str(), residual, dark_count)};
}

Verdict criterion_6() {
    bool all = true;
    std::string detail;
    for (const char* name : {"exponential", "predelay-rabi", "giant-plateau", "fig3-doublebic"}) {
        const Preset pr = preset(name);
        const auto t0 = std::chrono::steady_clock::now();
        const ModeGrid grid = ModeGrid::defaults(pr.params(), 8192);
        const PopulationComparison c = compare_with_dde(pr.params(), 0, pr.scenario.init, 20.0, grid, pr.scenario.integrator);
        const double runtime = seconds_since(t0);
        const bool ok = c.max_diff < 5e-3 && c.max_norm_drift < 1e-6 && runtime < 120.0;
        all = all && ok;
        detail += fmt("%s%s: diff %.2e drift %.1e %.0fs%s", detail.empty() ? "" : "; ", name, c.max_diff,
                      c.max_norm_drift, runtime, ok ? "" : " [x]");
    }
    return {all, detail};
}

Verdict criterion_7() {
    // Light cone: exact zeros for t < (|x| - d/2)/v, on every preset with a field.
    bool cone = true, lit = false;
    for (const char* name : {"single-bic", "fig3-doublebic"}) {
        const Preset pr = preset(name);
        const SystemParams& p = pr.params();
        const Trajectory traj = pr.run(0, 6.0);
        const SpacetimeGrid grid{-6.0, 6.0, 481, 0.0, 6.0, 241};
        const IntensityField f = intensity_map(traj, p, grid);
        for (int j = 0; j < grid.nt; ++j) {
            for (int i = 0; i < grid.nx; ++i) {
                const bool outside = grid.t(j) < (std::abs(grid.x(i)) - p.d / 2) / p.v;
                if (outside && f.at(i, j) != 0.0) cone = false;
                if (!outside && f.at(i, j) > 0.0) lit = true;
            }
        }
    }
    // Single trapped state: steady standing wave with nodes at the coupling points.
    const Preset pr = preset("single-bic");
    const SystemParams& p = pr.params();
    const auto bics = find_bics(p, 0).solutions;
    const Trajectory traj = pr.run(0, 50.0);
    const SpacetimeGrid grid{-p.d / 2, p.d / 2, 601, 45.0, 50.0, 6};
    const IntensityField f = intensity_map(traj, p, grid);
    double worst = 0.0, peak = 0.0, edge = 0.0;
    for (int j = 0; j < grid.nt; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double steady = std::norm(steady_bic_field(p, bics, grid.x(i), grid.t(j)));
            peak = std::max(peak, steady);
            worst = std::max(worst, std::abs(f.at(i, j) - steady));
        }
        edge = std::max({edge, f.at(0, j), f.at(grid.nx - 1, j)});
    }
    const double dx = (grid.x_max - grid.x_min) / (grid.nx - 1);
    const double node_tol = std::pow(std::sin(bics.front().omega_lab * dx / p.v), 2) * peak;
    const bool ok = cone && lit && bics.size() == 1 && worst <= 0.02 * peak && edge <= node_tol;
    return {ok, fmt("light cone %s; max|I - I_steady| = %.2e of max; I(+-d/2) = %.1e (grid tol %.1e)",
                    cone ? "exact" : "VIOLATED", worst / peak, edge, node_tol)};
}

Verdict criterion_8() {
    const Preset pr = preset("fig3-doublebic");
    const SystemParams& p = pr.params();
    const SubspaceParams sub = subspace_params(p, 0);
    const double t_nb = beat_period(sub);
    const double lambda_nb = 2 * kPi * p.v / (2 * sub.delta_n);
    const Trajectory traj = pr.run(0, 50.0);

    // Temporal period at an interior point.
    Series s;
    for (double t = 40.0; t <= 50.0; t += 1e-3) {
        s.t.push_back(t);
        s.p.push_back(std::norm(emitted_amplitude(traj, p, 0.2 * p.d, t)));
    }
    const double period = period_from_maxima(s.t, s.p, 40.0, 50.0);
    const double t_err = std::abs(period / t_nb - 1);

    // Spatial envelope: box-average over one carrier period of the intensity,
    // then least-squares fit a + b cos(kx) + c sin(kx) scanning k.
    const double t_snap = 49.0;
    const double carrier = kPi * p.v / sub.omega_plus;
    const int per_box = 32;
    const double h = carrier / per_box;
    std::vector<double> xs, avg;
    for (double x0 = -0.45 * p.d; x0 + carrier <= 0.45 * p.d; x0 += carrier / 4) {
        double sum = 0.0;
        for (int m = 0; m < per_box; ++m) sum += std::norm(emitted_amplitude(traj, p, x0 + (m + 0.5) * h, t_snap));
        xs.push_back(x0 + carrier / 2);
        avg.push_back(sum / per_box);
    }
    const auto residual = [&](double k) {
        // Normal equations for the 3-parameter linear model.
        double a[3][4] = {};
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double phi[3] = {1.0, std::cos(k * xs[i]), std::sin(k * xs[i])};
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) a[r][c] += phi[r] * phi[c];
                a[r][3] += phi[r] * avg[i];
            }
        }
        for (int r = 0; r < 3; ++r) {
            for (int q = r + 1; q < 3; ++q) {
                const double m = a[q][r] / a[r][r];
                for (int c = r; c < 4; ++c) a[q][c] -= m * a[r][c];
            }
        }
        double coef[3];
        for (int r = 2; r >= 0; --r) {
            double acc = a[r][3];
            for (int c = r + 1; c < 3; ++c) acc -= a[r][c] * coef[c];
            coef[r] = acc / a[r][r];
        }
        double ss = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double model = coef[0] + coef[1] * std::cos(k * xs[i]) + coef[2] * std::sin(k * xs[i]);
            ss += (avg[i] - model) * (avg[i] - model);
        }
        return ss;
    };
    const double k0 = 2 * kPi / lambda_nb;
    double best_k = k0, best = residual(k0);
    for (double k = 0.5 * k0; k <= 1.5 * k0; k += 1e-4 * k0) {
        const double r = residual(k);
        if (r < best) {
            best = r;
            best_k = k;
        }
    }
    const double lambda = 2 * kPi / best_k;
    const double x_err = std::abs(lambda / lambda_nb - 1);
    return {t_err < 0.01 && x_err < 0.02,
            fmt("T = %.5f vs %.5f (%.1e); lambda = %.5f vs %.5f (%.1e)", period, t_nb, t_err, lambda, lambda_nb,
                x_err)};
}

Verdict criterion_9() {
    const Preset pr = preset("photon-scaling");
    std::vector<double> periods;
    for (int n : pr.scenario.subspaces) {
        const Series s = population_series(pr.run(n, 50.0));
        periods.push_back(period_from_maxima(s.t, s.p, 40.0, 50.0));
    }
    bool ok = pr.scenario.subspaces == std::vector<int>{0, 3, 8};
    std::string detail;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        const int n = pr.scenario.subspaces[i];
        const double scaled = periods[i] / periods[0];
        const double expected = 1.0 / std::sqrt(n + 1.0);
        const double err = std::abs(scaled / expected - 1);
        ok = ok && err < 0.01;
        detail += fmt("%sn=%d T=%.5f T/T0=%.5f (1/sqrt(n+1) = %.5f)", i ? "; " : "", n, periods[i], scaled, expected);
    }
    return {ok, detail};
}

Verdict criterion_10() {
    const Preset pr = preset("joint-subspaces");
    const RatioWitness w = oscillation_ratio_check(pr.params(), 0, 8);
    bool ok = w.rational && w.q_diff_n == 3 && w.q_diff_m == 1;
    std::string detail = fmt("witness (%lld,%lld)", w.q_diff_n, w.q_diff_m);
    for (int n : {0, 8}) {
        const Series s = population_series(pr.run(n, 50.0));
        double lo = 1.0, hi = 0.0;
        for (std::size_t k = 0; k < s.t.size(); ++k) {
            if (s.t[k] < 40.0) continue;
            lo = std::min(lo, s.p[k]);
            hi = std::max(hi, s.p[k]);
        }
        const double period = period_from_maxima(s.t, s.p, 40.0, 50.0);
        const double expected = beat_period(subspace_params(pr.params(), n));
        const bool oscillates = hi - lo > 0.1 && std::abs(period / expected - 1) < 0.01;
        ok = ok && oscillates;
        detail += fmt("; N=%d swing %.3f period %.5f (pi/Delta = %.5f)", n + 1, hi - lo, period, expected);
    }
    return {ok, detail};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"exponential limit", criterion_1},
        {"pre-delay damped Rabi", criterion_2},
        {"two-point trapping plateau", criterion_3},
        {"oscillating trapped population", criterion_4},
        {"pole finder exactness", criterion_5},
        {"oracle equivalence", criterion_6},
        {"field causality and nodes", criterion_7},
        {"beat structure", criterion_8},
        {"photon-number scaling", criterion_9},
        {"ratio condition", criterion_10},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += v.pass ? 0 : 1;
        std::printf("[%s] %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
