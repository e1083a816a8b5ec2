#include "giantbic/spectral.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace giantbic {

namespace {

enum class Parity { odd, even };

std::optional<Parity> trapping_parity(const DerivedRates& r, double tol) {
    if (!(r.gamma_total > 0.0)) return std::nullopt;
    if (std::abs(r.gamma_total - r.gamma_coll) <= tol * r.gamma_total) return Parity::odd;
    if (std::abs(r.gamma_total + r.gamma_coll) <= tol * r.gamma_total) return Parity::even;
    return std::nullopt;
}

// Excited-state residue of the pole at ω'_{n±}. At |γ| = Γ the derivative of
// the characteristic function there is −iΔ(2 + Γτw) (w = cos²θ or sin²θ),
// which reproduces the dressed-state amplitudes 2w/(Γτw + 2)·[u_e0 + 2g u_s0/(δ ± 2Δ)].
cplx branch_residue(const DerivedRates& r, const SubspaceParams& sub, Branch b,
                    const InitialCondition& init) {
    const double w = b == Branch::plus ? sub.weight_plus() : sub.weight_minus();
    cplx bracket = init.u_e0;
    if (sub.g_n > 0.0) {
        const double denom = r.delta + sign_of(b) * 2.0 * sub.delta_n;
        if (denom == 0.0) throw std::domain_error("longtime_amplitude: degenerate dressed state");
        bracket += 2.0 * sub.g_n * init.u_s0 / denom;
    }
    return 2.0 * w / (r.gamma_total * r.tau * w + 2.0) * bracket;
}

}  // namespace

BicSearch find_bics(const SystemParams& p, int n, double tol, const InitialCondition& init) {
    const DerivedRates r = derive_rates(p);
    const SubspaceParams sub = subspace_params(p, n);
    BicSearch out;
    const auto parity = trapping_parity(r, tol);
    if (!parity) return out;

    for (Branch b : {Branch::plus, Branch::minus}) {
        const double weight = b == Branch::plus ? sub.weight_plus() : sub.weight_minus();
        // A dressed state without excited-state weight never talks to the waveguide.
        if (weight == 0.0) continue;
        const double shift = b == Branch::plus ? sub.shift_plus(p.omega_e) : sub.shift_minus(p.omega_e);
        const double omega_lab = b == Branch::plus ? sub.omega_plus : sub.omega_minus;
        if (omega_lab <= 0.0) {
            out.warnings.push_back(std::string("branch ") + to_string(b) +
                                   " skipped: dressed frequency is not positive");
            continue;
        }
        const double phase = omega_lab * r.tau;
        long long q = 0;
        double target = 0.0;
        if (*parity == Parity::odd) {
            q = std::llround((phase / kPi - 1.0) / 2.0);
            target = (2.0 * static_cast<double>(q) + 1.0) * kPi;
        } else {
            q = std::llround(phase / (2.0 * kPi));
            target = 2.0 * static_cast<double>(q) * kPi;
        }
        const double residual = std::abs(phase - target);
        if (residual >= tol) {
            if (residual < 10.0 * tol) {
                std::ostringstream msg;
                msg << "near miss on branch " << to_string(b) << " (n=" << n
                    << "): phase residual " << residual;
                out.warnings.push_back(msg.str());
            }
            continue;
        }

        BicSolution s;
        s.n = n;
        s.branch = b;
        s.omega = shift;
        s.omega_lab = omega_lab;
        s.q = q;
        s.phase_residual = residual;
        const double x = shift + r.delta;
        const double scale =
            r.gamma_total * (std::abs(x) + r.gamma_total) + sub.g_n * sub.g_n;
        s.pole_residual_re =
            std::abs((0.5 * r.gamma_coll * std::sin(phase) - shift) * x + sub.g_n * sub.g_n) / scale;
        s.pole_residual_im =
            std::abs((0.5 * r.gamma_total + 0.5 * r.gamma_coll * std::cos(phase)) * x) / scale;
        s.residue_e = branch_residue(r, sub, b, init);
        out.solutions.push_back(s);
    }
    return out;
}

DoubleBicDesign design_double_bic(double omega_e_target, double tau, long long q_plus,
                                  long long q_minus) {
    if (!(tau > 0.0)) throw std::invalid_argument("design_double_bic: tau must be > 0");
    if (q_minus < 0 || q_plus <= q_minus) {
        throw std::invalid_argument("design_double_bic: need q_plus > q_minus >= 0");
    }
    DoubleBicDesign out;
    out.q_plus = q_plus;
    out.q_minus = q_minus;
    out.omega_e = static_cast<double>(q_plus + q_minus + 1) * kPi / tau;
    out.g_n = static_cast<double>(q_plus - q_minus) * kPi / tau;
    out.target_offset = out.omega_e - omega_e_target;
    return out;
}

DoubleBicDesign design_double_bic_near(double omega_e_target, double tau, long long q_difference) {
    if (!(tau > 0.0)) throw std::invalid_argument("design_double_bic: tau must be > 0");
    if (q_difference <= 0) throw std::invalid_argument("design_double_bic: q difference must be > 0");
    // ω_e τ/π = q_+ + q_− + 1 with q_+ + q_− ≡ q_difference (mod 2).
    const double ideal_sum = omega_e_target * tau / kPi - 1.0;
    long long sum = std::llround(ideal_sum);
    if ((sum - q_difference) % 2 != 0) {
        sum += (ideal_sum > static_cast<double>(sum)) ? 1 : -1;
    }
    if (sum < q_difference) sum = q_difference;
    return design_double_bic(omega_e_target, tau, (sum + q_difference) / 2,
                             (sum - q_difference) / 2);
}

cplx longtime_amplitude(const SystemParams& p, int n, const InitialCondition& init, double t,
                        double tol) {
    const DerivedRates r = derive_rates(p);
    if (!trapping_parity(r, tol)) {
        throw std::domain_error("longtime_amplitude: requires |gamma| = Gamma");
    }
    cplx sum{0.0, 0.0};
    for (const BicSolution& s : find_bics(p, n, tol, init).solutions) {
        sum += s.residue_e * std::polar(1.0, -s.omega_lab * t);
    }
    return sum;
}

double coexistence_distance(const SystemParams& p, int m, int n, Branch alpha, Branch beta,
                            long long q_m, long long q_n) {
    const DerivedRates r = derive_rates(p);
    if (m < 0 || n < 0) throw std::invalid_argument("coexistence_distance: subspace index < 0");
    if (std::abs(r.delta) > 1e-12 * (1.0 + std::abs(p.omega_e))) {
        throw std::domain_error("coexistence_distance: formula holds at delta = 0 only");
    }
    const double g_m = p.g * std::sqrt(m + 1.0);
    const double g_n = p.g * std::sqrt(n + 1.0);
    const double denom = sign_of(alpha) * g_m - sign_of(beta) * g_n;
    if (std::abs(denom) <= 1e-14 * (g_m + g_n) || denom == 0.0) {
        throw std::invalid_argument("coexistence_distance: alpha*g_m - beta*g_n vanishes");
    }
    const double d = 2.0 * kPi * p.v * static_cast<double>(q_m - q_n) / denom;
    if (!(d > 0.0)) {
        throw std::invalid_argument("coexistence_distance: integers give no positive separation");
    }
    return d;
}

bool confirm_coexistence(const SystemParams& p, int m, int n, Branch alpha, Branch beta,
                         double tol) {
    const auto has = [&](int sub, Branch b) {
        for (const auto& s : find_bics(p, sub, tol).solutions) {
            if (s.branch == b) return true;
        }
        return false;
    };
    return has(m, alpha) && has(n, beta);
}

RatioWitness oscillation_ratio_check(const SystemParams& p, int m, int n) {
    const DerivedRates r = derive_rates(p);
    if (m < 0 || n < 0) throw std::invalid_argument("oscillation_ratio_check: subspace index < 0");
    if (std::abs(r.delta) > 1e-12 * (1.0 + std::abs(p.omega_e))) {
        throw std::domain_error("oscillation_ratio_check: requires delta = 0");
    }
    if (!(p.g > 0.0)) throw std::domain_error("oscillation_ratio_check: requires g > 0");
    // (Δ_n/Δ_m)² = (n+1)/(m+1): rational iff both reduced terms are perfect squares.
    long long num = n + 1;
    long long den = m + 1;
    const long long common = std::gcd(num, den);
    num /= common;
    den /= common;
    const auto exact_root = [](long long v) -> long long {
        auto root = static_cast<long long>(std::llround(std::sqrt(static_cast<double>(v))));
        while (root * root > v) --root;
        while ((root + 1) * (root + 1) <= v) ++root;
        return root * root == v ? root : -1;
    };
    const long long rn = exact_root(num);
    const long long rm = exact_root(den);
    RatioWitness w;
    if (rn > 0 && rm > 0) {
        w.rational = true;
        w.q_diff_n = rn;
        w.q_diff_m = rm;
    }
    return w;
}

}  // namespace giantbic
