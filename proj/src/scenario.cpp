#include "giantbic/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "giantbic/csv.hpp"
#include "giantbic/errors.hpp"
#include "giantbic/mode_oracle.hpp"
#include "giantbic/spectral.hpp"

#ifndef GIANTBIC_VERSION
#define GIANTBIC_VERSION "unknown"
#endif
#ifndef GIANTBIC_PRESET_DIR
#define GIANTBIC_PRESET_DIR "presets"
#endif

namespace giantbic {

using nlohmann::json;
namespace fs = std::filesystem;

const char* version() { return GIANTBIC_VERSION; }

const char* to_string(OutputKind kind) {
    switch (kind) {
        case OutputKind::trajectory: return "trajectory";
        case OutputKind::poles: return "poles";
        case OutputKind::field_map: return "field-map";
        case OutputKind::oracle_compare: return "oracle-compare";
    }
    return "?";
}

std::optional<OutputKind> parse_output_kind(const std::string& name) {
    for (OutputKind k : {OutputKind::trajectory, OutputKind::poles, OutputKind::field_map,
                         OutputKind::oracle_compare}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

void Diagnostics::error(std::string key, std::string message) {
    items.push_back({Diagnostic::Severity::error, std::move(key), std::move(message)});
}

void Diagnostics::warning(std::string key, std::string message) {
    items.push_back({Diagnostic::Severity::warning, std::move(key), std::move(message)});
}

bool Diagnostics::ok() const { return error_count() == 0; }

std::size_t Diagnostics::error_count() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& d) {
        return d.severity == Diagnostic::Severity::error;
    }));
}

std::vector<const Diagnostic*> Diagnostics::errors() const {
    std::vector<const Diagnostic*> out;
    for (const auto& d : items) {
        if (d.severity == Diagnostic::Severity::error) out.push_back(&d);
    }
    return out;
}

std::vector<const Diagnostic*> Diagnostics::warnings() const {
    std::vector<const Diagnostic*> out;
    for (const auto& d : items) {
        if (d.severity == Diagnostic::Severity::warning) out.push_back(&d);
    }
    return out;
}

std::string Diagnostics::format() const {
    std::string out;
    for (const auto& d : items) {
        out += d.severity == Diagnostic::Severity::error ? "error: " : "warning: ";
        out += d.key;
        out += ": ";
        out += d.message;
        out += '\n';
    }
    return out;
}

SpacetimeGrid Scenario::field_grid_for(const SystemParams& p) const {
    return field_grid ? *field_grid : SpacetimeGrid::figure_default(p.d, horizon);
}

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Typed lookups that record a diagnostic instead of throwing.
class Reader {
public:
    explicit Reader(Diagnostics& diag) : diag_(diag) {}

    std::optional<double> number(const json& obj, const std::string& key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_number()) {
            diag_.error(join(path, key), "must be a number");
            return std::nullopt;
        }
        return v.get<double>();
    }

    // Accepts `key` or `key_pi` (value in multiples of π), not both.
    std::optional<double> scaled(const json& obj, const std::string& key, const std::string& path) {
        const bool plain = obj.contains(key);
        const bool in_pi = obj.contains(key + "_pi");
        if (plain && in_pi) {
            diag_.error(join(path, key), "give either " + key + " or " + key + "_pi, not both");
            return std::nullopt;
        }
        if (in_pi) {
            auto v = number(obj, key + "_pi", path);
            if (v) return *v * kPi;
            return std::nullopt;
        }
        return number(obj, key, path);
    }

    bool has_scaled(const json& obj, const std::string& key) const {
        return obj.contains(key) || obj.contains(key + "_pi");
    }

    std::optional<long long> integer(const json& obj, const std::string& key,
                                     const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (!v.is_number_integer()) {
            diag_.error(join(path, key), "must be an integer");
            return std::nullopt;
        }
        return v.get<long long>();
    }

    std::optional<cplx> complex(const json& obj, const std::string& key, const std::string& path) {
        if (!obj.contains(key)) return std::nullopt;
        const json& v = obj.at(key);
        if (v.is_number()) return cplx{v.get<double>(), 0.0};
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
            return cplx{v[0].get<double>(), v[1].get<double>()};
        }
        diag_.error(join(path, key), "must be a number or a [re, im] pair");
        return std::nullopt;
    }

    void unknown_keys(const json& obj, const std::string& path, const std::set<std::string>& known) {
        for (const auto& [k, _] : obj.items()) {
            if (!known.contains(k)) diag_.warning(join(path, k), "unknown key ignored");
        }
    }

private:
    Diagnostics& diag_;
};

const std::set<std::string> kParamKeys = {
    "omega_e", "omega_e_pi", "omega_s", "omega_s_pi", "omega_c", "omega_c_pi", "delta",
    "delta_pi", "g", "g_pi", "j1_mag", "j2_mag", "phi1", "phi1_pi", "phi2", "phi2_pi",
    "gamma_total", "gamma_coll", "v", "d", "tau"};

std::optional<SystemParams> resolve_params(const json& obj, const std::string& path,
                                           Diagnostics& diag) {
    if (!obj.is_object()) {
        diag.error(path, "must be an object");
        return std::nullopt;
    }
    Reader r(diag);
    const std::size_t errors_before = diag.error_count();
    r.unknown_keys(obj, path, kParamKeys);

    SystemParams p;
    const auto v = r.number(obj, "v", path);
    p.v = v.value_or(1.0);
    if (!(p.v > 0.0)) diag.error(join(path, "v"), "group velocity must be > 0");

    const auto omega_e = r.scaled(obj, "omega_e", path);
    if (!r.has_scaled(obj, "omega_e")) {
        diag.error(join(path, "omega_e"), "required (or omega_e_pi)");
    } else if (omega_e && !(*omega_e > 0.0)) {
        diag.error(join(path, "omega_e"), "must be > 0");
    }
    p.omega_e = omega_e.value_or(0.0);
    p.omega_s = r.scaled(obj, "omega_s", path).value_or(0.0);

    if (r.has_scaled(obj, "omega_c") && r.has_scaled(obj, "delta")) {
        diag.error(join(path, "omega_c"), "give either omega_c or delta, not both");
    } else if (r.has_scaled(obj, "omega_c")) {
        p.omega_c = r.scaled(obj, "omega_c", path).value_or(0.0);
    } else {
        const double delta = r.scaled(obj, "delta", path).value_or(0.0);
        p.omega_c = p.omega_e - p.omega_s - delta;
    }

    p.g = r.scaled(obj, "g", path).value_or(0.0);
    if (p.g < 0.0) diag.error(join(path, "g"), "atom-cavity coupling must be >= 0");

    const bool has_d = obj.contains("d");
    const bool has_tau = obj.contains("tau");
    if (has_d && has_tau) {
        diag.error(join(path, "d"), "give either d or tau, not both");
    } else if (!has_d && !has_tau) {
        diag.error(join(path, "d"), "required (or tau)");
    } else if (has_d) {
        p.d = r.number(obj, "d", path).value_or(0.0);
        if (!(p.d > 0.0)) diag.error(join(path, "d"), "separation must be > 0");
    } else {
        const double tau = r.number(obj, "tau", path).value_or(0.0);
        if (!(tau > 0.0)) diag.error(join(path, "tau"), "delay must be > 0");
        p.d = tau * p.v;
    }

    const bool rate_form = obj.contains("gamma_total") || obj.contains("gamma_coll");
    const bool coupling_form = obj.contains("j1_mag") || obj.contains("j2_mag");
    if (rate_form && coupling_form) {
        diag.error(join(path, "gamma_total"),
                   "give either gamma_total/gamma_coll or j1_mag/j2_mag, not both");
    } else if (rate_form) {
        const auto gt = r.number(obj, "gamma_total", path);
        const auto gc = r.number(obj, "gamma_coll", path);
        if (!obj.contains("gamma_total")) diag.error(join(path, "gamma_total"), "required with gamma_coll");
        if (!obj.contains("gamma_coll")) diag.error(join(path, "gamma_coll"), "required with gamma_total");
        if (r.has_scaled(obj, "phi1") || r.has_scaled(obj, "phi2")) {
            diag.error(join(path, "phi1"), "phases are implied by gamma_total/gamma_coll");
        }
        if (gt && gc) {
            if (*gt < 0.0) {
                diag.error(join(path, "gamma_total"), "must be >= 0");
            } else if (std::abs(*gc) > *gt) {
                diag.error(join(path, "gamma_coll"),
                           "|gamma_coll| exceeds gamma_total; the model requires Gamma >= gamma");
            } else if (p.v > 0.0) {
                const CouplingSpec c = couplings_for_rates(*gt, *gc, p.v);
                p.j1_mag = c.j1_mag;
                p.j2_mag = c.j2_mag;
                p.phi1 = c.phi1;
                p.phi2 = c.phi2;
            }
        }
    } else if (coupling_form) {
        p.j1_mag = r.number(obj, "j1_mag", path).value_or(0.0);
        p.j2_mag = r.number(obj, "j2_mag", path).value_or(0.0);
        if (p.j1_mag < 0.0) diag.error(join(path, "j1_mag"), "must be >= 0");
        if (p.j2_mag < 0.0) diag.error(join(path, "j2_mag"), "must be >= 0");
        p.phi1 = r.scaled(obj, "phi1", path).value_or(0.0);
        p.phi2 = r.scaled(obj, "phi2", path).value_or(0.0);
    } else {
        diag.error(join(path, "gamma_total"),
                   "waveguide couplings required (gamma_total/gamma_coll or j1_mag/j2_mag)");
    }

    if (diag.error_count() != errors_before) return std::nullopt;
    try {
        validate(p);
    } catch (const std::exception& e) {
        diag.error(path, e.what());
        return std::nullopt;
    }
    return p;
}

std::string sweep_label(const std::string& key, double value) {
    return key + format_number(value);
}

void check_physics(const Scenario& s, const SystemParams& p, const std::string& path,
                   Diagnostics& diag) {
    const DerivedRates r = derive_rates(p);
    const auto wants = [&](OutputKind k) {
        return std::find(s.outputs.begin(), s.outputs.end(), k) != s.outputs.end();
    };
    if (wants(OutputKind::poles)) {
        if (std::abs(r.gamma_coll) <= kDefaultBicTol * r.gamma_total) {
            diag.warning(join(path, "gamma_coll"), "no pure-imaginary poles possible (gamma = 0)");
        } else if (std::abs(std::abs(r.gamma_coll) - r.gamma_total) > kDefaultBicTol * r.gamma_total) {
            diag.warning(join(path, "gamma_coll"),
                         "|gamma| != Gamma: no bound state in the continuum can form");
        }
    }
    if (!s.point_like && r.tau < r.lambda_e) {
        diag.warning(join(path, "d"), "d < lambda_e: small-atom regime");
    }
    if (wants(OutputKind::field_map)) {
        try {
            require_symmetric_couplings(p);
        } catch (const std::exception& e) {
            diag.error(join(path, "j1_mag"), e.what());
        }
    }
}

std::optional<SpacetimeGrid> read_grid(const json& obj, const std::string& path, double horizon,
                                       Diagnostics& diag) {
    if (!obj.is_object()) {
        diag.error(path, "must be an object");
        return std::nullopt;
    }
    Reader r(diag);
    r.unknown_keys(obj, path, {"x_min", "x_max", "nx", "t_min", "t_max", "nt"});
    SpacetimeGrid g;
    g.x_min = r.number(obj, "x_min", path).value_or(g.x_min);
    g.x_max = r.number(obj, "x_max", path).value_or(g.x_max);
    g.t_min = r.number(obj, "t_min", path).value_or(0.0);
    g.t_max = r.number(obj, "t_max", path).value_or(horizon);
    g.nx = static_cast<int>(r.integer(obj, "nx", path).value_or(g.nx));
    g.nt = static_cast<int>(r.integer(obj, "nt", path).value_or(g.nt));
    try {
        g.validate();
    } catch (const std::exception& e) {
        diag.error(path, e.what());
        return std::nullopt;
    }
    if (g.t_min < 0.0) diag.error(join(path, "t_min"), "must be >= 0");
    if (g.t_max > horizon) diag.error(join(path, "t_max"), "exceeds the scenario horizon");
    return g;
}

}  // namespace

ParseResult parse_scenario(const json& config) {
    ParseResult out;
    Diagnostics& diag = out.diagnostics;
    if (!config.is_object()) {
        diag.error("<root>", "config must be a JSON object");
        return out;
    }
    Reader r(diag);
    r.unknown_keys(config, "", {"name", "units", "params", "subspaces", "init", "horizon",
                                "steps_per_delay", "local_error_tol", "point_like", "outputs",
                                "field_grid", "oracle", "sweep", "description"});

    Scenario s;
    s.source = config;
    if (!config.contains("name") || !config["name"].is_string() ||
        config["name"].get<std::string>().empty()) {
        diag.error("name", "required non-empty string");
    } else {
        s.name = config["name"].get<std::string>();
        const bool safe = std::all_of(s.name.begin(), s.name.end(), [](char c) {
            return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
        });
        if (!safe) diag.error("name", "only letters, digits, '-', '_' and '.' are allowed");
    }
    if (!config.contains("units") || !config["units"].is_string()) {
        diag.error("units", "required string stating the unit convention, e.g. \"natural, v=1, Gamma=1\"");
    } else {
        s.units = config["units"].get<std::string>();
    }

    if (!config.contains("horizon")) {
        diag.error("horizon", "required");
    } else if (auto h = r.number(config, "horizon", ""); h) {
        if (!(*h > 0.0) || !std::isfinite(*h)) diag.error("horizon", "must be > 0");
        s.horizon = *h;
    }

    if (config.contains("point_like")) {
        if (!config["point_like"].is_boolean()) {
            diag.error("point_like", "must be a boolean");
        } else {
            s.point_like = config["point_like"].get<bool>();
        }
    }
    if (auto spd = r.integer(config, "steps_per_delay", ""); spd) {
        if (*spd < 20 || *spd > 1000000) {
            diag.error("steps_per_delay", "must lie in [20, 1000000]");
        } else {
            s.integrator.steps_per_delay = static_cast<int>(*spd);
        }
    }
    if (auto tol = r.number(config, "local_error_tol", ""); tol) {
        if (!(*tol > 0.0)) diag.error("local_error_tol", "must be > 0");
        s.integrator.local_error_tol = *tol;
    }

    if (!config.contains("subspaces")) {
        s.subspaces = {0};
    } else if (!config["subspaces"].is_array() || config["subspaces"].empty()) {
        diag.error("subspaces", "must be a non-empty array of integers >= 0");
    } else {
        std::set<long long> seen;
        for (std::size_t i = 0; i < config["subspaces"].size(); ++i) {
            const json& v = config["subspaces"][i];
            const std::string key = "subspaces[" + std::to_string(i) + "]";
            if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > 1000000) {
                diag.error(key, "must be an integer in [0, 1000000]");
                continue;
            }
            if (!seen.insert(v.get<long long>()).second) {
                diag.error(key, "duplicate subspace");
                continue;
            }
            s.subspaces.push_back(static_cast<int>(v.get<long long>()));
        }
    }

    if (config.contains("init")) {
        const json& init = config["init"];
        if (!init.is_object()) {
            diag.error("init", "must be an object {u_e: [re, im], u_s: [re, im]}");
        } else {
            r.unknown_keys(init, "init", {"u_e", "u_s"});
            s.init.u_e0 = r.complex(init, "u_e", "init").value_or(cplx{0.0, 0.0});
            s.init.u_s0 = r.complex(init, "u_s", "init").value_or(cplx{0.0, 0.0});
            const double norm = std::norm(s.init.u_e0) + std::norm(s.init.u_s0);
            if (norm > 1.0 + 1e-12) diag.error("init", "|u_e|^2 + |u_s|^2 must not exceed 1");
        }
    }

    if (!config.contains("outputs")) {
        diag.error("outputs", "required (may be empty)");
    } else if (!config["outputs"].is_array()) {
        diag.error("outputs", "must be an array");
    } else {
        for (std::size_t i = 0; i < config["outputs"].size(); ++i) {
            const json& v = config["outputs"][i];
            const std::string key = "outputs[" + std::to_string(i) + "]";
            const auto kind = v.is_string() ? parse_output_kind(v.get<std::string>()) : std::nullopt;
            if (!kind) {
                diag.error(key, "unknown output; expected trajectory, poles, field-map or oracle-compare");
                continue;
            }
            if (std::find(s.outputs.begin(), s.outputs.end(), *kind) != s.outputs.end()) {
                diag.error(key, "duplicate output");
                continue;
            }
            s.outputs.push_back(*kind);
        }
    }
    const auto wants = [&](OutputKind k) {
        return std::find(s.outputs.begin(), s.outputs.end(), k) != s.outputs.end();
    };
    if (s.point_like && wants(OutputKind::oracle_compare)) {
        diag.error("outputs", "oracle-compare needs the delayed model; drop point_like");
    }

    if (config.contains("field_grid") && s.horizon > 0.0) {
        s.field_grid = read_grid(config["field_grid"], "field_grid", s.horizon, diag);
    }

    if (config.contains("oracle")) {
        const json& o = config["oracle"];
        if (!o.is_object()) {
            diag.error("oracle", "must be an object");
        } else {
            r.unknown_keys(o, "oracle", {"K", "k_max", "horizon", "tolerance", "max_norm_drift"});
            if (auto K = r.integer(o, "K", "oracle"); K) {
                if (*K < 16 || *K > (1 << 22)) diag.error("oracle.K", "must lie in [16, 4194304]");
                s.oracle.K = static_cast<int>(*K);
            }
            if (auto k = r.number(o, "k_max", "oracle"); k) {
                if (!(*k > 0.0)) diag.error("oracle.k_max", "must be > 0");
                s.oracle.k_max = *k;
            }
            if (auto h = r.number(o, "horizon", "oracle"); h) {
                if (!(*h > 0.0)) diag.error("oracle.horizon", "must be > 0");
                s.oracle.horizon = *h;
            }
            if (auto t = r.number(o, "tolerance", "oracle"); t) {
                if (!(*t > 0.0)) diag.error("oracle.tolerance", "must be > 0");
                s.oracle.tolerance = *t;
            }
            if (auto t = r.number(o, "max_norm_drift", "oracle"); t) {
                if (!(*t > 0.0)) diag.error("oracle.max_norm_drift", "must be > 0");
                s.oracle.max_norm_drift = *t;
            }
        }
    }
    if (s.horizon > 0.0) s.oracle.horizon = std::min(s.oracle.horizon, s.horizon);

    if (!config.contains("params")) {
        diag.error("params", "required");
    } else if (!config.contains("sweep")) {
        if (auto p = resolve_params(config["params"], "params", diag)) {
            s.points.push_back({"", 0.0, *p});
        }
    } else {
        const json& sw = config["sweep"];
        if (!sw.is_object() || !sw.contains("key") || !sw["key"].is_string() ||
            !sw.contains("values") || !sw["values"].is_array() || sw["values"].empty()) {
            diag.error("sweep", "must be {\"key\": <params key>, \"values\": [numbers]}");
        } else {
            s.sweep_key = sw["key"].get<std::string>();
            if (!kParamKeys.contains(s.sweep_key)) {
                diag.error("sweep.key", "not a params key: " + s.sweep_key);
            } else {
                std::set<std::string> labels;
                for (std::size_t i = 0; i < sw["values"].size(); ++i) {
                    const json& v = sw["values"][i];
                    const std::string key = "sweep.values[" + std::to_string(i) + "]";
                    if (!v.is_number()) {
                        diag.error(key, "must be a number");
                        continue;
                    }
                    json params = config["params"];
                    if (params.is_object()) params[s.sweep_key] = v;
                    auto p = resolve_params(params, key, diag);
                    if (!p) continue;
                    const std::string label = sweep_label(s.sweep_key, v.get<double>());
                    if (!labels.insert(label).second) {
                        diag.error(key, "duplicate sweep value");
                        continue;
                    }
                    s.points.push_back({label, v.get<double>(), *p});
                }
            }
        }
    }

    if (diag.ok()) {
        for (const SweepPoint& pt : s.points) {
            check_physics(s, pt.params, pt.label.empty() ? "params" : "sweep." + pt.label, diag);
        }
    }
    if (diag.ok()) {
        for (const Diagnostic* w : diag.warnings()) s.validation_warnings.push_back(w->key + ": " + w->message);
        out.scenario = std::move(s);
    }
    return out;
}

ParseResult parse_scenario_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult out;
        out.diagnostics.error("<file>", "cannot open " + path.string());
        return out;
    }
    json config;
    try {
        config = json::parse(in);
    } catch (const json::exception& e) {
        ParseResult out;
        out.diagnostics.error("<file>", std::string("not valid JSON: ") + e.what());
        return out;
    }
    return parse_scenario(config);
}

Scenario load_scenario(const fs::path& path) {
    ParseResult parsed = parse_scenario_file(path);
    if (!parsed.scenario) {
        const Diagnostic* first = parsed.diagnostics.errors().front();
        throw ConfigError(first->key, first->message);
    }
    return std::move(*parsed.scenario);
}

fs::path default_preset_dir() { return fs::path(GIANTBIC_PRESET_DIR); }

fs::path preset_path(const std::string& name, const fs::path& dir) {
    const fs::path base = dir.empty() ? default_preset_dir() : dir;
    const fs::path file = base / (name + ".json");
    if (name.empty() || name.find('/') != std::string::npos || !fs::is_regular_file(file)) {
        throw ConfigError("preset", "no preset named '" + name + "' in " + base.string());
    }
    return file;
}

std::vector<std::string> list_presets(const fs::path& dir) {
    const fs::path base = dir.empty() ? default_preset_dir() : dir;
    std::vector<std::string> names;
    if (!fs::is_directory(base)) return names;
    for (const auto& entry : fs::directory_iterator(base)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            names.push_back(entry.path().stem().string());
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

Scenario load_preset(const std::string& name, const fs::path& dir) {
    return load_scenario(preset_path(name, dir));
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * length);
    for (unsigned int i = 0; i < length; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

json params_json(const SystemParams& p) {
    const DerivedRates r = derive_rates(p);
    return {
        {"omega_e", p.omega_e}, {"omega_s", p.omega_s}, {"omega_c", p.omega_c}, {"g", p.g},
        {"j1_mag", p.j1_mag},   {"j2_mag", p.j2_mag},   {"phi1", p.phi1},       {"phi2", p.phi2},
        {"v", p.v},             {"d", p.d},
        {"derived",
         {{"gamma_total", r.gamma_total},
          {"gamma_coll", r.gamma_coll},
          {"tau", r.tau},
          {"delta", r.delta},
          {"lambda_e", r.lambda_e},
          {"coherence_length", std::isfinite(r.coherence_length) ? json(r.coherence_length)
                                                                  : json(nullptr)}}},
    };
}

namespace {

struct Job {
    const SweepPoint* point = nullptr;
    int n = 0;
    OutputKind kind = OutputKind::trajectory;
};

struct JobResult {
    std::vector<std::pair<std::string, std::string>> files;  // relative path, content
    std::vector<std::string> warnings;
    std::optional<OracleVerdict> verdict;
};

std::string stem(const char* prefix, const Job& job) {
    std::string s = std::string(prefix) + "_n" + std::to_string(job.n);
    if (!job.point->label.empty()) s += "_" + job.point->label;
    return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

Trajectory simulate(const Scenario& s, const Job& job, double t_max) {
    return s.point_like ? integrate_point_atom(job.point->params, job.n, s.init, t_max, s.integrator)
                        : integrate(job.point->params, job.n, s.init, t_max, s.integrator);
}

JobResult run_job(const Scenario& s, const Job& job) {
    JobResult out;
    const SystemParams& p = job.point->params;
    const std::string where =
        "n=" + std::to_string(job.n) + (job.point->label.empty() ? "" : " " + job.point->label);
    switch (job.kind) {
        case OutputKind::trajectory: {
            out.files.emplace_back(stem("trajectory", job) + ".csv",
                                   trajectory_csv(simulate(s, job, s.horizon)));
            break;
        }
        case OutputKind::poles: {
            const BicSearch search = find_bics(p, job.n, kDefaultBicTol, s.init);
            json arr = json::array();
            for (const BicSolution& b : search.solutions) {
                arr.push_back({{"n", b.n},
                               {"branch", to_string(b.branch)},
                               {"omega", b.omega},
                               {"q", b.q},
                               {"residue_re", b.residue_e.real()},
                               {"residue_im", b.residue_e.imag()},
                               {"phase_residual", b.phase_residual}});
            }
            for (const std::string& w : search.warnings) out.warnings.push_back(where + ": " + w);
            out.files.emplace_back(stem("poles", job) + ".json", dump(arr));
            break;
        }
        case OutputKind::field_map: {
            const SpacetimeGrid grid = s.field_grid_for(p);
            const Trajectory traj = simulate(s, job, std::max(s.horizon, grid.t_max));
            const IntensityField field = intensity_map(traj, p, grid);
            json sidecar = {
                {"scenario", s.name},
                {"n", job.n},
                {"units", s.units},
                {"columns", {"x", "t", "intensity"}},
                {"order", "t-major"},
                {"grid",
                 {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"nx", grid.nx},
                  {"t_min", grid.t_min}, {"t_max", grid.t_max}, {"nt", grid.nt}}},
                {"params", params_json(p)},
            };
            out.files.emplace_back(stem("field", job) + ".csv", intensity_csv(field));
            out.files.emplace_back(stem("field", job) + ".json", dump(sidecar));
            break;
        }
        case OutputKind::oracle_compare: {
            ModeGrid grid = ModeGrid::defaults(p, s.oracle.K);
            if (s.oracle.k_max > 0.0) grid.k_max = s.oracle.k_max;
            const PopulationComparison cmp =
                compare_with_dde(p, job.n, s.init, s.oracle.horizon, grid, s.integrator);
            OracleVerdict v;
            v.label = job.point->label;
            v.n = job.n;
            v.max_diff = cmp.max_diff;
            v.max_norm_drift = cmp.max_norm_drift;
            v.pass = cmp.max_diff < s.oracle.tolerance && cmp.max_norm_drift < s.oracle.max_norm_drift;
            for (const std::string& w : cmp.warnings) out.warnings.push_back(where + ": " + w);
            json verdict = {
                {"max_diff", v.max_diff},
                {"pass", v.pass},
                {"tolerance", s.oracle.tolerance},
                {"max_norm_drift", v.max_norm_drift},
                {"norm_drift_limit", s.oracle.max_norm_drift},
                {"K", grid.K},
                {"k_max", grid.k_max},
                {"horizon", s.oracle.horizon},
                {"n", job.n},
                {"warnings", cmp.warnings},
            };
            out.files.emplace_back(stem("oracle", job) + ".csv", comparison_csv(cmp));
            out.files.emplace_back(stem("oracle", job) + ".json", dump(verdict));
            out.verdict = v;
            break;
        }
    }
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
    if (options.out_dir.empty()) throw std::invalid_argument("run_scenario: empty output directory");
    fs::create_directories(options.out_dir);

    const std::vector<OutputKind>& kinds = options.outputs ? *options.outputs : scenario.outputs;
    std::vector<Job> jobs;
    for (const SweepPoint& pt : scenario.points) {
        for (int n : scenario.subspaces) {
            for (OutputKind k : kinds) jobs.push_back({&pt, n, k});
        }
    }

    std::vector<JobResult> results(jobs.size());
    std::vector<std::exception_ptr> failures(jobs.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            try {
                results[i] = run_job(scenario, jobs[i]);
                for (const auto& [name, content] : results[i].files) {
                    write_file(options.out_dir / name, content);
                }
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const int workers =
        std::max(1, std::min(options.workers, static_cast<int>(std::max<std::size_t>(jobs.size(), 1))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    }
    for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }

    RunReport report;
    for (const JobResult& r : results) {
        for (const auto& [name, content] : r.files) {
            report.files.push_back({name, sha256_hex(content), content.size()});
        }
        report.warnings.insert(report.warnings.end(), r.warnings.begin(), r.warnings.end());
        if (r.verdict) report.oracle.push_back(*r.verdict);
    }
    std::sort(report.files.begin(), report.files.end(),
              [](const EmittedFile& a, const EmittedFile& b) { return a.path < b.path; });

    json points = json::array();
    for (const SweepPoint& pt : scenario.points) {
        points.push_back({{"label", pt.label}, {"params", params_json(pt.params)}});
    }
    json files = json::array();
    for (const EmittedFile& f : report.files) {
        files.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    }
    json outputs = json::array();
    for (OutputKind k : kinds) outputs.push_back(to_string(k));
    const json manifest = {
        {"tool", "giantbic"},
        {"version", version()},
        {"scenario", scenario.name},
        {"units", scenario.units},
        {"config", scenario.source},
        {"outputs", outputs},
        {"subspaces", scenario.subspaces},
        {"horizon", scenario.horizon},
        {"steps_per_delay", scenario.integrator.steps_per_delay},
        {"point_like", scenario.point_like},
        {"points", points},
        {"files", files},
        {"validation_warnings", scenario.validation_warnings},
        {"warnings", report.warnings},
    };
    report.manifest_path = options.out_dir / "manifest.json";
    write_file(report.manifest_path, dump(manifest));
    return report;
}

}  // namespace giantbic
