// giantbic: command-line entry point for scenarios and presets.
//
// Exit codes: 0 success, 1 other failure, 2 configuration/schema violation,
// 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "giantbic/errors.hpp"
#include "giantbic/scenario.hpp"
#include "giantbic/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace giantbic;

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct SourceArgs {
    std::string config;
    std::string preset;
    std::string presets_dir;
    std::string out;
    int workers = 1;
};

void add_source_flags(CLI::App* cmd, SourceArgs& args, bool with_run_flags) {
    auto* config = cmd->add_option("--config", args.config, "scenario config (JSON)");
    auto* preset = cmd->add_option("--preset", args.preset, "name of a shipped preset");
    config->excludes(preset);
    cmd->add_option("--presets-dir", args.presets_dir, "directory searched by --preset");
    if (with_run_flags) {
        cmd->add_option("--out", args.out, "run directory (default runs/<scenario name>)");
        cmd->add_option("--workers", args.workers, "worker threads")->check(CLI::Range(1, 256));
    }
}

fs::path source_path(const SourceArgs& args) {
    if (!args.config.empty()) return args.config;
    if (!args.preset.empty()) return preset_path(args.preset, args.presets_dir);
    throw ConfigError("--config", "either --config or --preset is required");
}

ParseResult parse_source(const SourceArgs& args) { return parse_scenario_file(source_path(args)); }

Scenario require_scenario(const SourceArgs& args) {
    ParseResult parsed = parse_source(args);
    for (const Diagnostic* w : parsed.diagnostics.warnings()) {
        std::cerr << "warning: " << w->key << ": " << w->message << "\n";
    }
    if (!parsed.scenario) {
        for (const Diagnostic* e : parsed.diagnostics.errors()) {
            std::cerr << "error: " << e->key << ": " << e->message << "\n";
        }
        const Diagnostic* first = parsed.diagnostics.errors().front();
        throw ConfigError(first->key, first->message);
    }
    return std::move(*parsed.scenario);
}

RunReport execute(const SourceArgs& args, std::optional<std::vector<OutputKind>> only) {
    const Scenario s = require_scenario(args);
    RunOptions opts;
    opts.out_dir = args.out.empty() ? fs::path("runs") / s.name : fs::path(args.out);
    opts.workers = args.workers;
    opts.outputs = std::move(only);
    RunReport report = run_scenario(s, opts);
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "wrote " << report.files.size() << " file(s) and "
              << report.manifest_path.string() << "\n";
    return report;
}

int cmd_validate(const SourceArgs& args) {
    const ParseResult parsed = parse_source(args);
    std::cout << parsed.diagnostics.format();
    const std::size_t errors = parsed.diagnostics.error_count();
    std::cout << (errors == 0 ? "valid" : "invalid") << " (" << errors << " error(s), "
              << parsed.diagnostics.warnings().size() << " warning(s))\n";
    return errors == 0 ? 0 : kExitConfig;
}

int cmd_poles(const SourceArgs& args) {
    const RunReport report = execute(args, std::vector<OutputKind>{OutputKind::poles});
    json all = json::array();
    for (const EmittedFile& f : report.files) {
        std::ifstream in(report.manifest_path.parent_path() / f.path);
        for (auto& item : json::parse(in)) all.push_back(item);
    }
    std::cout << all.dump(2) << "\n";
    return 0;
}

int cmd_oracle(const SourceArgs& args) {
    const RunReport report = execute(args, std::vector<OutputKind>{OutputKind::oracle_compare});
    bool all_pass = true;
    for (const OracleVerdict& v : report.oracle) {
        std::cout << "n=" << v.n << (v.label.empty() ? "" : " " + v.label)
                  << " max_diff=" << v.max_diff << " norm_drift=" << v.max_norm_drift << " "
                  << (v.pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && v.pass;
    }
    return all_pass ? 0 : kExitOther;
}

struct DesignArgs {
    double omega_e_target = 0.0;
    bool target_in_pi = false;
    double tau = 1.0;
    long long q_plus = -1;
    long long q_minus = -1;
    long long q_diff = 0;
    std::string out;
};

int cmd_design(const DesignArgs& a) {
    const double target = a.target_in_pi ? a.omega_e_target * kPi : a.omega_e_target;
    DoubleBicDesign d;
    try {
        if (a.q_diff > 0) {
            d = design_double_bic_near(target, a.tau, a.q_diff);
        } else if (a.q_plus >= 0 && a.q_minus >= 0) {
            d = design_double_bic(target, a.tau, a.q_plus, a.q_minus);
        } else {
            throw ConfigError("--q-plus", "give --q-plus and --q-minus, or --q-diff");
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError("--q-plus", e.what());
    }
    // Check the design against the pole conditions at Γ = γ = 1, v = 1, δ = 0.
    SystemParams p;
    p.omega_e = d.omega_e;
    p.g = d.g_n;
    p.omega_c = d.omega_e;
    p.d = a.tau;
    const CouplingSpec c = couplings_for_rates(1.0, 1.0, 1.0);
    p.j1_mag = c.j1_mag;
    p.j2_mag = c.j2_mag;
    p.phi1 = c.phi1;
    p.phi2 = c.phi2;
    const BicSearch search = find_bics(p, 0);
    bool verified = search.solutions.size() == 2;
    for (const BicSolution& s : search.solutions) {
        verified = verified && s.q == (s.branch == Branch::plus ? d.q_plus : d.q_minus);
    }
    const json out = {
        {"omega_e", d.omega_e},     {"omega_e_pi", d.omega_e / kPi}, {"g_n", d.g_n},
        {"g_n_pi", d.g_n / kPi},    {"q_plus", d.q_plus},            {"q_minus", d.q_minus},
        {"tau", a.tau},             {"target_offset", d.target_offset},
        {"verified", verified},
    };
    std::cout << out.dump(2) << "\n";
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        std::ofstream(fs::path(a.out) / "design.json") << out.dump(2) << "\n";
    }
    return verified ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Giant-atom waveguide/cavity simulator"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    SourceArgs simulate_args, poles_args, field_args, oracle_args, validate_args;
    DesignArgs design_args;

    auto* simulate = app.add_subcommand("simulate", "run every output listed in the scenario");
    add_source_flags(simulate, simulate_args, true);
    auto* poles = app.add_subcommand("poles", "bound-state poles of each subspace (JSON)");
    add_source_flags(poles, poles_args, true);
    auto* field = app.add_subcommand("field-map", "emitted intensity on a spacetime grid (CSV)");
    add_source_flags(field, field_args, true);
    auto* oracle = app.add_subcommand("oracle-compare", "DDE against the discretised-mode oracle");
    add_source_flags(oracle, oracle_args, true);
    auto* validate = app.add_subcommand("validate", "report every problem in a scenario config");
    add_source_flags(validate, validate_args, false);

    auto* design = app.add_subcommand("design-bic", "parameters hosting two trapped dressed states");
    design->add_option("--omega-e-target", design_args.omega_e_target, "desired omega_e")->required();
    design->add_flag("--in-pi", design_args.target_in_pi, "target is given in multiples of pi");
    design->add_option("--tau", design_args.tau, "delay d/v")->check(CLI::PositiveNumber);
    design->add_option("--q-plus", design_args.q_plus, "winding integer of the + branch");
    design->add_option("--q-minus", design_args.q_minus, "winding integer of the - branch");
    design->add_option("--q-diff", design_args.q_diff, "q_plus - q_minus; integers chosen near the target");
    design->add_option("--out", design_args.out, "directory for design.json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) {
            execute(simulate_args, std::nullopt);
            return 0;
        }
        if (*poles) return cmd_poles(poles_args);
        if (*field) {
            execute(field_args, std::vector<OutputKind>{OutputKind::field_map});
            return 0;
        }
        if (*oracle) return cmd_oracle(oracle_args);
        if (*validate) return cmd_validate(validate_args);
        if (*design) return cmd_design(design_args);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure in " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
