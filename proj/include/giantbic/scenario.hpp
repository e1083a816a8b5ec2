// scenario.hpp: configuration ingestion, presets and run-directory emission.
//
// A scenario names one parameter set (optionally swept over a single params
// key), the subspaces to simulate and the outputs to produce. Every
// (sweep point, subspace, output) triple is an independent job; jobs run on a
// bounded pool and the manifest is written once all of them finished.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "giantbic/core_model.hpp"
#include "giantbic/dde_engine.hpp"
#include "giantbic/field.hpp"

namespace giantbic {

[[nodiscard]] const char* version();

enum class OutputKind { trajectory, poles, field_map, oracle_compare };

[[nodiscard]] const char* to_string(OutputKind kind);
[[nodiscard]] std::optional<OutputKind> parse_output_kind(const std::string& name);

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    std::string key;  ///< dotted path into the config, e.g. "params.v"
    std::string message;
};

struct Diagnostics {
    std::vector<Diagnostic> items;

    void error(std::string key, std::string message);
    void warning(std::string key, std::string message);
    [[nodiscard]] bool ok() const;
    [[nodiscard]] std::size_t error_count() const;
    [[nodiscard]] std::vector<const Diagnostic*> errors() const;
    [[nodiscard]] std::vector<const Diagnostic*> warnings() const;
    /// One line per diagnostic: "error: params.v: must be > 0".
    [[nodiscard]] std::string format() const;
};

/// One parameter set of the scenario. Without a sweep there is exactly one,
/// with an empty label.
struct SweepPoint {
    std::string label;  ///< e.g. "g0.125", used in file names
    double value = 0.0;
    SystemParams params;
};

struct OracleSettings {
    int K = 8192;
    double k_max = 0.0;       ///< 0 selects ModeGrid::defaults
    double horizon = 20.0;    ///< compared window [0, horizon]
    double tolerance = 5e-3;  ///< pass threshold on max |P_dde − P_oracle|
    double max_norm_drift = 1e-6;
};

struct Scenario {
    std::string name;
    std::string units;
    std::vector<SweepPoint> points;
    std::string sweep_key;  ///< empty without a sweep
    std::vector<int> subspaces;
    InitialCondition init;
    double horizon = 0.0;
    bool point_like = false;
    IntegratorOptions integrator;
    std::vector<OutputKind> outputs;
    std::optional<SpacetimeGrid> field_grid;
    OracleSettings oracle;
    nlohmann::json source;  ///< the config as read
    std::vector<std::string> validation_warnings;

    [[nodiscard]] SpacetimeGrid field_grid_for(const SystemParams& p) const;
};

struct ParseResult {
    std::optional<Scenario> scenario;  ///< present iff diagnostics.ok()
    Diagnostics diagnostics;
};

/// Checks the whole config and reports every violation, not just the first.
[[nodiscard]] ParseResult parse_scenario(const nlohmann::json& config);

/// Reads a JSON file; syntax errors are reported as a diagnostic on key "<file>".
[[nodiscard]] ParseResult parse_scenario_file(const std::filesystem::path& path);

/// parse_scenario_file that throws ConfigError naming the first offending key.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path& path);

/// Directory holding the shipped presets (compiled-in default).
[[nodiscard]] std::filesystem::path default_preset_dir();
/// <dir>/<name>.json; throws ConfigError("preset") when it does not exist.
[[nodiscard]] std::filesystem::path preset_path(const std::string& name,
                                                const std::filesystem::path& dir = {});
[[nodiscard]] std::vector<std::string> list_presets(const std::filesystem::path& dir = {});
[[nodiscard]] Scenario load_preset(const std::string& name, const std::filesystem::path& dir = {});

struct RunOptions {
    std::filesystem::path out_dir;
    int workers = 1;
    /// Replaces the scenario's own output list when set.
    std::optional<std::vector<OutputKind>> outputs;
};

struct EmittedFile {
    std::string path;  ///< relative to the run directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct OracleVerdict {
    std::string label;
    int n = 0;
    double max_diff = 0.0;
    double max_norm_drift = 0.0;
    bool pass = false;
};

struct RunReport {
    std::vector<EmittedFile> files;  ///< sorted by path, manifest excluded
    std::vector<std::string> warnings;
    std::vector<OracleVerdict> oracle;
    std::filesystem::path manifest_path;
};

/// Executes every requested output and writes the run directory. Output is
/// byte-identical for identical scenarios regardless of `workers`. Errors
/// from the engines propagate (NumericalError names the module).
RunReport run_scenario(const Scenario& scenario, const RunOptions& options);

/// Lower-case hex SHA-256.
[[nodiscard]] std::string sha256_hex(const std::string& data);

/// JSON form of SystemParams and its derived rates, as written to manifests and sidecars.
[[nodiscard]] nlohmann::json params_json(const SystemParams& p);

}  // namespace giantbic
