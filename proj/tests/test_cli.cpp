#include <catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args) {
    const std::string cmd = std::string(GIANTBIC_CLI) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::fgets(buf, sizeof(buf), pipe)) out += buf;
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("giantbic_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("validate subcommand") {
    const Result ok = run("validate --preset fig3-doublebic");
    CHECK(ok.code == 0);
    CHECK(ok.out.find("valid") != std::string::npos);

    const fs::path dir = scratch("validate");
    std::ofstream(dir / "bad.json") << R"({"name": "bad", "units": "natural",
        "params": {"omega_e": 100, "gamma_total": 1, "gamma_coll": 2, "v": 0, "d": 1},
        "horizon": 5, "outputs": ["poles"]})";
    const Result bad = run("validate --config " + (dir / "bad.json").string());
    CHECK(bad.code == 2);
    CHECK(bad.out.find("params.v") != std::string::npos);
    CHECK(bad.out.find("Gamma >= gamma") != std::string::npos);
}

TEST_CASE("simulate writes the run directory") {
    const fs::path out = scratch("simulate") / "run";
    const Result r = run("simulate --preset fig2-pointlike --workers 2 --out " + out.string());
    CHECK(r.code == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "trajectory_n0_g0.25.csv"));
}

TEST_CASE("schema violations exit with 2 and name the key") {
    const fs::path dir = scratch("schema");
    std::ofstream(dir / "c.json") << R"({"name": "x", "units": "natural", "horizon": 1, "outputs": [],
        "params": {"omega_e": 100, "gamma_total": 1, "gamma_coll": 1, "v": 1, "d": -1}})";
    const Result r = run("simulate --config " + (dir / "c.json").string() + " --out " + (dir / "o").string());
    CHECK(r.code == 2);
    CHECK(r.out.find("params.d") != std::string::npos);
    CHECK(run("simulate --preset does-not-exist").code == 2);
    CHECK(run("simulate --config " + (dir / "missing.json").string()).code == 2);
}

TEST_CASE("numerical failures exit with 3 and name the module") {
    const fs::path dir = scratch("numerical");
    std::ofstream(dir / "c.json") << R"({"name": "x", "units": "natural", "horizon": 1, "outputs": ["trajectory"],
        "params": {"omega_e": 100, "g": 500, "gamma_total": 1, "gamma_coll": 1, "v": 1, "d": 1}})";
    const Result r = run("simulate --config " + (dir / "c.json").string() + " --out " + (dir / "o").string());
    CHECK(r.code == 3);
    CHECK(r.out.find("dde-engine") != std::string::npos);
}

TEST_CASE("poles subcommand prints the pole list") {
    const fs::path out = scratch("poles");
    const Result r = run("poles --preset joint-subspaces --out " + out.string());
    REQUIRE(r.code == 0);
    const auto json_start = r.out.find('[');
    REQUIRE(json_start != std::string::npos);
    const nlohmann::json poles = nlohmann::json::parse(r.out.substr(json_start));
    CHECK(poles.size() == 4);
    CHECK(fs::exists(out / "poles_n8.json"));
}

TEST_CASE("design-bic subcommand") {
    const Result r = run("design-bic --omega-e-target 202 --in-pi --tau 1 --q-plus 101 --q-minus 100");
    REQUIRE(r.code == 0);
    const nlohmann::json d = nlohmann::json::parse(r.out);
    CHECK(d["omega_e_pi"].get<double>() == Catch::Approx(202));
    CHECK(d["g_n_pi"].get<double>() == Catch::Approx(1));
    CHECK(d["verified"] == true);
    CHECK(run("design-bic --omega-e-target 10 --q-plus 1 --q-minus 3").code == 2);
}

TEST_CASE("field-map and oracle-compare subcommands") {
    const fs::path dir = scratch("fieldmap");
    std::ofstream(dir / "c.json") << R"({"name": "small", "units": "natural, v=1, Gamma=1", "horizon": 2,
        "outputs": [], "params": {"omega_e_pi": 20, "g_pi": 1, "gamma_total": 1, "gamma_coll": 1, "v": 1, "d": 1},
        "field_grid": {"x_min": -1, "x_max": 1, "nx": 5, "t_max": 2, "nt": 3},
        "oracle": {"K": 256, "horizon": 1}})";
    const Result f = run("field-map --config " + (dir / "c.json").string() + " --out " + (dir / "f").string());
    CHECK(f.code == 0);
    CHECK(fs::exists(dir / "f" / "field_n0.csv"));
    CHECK(fs::exists(dir / "f" / "field_n0.json"));
    const Result o = run("oracle-compare --config " + (dir / "c.json").string() + " --out " + (dir / "o").string());
    CHECK((o.code == 0 || o.code == 1));
    CHECK(o.out.find("max_diff=") != std::string::npos);
    CHECK(fs::exists(dir / "o" / "oracle_n0.json"));
}
