#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "hessquot/app.hpp"

using namespace hessquot;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("hessquot_cli_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
    static inline int counter = 0;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string write_config(const TempDir& dir, json cfg) {
    cfg["out"] = json{{"grid", dir.file("u.csv")}, {"report", dir.file("report.json")}};
    const std::string path = dir.file("config.json");
    std::ofstream(path) << cfg.dump();
    return path;
}

json quadratic_manufactured() {
    return json{{"version", 1},
                {"mode", "manufactured"},
                {"n", 3},
                {"k", 3},
                {"l", 1},
                {"tau", 1.0},
                {"domain", {{"lo", {0, 0, 0}}, {"hi", {1, 1, 1}}, {"resolution", 7}}},
                {"ustar", "0.5*(x1^2+x2^2+x3^2)"},
                {"subsolution", "0.5*(x1^2+x2^2+x3^2)-0.3*x1*(1-x1)*x2*(1-x2)*x3*(1-x3)"}};
}

json monge_ampere_solve() {
    return json{{"version", 1},
                {"n", 2},
                {"k", 2},
                {"l", 0},
                {"domain", {{"lo", {-1, -1}}, {"hi", {1, 1}}, {"resolution", 9}}},
                {"psi", "exp(u-0.5*(x1^2+x2^2))"},
                {"phi", "0.5*(x1^2+x2^2)"},
                {"subsolution", "0.5*(x1^2+x2^2)-0.05*(x1^2-1)*(x2^2-1)"},
                {"seed", 3}};
}

int run(std::vector<std::string> args) {
    args.push_back("--quiet");
    return app::run(args);
}

}  // namespace

TEST_CASE("manufactured quadratic exits 0") {
    TempDir dir;
    const std::string cfg = write_config(dir, quadratic_manufactured());
    REQUIRE(run({"--config", cfg}) == app::kExitOk);
    const json rep = json::parse(slurp(dir.file("report.json")));
    for (const char* key : {"spec", "stages", "diagnostics", "converged", "versions", "warnings", "notes", "wall_time"})
        CHECK(rep.contains(key));
    CHECK(rep["converged"] == true);
    CHECK(rep["stages"].back()["final_residual_inf"].get<double>() <= 1e-9);
    CHECK(rep["stages"].back()["t"].get<double>() == 1.0);
    CHECK(rep["manufactured"]["max_error"].get<double>() <= 1e-8);
    CHECK(rep["diagnostics"]["max_principle"]["ok"] == true);

    const std::string csv = slurp(dir.file("u.csv"));
    CHECK(csv.rfind("i,j,k,x1,x2,x3,u\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 7 * 7 * 7);
    for (const auto& entry : fs::directory_iterator(dir.path))
        CHECK(entry.path().string().find(".tmp.") == std::string::npos);
}

TEST_CASE("solve mode and overrides") {
    TempDir dir;
    const std::string cfg = write_config(dir, monge_ampere_solve());
    CHECK(run({"--config", cfg, "--resolution", "11", "--tol", "1e-10", "--t-step", "0.2"}) == app::kExitOk);
    const json rep = json::parse(slurp(dir.file("report.json")));
    CHECK(rep["spec"]["domain"]["resolution"] == 11);
    CHECK(rep["spec"]["newton"]["tol"].get<double>() == 1e-10);
    CHECK(rep["spec"]["homotopy"]["dt"].get<double>() == 0.2);
    CHECK_FALSE(rep["notes"].empty());
    CHECK(rep["warnings"].empty());

    CHECK(run({"--config", cfg, "--out", dir.file("alt")}) == app::kExitOk);
    CHECK(fs::exists(dir.file("alt.csv")));
    CHECK(fs::exists(dir.file("alt.json")));
}

TEST_CASE("determinism") {
    TempDir dir;
    const std::string cfg = write_config(dir, monge_ampere_solve());
    REQUIRE(run({"--config", cfg, "--out", dir.file("a")}) == app::kExitOk);
    REQUIRE(run({"--config", cfg, "--out", dir.file("b")}) == app::kExitOk);
    CHECK(slurp(dir.file("a.csv")) == slurp(dir.file("b.csv")));
    json a = json::parse(slurp(dir.file("a.json"))), b = json::parse(slurp(dir.file("b.json")));
    a.erase("wall_time");
    b.erase("wall_time");
    CHECK(a == b);
}

TEST_CASE("warnings exit 2") {
    TempDir dir;
    json c = monge_ampere_solve();
    c["psi"] = "1";
    c["subsolution"] = c["phi"];
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitWarnings);
    const json rep = json::parse(slurp(dir.file("report.json")));
    CHECK_FALSE(rep["warnings"].empty());
    CHECK(rep["diagnostics"]["comparison"]["skipped"] == true);
}

TEST_CASE("solver failure exits 1 and still writes a valid report") {
    TempDir dir;
    json c = monge_ampere_solve();
    c["newton"] = {{"tol", 1e-30}, {"max_iters", 1}};
    c["homotopy"] = {{"dt", 0.1}, {"dt_min", 0.05}};
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitFailure);
    const json rep = json::parse(slurp(dir.file("report.json")));
    CHECK(rep["converged"] == false);
    CHECK(rep["error"]["kind"] == "homotopy-stall");
    CHECK(rep["error"].contains("cause"));
    CHECK(fs::exists(dir.file("u.csv")));
}

TEST_CASE("config and parse errors exit 64") {
    TempDir dir;
    json c = monge_ampere_solve();
    c["psi"] = "1 + * u";
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);
    CHECK_FALSE(fs::exists(dir.file("report.json")));

    c = monge_ampere_solve();
    c["psi"] = "exp(q)";
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);

    c = monge_ampere_solve();
    c.erase("version");
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);

    c = monge_ampere_solve();
    c["colour"] = "blue";
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);

    c = monge_ampere_solve();
    c["k"] = 1;
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);

    c = monge_ampere_solve();
    c["subsolution"] = "0.5*(x1^2+x2^2)+0.3";
    CHECK(run({"--config", write_config(dir, c)}) == app::kExitConfig);

    c = monge_ampere_solve();
    const std::string path = write_config(dir, c);
    CHECK(run({"--config", path, "--mode", "bogus"}) == app::kExitConfig);
    CHECK(run({"--config", path, "--out", dir.file("missing/dir/x")}) == app::kExitConfig);
    CHECK(run({"--config", dir.file("nope.json")}) == app::kExitConfig);
    CHECK(run({"--no-such-flag"}) == app::kExitConfig);
    CHECK(run({}) == app::kExitConfig);

    std::ofstream(dir.file("broken.json")) << "{\"version\": 1,";
    CHECK(run({"--config", dir.file("broken.json")}) == app::kExitConfig);
}

TEST_CASE("config parsing") {
    const app::Config c = app::parse_config(R"({"version": 1, "n": 2, "k": 2, "l": 0, "psi": "1", "phi": "x1",
                                                "verbosity": "debug", "homotopy": {"dt": 0.2}})");
    CHECK(c.mode == app::Mode::Solve);
    CHECK(c.lo == std::vector<double>{0, 0});
    CHECK(c.hi == std::vector<double>{1, 1});
    CHECK(c.verbosity == 2);
    CHECK(c.homotopy.dt_init == 0.2);
    CHECK(c.homotopy.dt_min == 1e-4);
    CHECK_THROWS_AS(app::parse_config(R"({"version": 2})"), ConfigError);
    CHECK_THROWS_AS(app::parse_config(R"({"version": 1, "n": "3"})"), ConfigError);
}
