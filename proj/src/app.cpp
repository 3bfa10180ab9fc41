#include "hessquot/app.hpp"

#include <unistd.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "hessquot/solver.hpp"
#include "hessquot/verify.hpp"

namespace hessquot::app {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "1.0.0";

const char* mode_name(Mode m) {
    switch (m) {
        case Mode::Solve: return "solve";
        case Mode::Manufactured: return "manufactured";
        case Mode::Selftest: return "selftest";
    }
    return "?";
}

Mode parse_mode(const std::string& s) {
    if (s == "solve") return Mode::Solve;
    if (s == "manufactured") return Mode::Manufactured;
    if (s == "selftest") return Mode::Selftest;
    throw ConfigError("unknown mode '" + s + "' (expected solve, manufactured or selftest)");
}

// ------------------------------------------------------------ config reading

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
    return obj.at(key);
}

void only_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw ConfigError(where + ": unknown field '" + item.key() + "'");
}

int as_int(const json& v, const std::string& name) {
    if (!v.is_number_integer()) throw ConfigError("field '" + name + "' must be an integer");
    return v.get<int>();
}

double as_double(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError("field '" + name + "' must be a number");
    return v.get<double>();
}

std::string as_string(const json& v, const std::string& name) {
    if (!v.is_string()) throw ConfigError("field '" + name + "' must be a string");
    return v.get<std::string>();
}

std::vector<double> as_vector(const json& v, const std::string& name) {
    if (!v.is_array()) throw ConfigError("field '" + name + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_double(e, name));
    return out;
}

int parse_verbosity(const std::string& s) {
    if (s == "0" || s == "quiet") return 0;
    if (s == "1" || s == "info") return 1;
    if (s == "2" || s == "debug") return 2;
    throw ConfigError("verbosity '" + s + "' not recognized (expected 0/1/2 or quiet/info/debug)");
}

void check_writable(const std::string& path, const char* what) {
    if (path.empty()) return;
    const std::filesystem::path p(path);
    const std::filesystem::path dir = p.has_parent_path() ? p.parent_path() : std::filesystem::path(".");
    if (!std::filesystem::is_directory(dir))
        throw ConfigError(std::string(what) + " path '" + path + "': directory does not exist");
    if (::access(dir.c_str(), W_OK) != 0)
        throw ConfigError(std::string(what) + " path '" + path + "': directory is not writable");
    if (std::filesystem::is_directory(p)) throw ConfigError(std::string(what) + " path '" + path + "' is a directory");
}

void validate_config(const Config& cfg) {
    if (cfg.mode == Mode::Selftest) {
        check_writable(cfg.out_report, "report");
        return;
    }
    if (cfg.n != 2 && cfg.n != 3) throw ConfigError("n must be 2 or 3");
    if (static_cast<int>(cfg.lo.size()) != cfg.n || static_cast<int>(cfg.hi.size()) != cfg.n)
        throw ConfigError("domain.lo and domain.hi need exactly n entries");
    if (cfg.resolution < 5) throw ConfigError("domain.resolution must be >= 5");
    if (!(cfg.newton.tol_residual > 0.0) || cfg.newton.max_iters < 1)
        throw ConfigError("newton.tol must be > 0 and newton.max_iters >= 1");
    if (!(cfg.homotopy.dt_init > 0.0) || !(cfg.homotopy.dt_min > 0.0) || cfg.homotopy.dt_min > cfg.homotopy.dt_init)
        throw ConfigError("homotopy needs 0 < dt_min <= dt");
    if (cfg.mode == Mode::Solve && (cfg.psi.empty() || cfg.phi.empty()))
        throw ConfigError("solve mode needs 'psi' and 'phi'");
    if (cfg.mode == Mode::Manufactured && !cfg.ustar) throw ConfigError("manufactured mode needs 'ustar'");
    if (cfg.mode == Mode::Manufactured && (!cfg.psi.empty() || !cfg.phi.empty()))
        throw ConfigError("manufactured mode derives psi and phi from 'ustar'; remove them");
    check_writable(cfg.out_grid, "grid");
    check_writable(cfg.out_report, "report");
}

expr::Expr parse_field(const std::string& field, const std::string& text, int n) {
    try {
        return expr::parse(text, n);
    } catch (const ParseError& e) {
        throw FieldParseError(field, e);
    }
}

// ------------------------------------------------------------------ output

void write_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot open '" + tmp + "' for writing");
        out << content;
        out.flush();
        if (!out) throw ConfigError("write to '" + tmp + "' failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
    }
}

std::string grid_csv(const GridFunction& u) {
    const Grid& g = u.grid;
    const int n = g.dim();
    std::string out = n == 2 ? "i,j,x1,x2,u\n" : "i,j,k,x1,x2,x3,u\n";
    char buf[64];
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const Index idx = g.multi(node);
        const Point x = g.coords(node);
        for (int a = 0; a < n; ++a) out += std::to_string(idx[a]) + ",";
        for (int a = 0; a < n; ++a) {
            std::snprintf(buf, sizeof buf, "%.17g,", x[a]);
            out += buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", u[node]);
        out += buf;
    }
    return out;
}

json node_json(const Grid& g, std::size_t node) {
    json idx = json::array();
    const Index i = g.multi(node);
    for (int a = 0; a < g.dim(); ++a) idx.push_back(i[a]);
    return idx;
}

json check_json(const DiagnosticCheck& c, const Grid& g) {
    return json{{"ok", c.ok}, {"skipped", c.skipped}, {"value", c.value}, {"node", node_json(g, c.node)}};
}

json diagnostics_json(const DiagnosticsReport& d, const Grid& g) {
    return json{{"max_principle", check_json(d.max_principle, g)},
                {"comparison", check_json(d.comparison, g)},
                {"admissibility", check_json(d.admissibility, g)},
                {"laplacian", check_json(d.laplacian, g)},
                {"psi_positive", check_json(d.psi_positive, g)},
                {"psi_z_positive", check_json(d.psi_z_positive, g)},
                {"all_ok", d.all_ok()}};
}

json versions_json() {
    return json{{"hessquot", kVersion},
                {"report_schema", 1},
                {"linear_solver", linear_backend_version()},
                {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                             std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                             std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

json spec_json(const Config& cfg) {
    json s{{"mode", mode_name(cfg.mode)}, {"seed", cfg.seed}};
    if (cfg.mode == Mode::Selftest) return s;
    s["n"] = cfg.n;
    s["k"] = cfg.k;
    s["l"] = cfg.l;
    s["tau"] = cfg.tau;
    s["domain"] = json{{"lo", cfg.lo}, {"hi", cfg.hi}, {"resolution", cfg.resolution}};
    if (!cfg.psi.empty()) s["psi"] = cfg.psi;
    if (!cfg.phi.empty()) s["phi"] = cfg.phi;
    if (cfg.subsolution) s["subsolution"] = *cfg.subsolution;
    if (cfg.ustar) s["ustar"] = *cfg.ustar;
    s["newton"] = json{{"tol", cfg.newton.tol_residual}, {"max_iters", cfg.newton.max_iters}};
    s["homotopy"] = json{{"dt", cfg.homotopy.dt_init}, {"dt_min", cfg.homotopy.dt_min}};
    return s;
}

json error_json(const std::exception& e, const Grid* grid) {
    json err{{"message", e.what()}};
    const auto* base = dynamic_cast<const Error*>(&e);
    err["kind"] = base ? base->kind() : "internal-error";
    if (const auto* f = dynamic_cast<const FieldParseError*>(&e)) {
        err["field"] = f->field();
        err["offset"] = f->offset();
        if (!f->expected().empty()) err["expected"] = f->expected();
    } else if (const auto* p = dynamic_cast<const ParseError*>(&e)) {
        err["offset"] = p->offset();
        if (!p->expected().empty()) err["expected"] = p->expected();
    }
    if (const auto* na = dynamic_cast<const NotAdmissible*>(&e)) {
        err["eigenvalues"] = na->eigenvalues();
        err["failing_sigma"] = na->failing_sigma();
        if (na->node() && grid) err["node"] = node_json(*grid, *na->node());
    }
    if (const auto* d = dynamic_cast<const DomainFault*>(&e)) {
        err["subexpression"] = d->subexpression();
        err["value"] = d->value();
    }
    if (const auto* s = dynamic_cast<const SolveError*>(&e)) {
        if (!s->cause().empty()) err["cause"] = s->cause();
    }
    return err;
}

void emit_error(const std::exception& e, const Grid* grid) {
    std::fprintf(stderr, "hessquot: error: %s\n", e.what());
    std::fprintf(stderr, "%s\n", json{{"error", error_json(e, grid)}}.dump().c_str());
}

json stages_json(const SolveReport& r) {
    json stages = json::array();
    for (const StageRecord& s : r.stages)
        stages.push_back(json{{"t", s.t},
                              {"newton_iters", s.newton_iters},
                              {"final_residual_inf", s.final_residual_inf},
                              {"min_admissibility_margin", s.min_admissibility_margin}});
    return stages;
}

json report_json(const Config& cfg, const SolveReport& r, const Grid& g, bool with_diagnostics) {
    json rep{{"spec", spec_json(cfg)},
             {"stages", stages_json(r)},
             {"converged", r.converged},
             {"versions", versions_json()},
             {"warnings", r.warnings},
             {"notes", r.notes},
             {"rejected_stages", r.rejected_stages},
             {"wall_time", r.wall_time},
             {"error", nullptr}};
    rep["diagnostics"] = with_diagnostics ? diagnostics_json(r.diagnostics, g) : json(nullptr);
    return rep;
}

struct Logger {
    int verbosity = 1;

    void info(const std::string& line) const {
        if (verbosity >= 1) std::fprintf(stderr, "%s\n", line.c_str());
    }
    void debug(const std::string& line) const {
        if (verbosity >= 2) std::fprintf(stderr, "%s\n", line.c_str());
    }
};

// ------------------------------------------------------------------- modes

int run_selftest(const Config& cfg, const Logger& log) {
    const auto started = std::chrono::steady_clock::now();
    const std::uint64_t seed = cfg.seed;
    std::vector<verify::CheckResult> results;
    auto add = [&](verify::CheckResult r) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s: %zu cases, %zu failures, %.2f s", r.passed ? "PASS" : "FAIL", r.cases,
                      r.failures, r.seconds);
        log.info(std::string(buf) + " - " + r.name + (r.detail.empty() ? "" : " (" + r.detail + ")"));
        results.push_back(std::move(r));
    };
    add(verify::check_sigma_oracle(1000, seed + 1));
    add(verify::check_sigma_properties(10000, seed + 2));
    add(verify::check_newton_maclaurin(10000, seed + 3));
    for (auto& r : verify::check_derivative_oracles(100, seed + 4)) add(std::move(r));
    add(verify::check_ellipticity_concavity(1000, seed + 5));
    add(verify::check_divided_difference(100, seed + 6));

    bool ok = true;
    json checks = json::array();
    for (const auto& r : results) {
        ok = ok && r.passed;
        checks.push_back(json{{"name", r.name},
                              {"passed", r.passed},
                              {"cases", r.cases},
                              {"failures", r.failures},
                              {"worst", r.worst},
                              {"detail", r.detail},
                              {"seconds", r.seconds}});
    }
    if (!cfg.out_report.empty()) {
        json rep{{"spec", spec_json(cfg)},
                 {"checks", checks},
                 {"passed", ok},
                 {"versions", versions_json()},
                 {"wall_time", std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()}};
        write_atomic(cfg.out_report, rep.dump(2) + "\n");
    }
    return ok ? kExitOk : kExitFailure;
}

int run_solve(const Config& cfg, const Logger& log) {
    ProblemSpec prob;
    std::optional<GridFunction> exact;
    try {
        if (cfg.mode == Mode::Manufactured) {
            const Grid grid = Grid::make(cfg.n, cfg.lo, cfg.hi, cfg.resolution);
            auto m = verify::manufactured_problem(parse_field("ustar", *cfg.ustar, cfg.n), grid,
                                                  QuotientSpec::make(cfg.n, cfg.k, cfg.l, cfg.tau));
            prob = std::move(m.problem);
            exact = std::move(m.exact);
            if (cfg.subsolution) prob.subsolution = parse_field("subsolution", *cfg.subsolution, cfg.n);
            prob.newton = cfg.newton;
            prob.homotopy = cfg.homotopy;
        } else {
            prob = build_problem(cfg);
        }
        const ProblemCheck check = check_problem(prob);
        for (const auto& w : check.warnings) log.info("warning: " + w);
        for (const auto& note : check.notes) log.debug("note: " + note);
    } catch (const Error& e) {
        emit_error(e, prob.grid.node_count() ? &prob.grid : nullptr);
        return kExitConfig;
    }

    const IterationObserver observer = [&](const IterationEvent& ev) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "t=%.6f iter=%d residual_inf=%.6e step=%.6g min_margin=%.6e", ev.t, ev.iter,
                      ev.residual_inf, ev.step, ev.min_margin);
        log.info(buf);
    };

    try {
        auto [u, report] = solve_dirichlet(prob, observer);
        json rep = report_json(cfg, report, prob.grid, true);
        if (exact) {
            double err = 0.0;
            for (std::size_t i = 0; i < u.values.size(); ++i) err = std::max(err, std::abs(u[i] - (*exact)[i]));
            rep["manufactured"] = json{{"max_error", err}};
        }
        if (!cfg.out_grid.empty()) write_atomic(cfg.out_grid, grid_csv(u));
        if (!cfg.out_report.empty()) write_atomic(cfg.out_report, rep.dump(2) + "\n");
        const bool clean = report.diagnostics.all_ok() && report.warnings.empty();
        log.debug(std::string("solve finished: ") + (clean ? "all diagnostics passed" : "diagnostic warnings"));
        if (!report.diagnostics.all_ok()) log.info("warning: one or more diagnostics failed; see the report");
        return clean ? kExitOk : kExitWarnings;
    } catch (const SolveError& e) {
        emit_error(e, &prob.grid);
        json rep = report_json(cfg, e.report(), prob.grid, false);
        rep["error"] = error_json(e, &prob.grid);
        try {
            if (!cfg.out_grid.empty()) write_atomic(cfg.out_grid, grid_csv(e.last_iterate()));
            if (!cfg.out_report.empty()) write_atomic(cfg.out_report, rep.dump(2) + "\n");
        } catch (const Error& w) {
            emit_error(w, nullptr);
        }
        return kExitFailure;
    } catch (const ConfigError& e) {
        emit_error(e, nullptr);
        return kExitConfig;
    } catch (const Error& e) {
        emit_error(e, &prob.grid);
        SolveReport empty;
        json rep = report_json(cfg, empty, prob.grid, false);
        rep["error"] = error_json(e, &prob.grid);
        try {
            if (!cfg.out_report.empty()) write_atomic(cfg.out_report, rep.dump(2) + "\n");
        } catch (const Error& w) {
            emit_error(w, nullptr);
        }
        return kExitFailure;
    }
}

}  // namespace

Config parse_config(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    only_keys(j,
              {"version", "mode", "n", "k", "l", "tau", "domain", "psi", "phi", "subsolution", "ustar", "newton",
               "homotopy", "out", "seed", "verbosity"},
              origin);

    Config cfg;
    cfg.version = as_int(require(j, "version", origin), "version");
    if (cfg.version != 1) throw ConfigError(origin + ": unsupported config version " + std::to_string(cfg.version));
    if (j.contains("mode")) cfg.mode = parse_mode(as_string(j["mode"], "mode"));
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) throw ConfigError("field 'seed' must be a non-negative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("verbosity")) {
        const json& v = j["verbosity"];
        cfg.verbosity = v.is_string() ? parse_verbosity(v.get<std::string>()) : as_int(v, "verbosity");
        if (cfg.verbosity < 0 || cfg.verbosity > 2) throw ConfigError("field 'verbosity' must be 0, 1 or 2");
    }
    if (j.contains("out")) {
        only_keys(j["out"], {"grid", "report"}, "out");
        if (j["out"].contains("grid")) cfg.out_grid = as_string(j["out"]["grid"], "out.grid");
        if (j["out"].contains("report")) cfg.out_report = as_string(j["out"]["report"], "out.report");
    }
    if (cfg.mode == Mode::Selftest) return cfg;

    cfg.n = as_int(require(j, "n", origin), "n");
    cfg.k = as_int(require(j, "k", origin), "k");
    cfg.l = as_int(require(j, "l", origin), "l");
    if (j.contains("tau")) cfg.tau = as_double(j["tau"], "tau");
    cfg.lo.assign(static_cast<std::size_t>(std::max(cfg.n, 0)), 0.0);
    cfg.hi.assign(static_cast<std::size_t>(std::max(cfg.n, 0)), 1.0);
    if (j.contains("domain")) {
        const json& d = j["domain"];
        only_keys(d, {"lo", "hi", "resolution"}, "domain");
        if (d.contains("lo")) cfg.lo = as_vector(d["lo"], "domain.lo");
        if (d.contains("hi")) cfg.hi = as_vector(d["hi"], "domain.hi");
        if (d.contains("resolution")) cfg.resolution = as_int(d["resolution"], "domain.resolution");
    }
    if (j.contains("psi")) cfg.psi = as_string(j["psi"], "psi");
    if (j.contains("phi")) cfg.phi = as_string(j["phi"], "phi");
    if (j.contains("subsolution")) cfg.subsolution = as_string(j["subsolution"], "subsolution");
    if (j.contains("ustar")) cfg.ustar = as_string(j["ustar"], "ustar");
    if (j.contains("newton")) {
        only_keys(j["newton"], {"tol", "max_iters"}, "newton");
        if (j["newton"].contains("tol")) cfg.newton.tol_residual = as_double(j["newton"]["tol"], "newton.tol");
        if (j["newton"].contains("max_iters"))
            cfg.newton.max_iters = as_int(j["newton"]["max_iters"], "newton.max_iters");
    }
    if (j.contains("homotopy")) {
        only_keys(j["homotopy"], {"dt", "dt_min"}, "homotopy");
        if (j["homotopy"].contains("dt")) cfg.homotopy.dt_init = as_double(j["homotopy"]["dt"], "homotopy.dt");
        if (j["homotopy"].contains("dt_min"))
            cfg.homotopy.dt_min = as_double(j["homotopy"]["dt_min"], "homotopy.dt_min");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

ProblemSpec build_problem(const Config& cfg) {
    validate_config(cfg);
    ProblemSpec prob;
    prob.spec = QuotientSpec::make(cfg.n, cfg.k, cfg.l, cfg.tau);
    prob.grid = Grid::make(cfg.n, cfg.lo, cfg.hi, cfg.resolution);
    prob.psi = Forcing::expression(parse_field("psi", cfg.psi, cfg.n), cfg.n);
    prob.phi = parse_field("phi", cfg.phi, cfg.n);
    prob.subsolution = cfg.subsolution ? parse_field("subsolution", *cfg.subsolution, cfg.n) : prob.phi;
    prob.newton = cfg.newton;
    prob.homotopy = cfg.homotopy;
    return prob;
}

int run(const std::vector<std::string>& args) {
    CLI::App cli{"Dirichlet solver for Hessian quotient equations", "hessquot"};
    std::string config_path, mode, out_prefix;
    std::optional<int> resolution;
    std::optional<double> t_step, tol;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
    cli.add_option("--config", config_path, "problem configuration (JSON)");
    cli.add_option("--mode", mode, "solve | manufactured | selftest");
    cli.add_option("--out", out_prefix, "write PREFIX.csv and PREFIX.json");
    cli.add_option("--resolution", resolution, "grid nodes per axis");
    cli.add_option("--t-step", t_step, "initial continuation step");
    cli.add_option("--tol", tol, "Newton residual tolerance");
    cli.add_option("--seed", seed, "random seed for the self-test suites");
    cli.add_flag("--quiet", quiet, "no progress output");
    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        cli.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        std::cout << cli.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "hessquot: error: %s\n", e.what());
        std::fprintf(stderr, "%s\n",
                     json{{"error", {{"kind", "usage-error"}, {"message", e.what()}}}}.dump().c_str());
        return kExitConfig;
    }

    Config cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        } else if (mode == "selftest") {
            cfg.mode = Mode::Selftest;
        } else {
            throw ConfigError("--config is required (except with --mode selftest)");
        }
        if (!mode.empty()) cfg.mode = parse_mode(mode);
        if (!out_prefix.empty()) {
            cfg.out_grid = cfg.mode == Mode::Selftest ? "" : out_prefix + ".csv";
            cfg.out_report = out_prefix + ".json";
        }
        if (resolution) cfg.resolution = *resolution;
        if (t_step) cfg.homotopy.dt_init = *t_step;
        if (tol) cfg.newton.tol_residual = *tol;
        if (seed) cfg.seed = *seed;
        if (const char* env = std::getenv("HESSQUOT_LOG"); env && *env) cfg.verbosity = parse_verbosity(env);
        if (quiet) cfg.verbosity = 0;
        validate_config(cfg);
    } catch (const Error& e) {
        emit_error(e, nullptr);
        return kExitConfig;
    }

    const Logger log{cfg.verbosity};
    try {
        return cfg.mode == Mode::Selftest ? run_selftest(cfg, log) : run_solve(cfg, log);
    } catch (const ConfigError& e) {
        emit_error(e, nullptr);
        return kExitConfig;
    } catch (const std::exception& e) {
        emit_error(e, nullptr);
        return kExitFailure;
    }
}

}  // namespace hessquot::app
