#pragma once

// Batch front end behind the `hessquot` executable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hessquot/errors.hpp"
#include "hessquot/problem.hpp"

namespace hessquot::app {

enum class Mode { Solve, Manufactured, Selftest };

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitWarnings = 2;
inline constexpr int kExitConfig = 64;

struct Config {
    int version = 1;
    Mode mode = Mode::Solve;
    int n = 3;
    int k = 3;
    int l = 1;
    double tau = 1.0;
    std::vector<double> lo;
    std::vector<double> hi;
    int resolution = 17;
    std::string psi;
    std::string phi;
    std::optional<std::string> subsolution;
    std::optional<std::string> ustar;
    NewtonOptions newton;
    HomotopyOptions homotopy;
    std::string out_grid;
    std::string out_report;
    std::uint64_t seed = 0;
    int verbosity = 1;   // 0 quiet, 1 one line per Newton iteration, 2 also stage events
};

/// An expression field of the config failed to parse.
class FieldParseError : public ConfigError {
public:
    FieldParseError(const std::string& field, const ParseError& cause)
        : ConfigError("field '" + field + "': " + cause.what()), field_(field), kind_(cause.kind()),
          offset_(cause.offset()), expected_(cause.expected()) {}

    const char* kind() const noexcept override { return kind_.c_str(); }
    const std::string& field() const noexcept { return field_; }
    std::size_t offset() const noexcept { return offset_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::string field_;
    std::string kind_;
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Reads and validates a config file. Throws ConfigError.
Config load_config(const std::string& path);

/// Parses a config from JSON text. `origin` names the source in messages.
Config parse_config(const std::string& text, const std::string& origin = "<config>");

/// Builds the problem for solve / manufactured mode. Throws ConfigError, ParseError or
/// the errors of check_problem's invariants (InvalidArgument, NotAdmissible).
ProblemSpec build_problem(const Config& cfg);

/// `hessquot --config FILE [--mode M] [--out PREFIX] [--resolution N] [--t-step DT] [--tol TOL]
///  [--seed S] [--quiet]`. args excludes the program name. Returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace hessquot::app
