#pragma once

// Independent oracles: brute-force sigma_k, finite-difference derivative checks,
// manufactured solutions and convergence-order measurement. The property suites
// below back both `hessquot --mode selftest` and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hessquot/expr.hpp"
#include "hessquot/grid.hpp"
#include "hessquot/problem.hpp"
#include "hessquot/solver.hpp"
#include "hessquot/symfun.hpp"

namespace hessquot::verify {

/// Literal sum over all k-subsets. Throws OracleScaleExceeded for n > 8.
double sigma_bruteforce(std::span<const double> lam, int k);

/// A manufactured problem and the exact solution sampled at the nodes.
struct Manufactured {
    ProblemSpec problem;
    GridFunction exact;
};

/// Field-forcing manufactured problem: psi = F(T(D^2 ustar)) from the exact symbolic Hessian,
/// phi = subsolution = ustar. Throws NotAdmissible (with the node) where ustar is not admissible.
Manufactured manufactured_problem(const expr::Expr& ustar, const Grid& grid, const QuotientSpec& spec);

/// ustar = exp(|x|^2 / 4) as an expression in x1..xn.
std::string exp_radial_text(int n);

/// Closed-form F(T(D^2 ustar)) for ustar = exp(|x|^2 / 4), as an expression in x1..xn.
/// The Hessian of a radial function has eigenvalues g'' (once) and g'/r (n - 1 times).
std::string exp_radial_operator_text(const QuotientSpec& spec);

/// Expression-forcing variant with psi_z > 0:
///   psi(x, u) = F(T(D^2 ustar))(x) * exp(u - ustar(x)),
/// so ustar is the exact solution. `subsolution` defaults to ustar.
Manufactured exp_radial_problem(const Grid& grid, const QuotientSpec& spec,
                                const std::optional<std::string>& subsolution = std::nullopt);

/// ustar - c * prod_i x_i (1 - x_i): same boundary values as ustar on the unit box.
std::string bump_subsolution_text(int n, double c);

/// max |u - exact| over the nodes shared with a grid of `coarse_res` nodes per axis.
double error_on_common_nodes(const GridFunction& u, const GridFunction& exact, int coarse_res);

struct ConvergenceStudy {
    std::vector<int> resolutions;
    std::vector<double> errors;
    std::vector<SolveReport> reports;
    double order = 0.0;
    bool exact = false;        // errors at round-off level: no order is measurable
    bool suspicious = false;   // measured order < 1: discretization-bug signal
};

/// order = mean of log2(e_i / e_{i+1}).
double measured_order(std::span<const double> errors);

/// Solves make(res) for each resolution (each (res - 1) doubling the previous) and measures
/// the error on the coarsest grid's nodes. Solver errors propagate.
ConvergenceStudy convergence_order(const std::function<Manufactured(int)>& make, std::vector<int> resolutions);

// ------------------------------------------------------------------ suites

struct CheckResult {
    std::string name;
    bool passed = true;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double worst = 0.0;         // worst observed error metric (suite specific)
    std::string detail;         // first failure, if any
    double seconds = 0.0;
};

/// sigma_all vs sigma_bruteforce on `per_n` random lambda per n in [2, 8], all k;
/// |error| <= 1e-12 * sigma_k(|lambda|).
CheckResult check_sigma_oracle(std::size_t per_n, std::uint64_t seed);

/// The seven sigma_k properties on `per_pair` Gamma_k samples for each (n, k), n <= 6.
CheckResult check_sigma_properties(std::size_t per_pair, std::uint64_t seed);

/// Generalized Newton-MacLaurin over every valid (m, l, r, s) on `per_pair` Gamma_m samples per (n, m), n <= 6.
CheckResult check_newton_maclaurin(std::size_t per_pair, std::uint64_t seed);

/// Finite-difference oracles for quotient_gradient (1e-6), quotient_hessian (1e-5), F_gradient (1e-6),
/// the residual Jacobian (1e-5) and expr::differentiate (1e-6); `samples` draws each.
std::vector<CheckResult> check_derivative_oracles(std::size_t samples, std::uint64_t seed);

/// Positive definite F_gradient and Q_gradient, tr(F_gradient) >= (C(n,k)/C(n,l))^(1/(k-l)) - 1e-10
/// and midpoint concavity of F on `pairs` admissible pairs.
CheckResult check_ellipticity_concavity(std::size_t pairs, std::uint64_t seed);

/// F_second_offdiag vs a second central difference of F along E_ij + E_ji, within 1e-4,
/// on `samples` diagonal admissible U with separated eigenvalues and k >= 3.
CheckResult check_divided_difference(std::size_t samples, std::uint64_t seed);

}  // namespace hessquot::verify
