#pragma once

// Problem definition for the Dirichlet problem
//   F(tau*(Lap u)*I - D^2 u) = psi(x, u, grad u)  in the box,   u = phi  on its boundary,
// together with the subsolution used to start the continuation.

#include <optional>
#include <string>
#include <vector>

#include "hessquot/expr.hpp"
#include "hessquot/grid.hpp"
#include "hessquot/symfun.hpp"

namespace hessquot {

/// psi and its partials at one state.
struct ForcingSample {
    double value = 0.0;
    double dz = 0.0;                  // psi_z
    std::array<double, 3> dp{};       // psi_{p_i}
};

/// The right-hand side psi: either an expression in (x, u, p) with symbolic partials,
/// or a field of node values that does not depend on (u, p).
class Forcing {
public:
    Forcing() = default;

    /// Differentiates psi once per (u, p_i) at construction.
    static Forcing expression(expr::Expr psi, int n);
    /// Values indexed by flat grid node.
    static Forcing field(std::vector<double> node_values);

    bool is_field() const noexcept { return field_.has_value(); }
    const expr::Expr& psi() const noexcept { return psi_; }
    const std::vector<double>& field_values() const { return *field_; }

    /// Value only, unless with_partials.
    ForcingSample eval(std::size_t node, const Point& x, double u, const std::array<double, 3>& p,
                       bool with_partials) const;

private:
    int n_ = 0;
    expr::Expr psi_;
    expr::Expr psi_z_;
    std::array<expr::Expr, 3> psi_p_{};
    std::optional<std::vector<double>> field_;
};

struct NewtonOptions {
    double tol_residual = 1e-9;
    int max_iters = 50;
};

struct HomotopyOptions {
    double dt_init = 0.1;
    double dt_min = 1e-4;
    double dt_max = 0.25;
};

struct ProblemSpec {
    Grid grid;
    QuotientSpec spec;
    Forcing psi;
    expr::Expr phi;           // boundary data, a function of x only
    expr::Expr subsolution;   // function of x only
    NewtonOptions newton;
    HomotopyOptions homotopy;
};

/// Evaluates an x-only expression at a grid point.
double eval_at(const expr::Expr& e, const Point& x, int n);

/// Result of the load-time checks on a problem.
struct ProblemCheck {
    bool psi_positive = true;
    bool psi_z_positive = true;   // vacuous for field forcing
    std::vector<std::string> warnings;
    std::vector<std::string> notes;   // informational, e.g. the n = 2 family
};

/// Validates the invariants that must hold before solving:
/// - spec valid and grid dimension == spec.n, phi and subsolution independent of (u, p);
/// - subsolution == phi on boundary nodes within 1e-10;
/// - subsolution admissible at every interior node (NotAdmissible with the node otherwise);
/// - F(U[subsolution]) >= psi(x, subsolution, grad subsolution) - 1e-8 at every interior node
///   (InvalidArgument otherwise).
/// psi > 0 and psi_z > 0 at the probed subsolution states are reported, not enforced.
ProblemCheck check_problem(const ProblemSpec& prob);

/// The subsolution sampled on the grid with boundary nodes set to phi.
GridFunction initial_iterate(const ProblemSpec& prob);

}  // namespace hessquot
