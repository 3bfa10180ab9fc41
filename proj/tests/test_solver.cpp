#include "doctest.h"

#include <cmath>

#include "hessquot/errors.hpp"
#include "hessquot/solver.hpp"
#include "hessquot/verify.hpp"

using namespace hessquot;
using doctest::Approx;

namespace {

const char* kHalf3 = "0.5*(x1^2+x2^2+x3^2)";

ProblemSpec quadratic_problem(int res, const std::string& psi = "(8/6)^0.5", const std::string& sub = kHalf3) {
    ProblemSpec prob;
    prob.grid = Grid::unit(3, res);
    prob.spec = QuotientSpec::make(3, 3, 1, 1.0);
    prob.psi = Forcing::expression(expr::parse(psi, 3), 3);
    prob.phi = expr::parse(kHalf3, 3);
    prob.subsolution = expr::parse(sub, 3);
    return prob;
}

double max_error(const GridFunction& u, const GridFunction& exact) {
    double e = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) e = std::max(e, std::abs(u[i] - exact[i]));
    return e;
}

}  // namespace

TEST_CASE("check_problem") {
    const ProblemCheck ok = check_problem(quadratic_problem(6, "(8/6)^0.5*exp(u-0.5*(x1^2+x2^2+x3^2))"));
    CHECK(ok.warnings.empty());
    CHECK(ok.psi_z_positive);
    // Constant psi: psi_z > 0 is not established.
    CHECK_FALSE(check_problem(quadratic_problem(6)).psi_z_positive);

    // Boundary mismatch.
    CHECK_THROWS_AS(check_problem(quadratic_problem(6, "(8/6)^0.5", "0.5*(x1^2+x2^2+x3^2)+0.1")), InvalidArgument);
    // Not a subsolution: psi too large.
    CHECK_THROWS_AS(check_problem(quadratic_problem(6, "2")), InvalidArgument);
    // Subsolution depending on u.
    ProblemSpec bad = quadratic_problem(6);
    bad.subsolution = expr::parse("u", 3);
    CHECK_THROWS_AS(check_problem(bad), InvalidArgument);

    // Inadmissible subsolution: concave bump dominating the Hessian.
    try {
        check_problem(quadratic_problem(6, "1", "0.5*(x1^2+x2^2+x3^2)+20*x1*(1-x1)*x2*(1-x2)*x3*(1-x3)"));
        FAIL("expected NotAdmissible");
    } catch (const NotAdmissible& e) {
        CHECK(e.node().has_value());
    }

    // psi_z <= 0 is a warning, not an error.
    const ProblemCheck c = check_problem(quadratic_problem(6, "(8/6)^0.5*exp(-u+0.5*(x1^2+x2^2+x3^2))"));
    CHECK_FALSE(c.psi_z_positive);
    CHECK_FALSE(c.warnings.empty());

    ProblemSpec two;
    two.grid = Grid::unit(2, 6);
    two.spec = QuotientSpec::make(2, 2, 0, 1.0);
    two.psi = Forcing::expression(expr::parse("exp(u-0.5*(x1^2+x2^2))", 2), 2);
    two.phi = expr::parse("0.5*(x1^2+x2^2)", 2);
    two.subsolution = two.phi;
    const ProblemCheck c2 = check_problem(two);
    CHECK(c2.warnings.empty());
    CHECK_FALSE(c2.notes.empty());
}

TEST_CASE("assemble_residual examples") {
    const ProblemSpec prob = quadratic_problem(6);
    const GridFunction u = initial_iterate(prob);
    const GridFunction psi0 = homotopy_rhs_field(prob);
    for (std::size_t node : prob.grid.interior_nodes()) CHECK(psi0[node] == Approx(std::sqrt(4.0 / 3.0)));

    const ResidualField r0 = assemble_residual(u, prob, 0.0, psi0);
    CHECK(r0.inf_norm < 1e-14);
    const ResidualField r1 = assemble_residual(u, prob, 1.0, psi0);
    CHECK(r1.inf_norm < 1e-12);
    CHECK(r1.min_margin > 0.0);

    // Locality: one perturbed value changes only its stencil neighbourhood.
    const Grid& g = prob.grid;
    const std::size_t centre = g.flat({2, 2, 2});
    GridFunction bumped = u;
    bumped[centre] += 1e-3;
    const ResidualField rb = assemble_residual(bumped, prob, 1.0, psi0);
    for (std::size_t row = 0; row < g.interior_nodes().size(); ++row) {
        const Index a = g.multi(g.interior_nodes()[row]);
        int dist = 0;
        for (int ax = 0; ax < 3; ++ax) dist = std::max(dist, std::abs(a[ax] - 2));
        if (dist > 1) CHECK(rb.values[row] == r1.values[row]);
    }
    CHECK(rb.values[static_cast<std::size_t>(g.interior_row(centre))] != r1.values[static_cast<std::size_t>(g.interior_row(centre))]);

    // Inadmissible state reports the node.
    GridFunction spike = u;
    spike[centre] += 10.0;
    try {
        assemble_residual(spike, prob, 1.0, psi0);
        FAIL("expected NotAdmissible");
    } catch (const NotAdmissible& e) {
        REQUIRE(e.node().has_value());
        const Index at = g.multi(*e.node());
        for (int ax = 0; ax < 3; ++ax) CHECK(std::abs(at[ax] - 2) <= 1);
    }
}

TEST_CASE("assemble_jacobian") {
    const ProblemSpec prob = quadratic_problem(6, "(8/6)^0.5*exp(0.3*(u-0.5*(x1^2+x2^2+x3^2)))*(1+0.1*p1)");
    const GridFunction u = initial_iterate(prob);
    const GridFunction psi0 = homotopy_rhs_field(prob);
    const SparseSystem j0 = assemble_jacobian(u, prob, 0.0, psi0);
    const SparseSystem j1 = assemble_jacobian(u, prob, 1.0, psi0);
    // At t = 0 the operator is the pure second-order part: rows sum to zero away from the boundary.
    const Grid& g = prob.grid;
    const std::size_t centre = g.flat({2, 2, 2});
    const auto row = static_cast<std::size_t>(g.interior_row(centre));
    double sum0 = 0.0, sum1 = 0.0;
    for (std::size_t k = j0.row_ptr[row]; k < j0.row_ptr[row + 1]; ++k) sum0 += j0.vals[k];
    for (std::size_t k = j1.row_ptr[row]; k < j1.row_ptr[row + 1]; ++k) sum1 += j1.vals[k];
    CHECK(std::abs(sum0) < 1e-9);
    CHECK(sum1 == Approx(-0.3 * std::sqrt(4.0 / 3.0) * (1 + 0.1 * g.coords(centre)[0])).epsilon(1e-9));
    CHECK(j1.row_nonzeros(row) <= 27);
    for (std::size_t r = 0; r < j1.rows; ++r) CHECK(std::is_sorted(j1.cols.begin() + static_cast<long>(j1.row_ptr[r]), j1.cols.begin() + static_cast<long>(j1.row_ptr[r + 1])));
}

TEST_CASE("linear_solve examples") {
    SparseSystem id;
    id.rows = 4;
    for (std::size_t r = 0; r < 4; ++r) {
        id.row_ptr.push_back(r);
        id.cols.push_back(r);
        id.vals.push_back(1.0);
        id.rhs.push_back(static_cast<double>(r) - 1.5);
    }
    id.row_ptr.push_back(4);
    CHECK(linear_solve(id) == id.rhs);

    // 1D Poisson: -u'' = 2 on (0,1), u = x(1-x).
    const std::size_t m = 49;
    const double h = 1.0 / static_cast<double>(m + 1);
    SparseSystem p;
    p.rows = m;
    p.row_ptr.push_back(0);
    for (std::size_t r = 0; r < m; ++r) {
        if (r > 0) p.cols.push_back(r - 1), p.vals.push_back(-1.0 / (h * h));
        p.cols.push_back(r), p.vals.push_back(2.0 / (h * h));
        if (r + 1 < m) p.cols.push_back(r + 1), p.vals.push_back(-1.0 / (h * h));
        p.row_ptr.push_back(p.cols.size());
        p.rhs.push_back(2.0);
    }
    const std::vector<double> x = linear_solve(p);
    for (std::size_t r = 0; r < m; ++r) {
        const double xr = h * static_cast<double>(r + 1);
        CHECK(x[r] == Approx(xr * (1 - xr)).epsilon(1e-10));
    }

    SparseSystem singular = id;
    singular.vals[2] = 0.0;
    CHECK_THROWS_AS(linear_solve(singular), SingularSystem);
}

TEST_CASE("newton_stage") {
    const ProblemSpec prob = quadratic_problem(7);
    const GridFunction u0 = initial_iterate(prob);
    const GridFunction psi0 = homotopy_rhs_field(prob);
    LinearSolver lin;
    const StageResult same = newton_stage(u0, 1.0, prob, psi0, lin);
    CHECK(same.iterations == 0);
    CHECK(same.u.values == u0.values);

    // Start away from the solution with the boundary intact.
    GridFunction start = u0;
    const Grid& g = prob.grid;
    for (std::size_t node : g.interior_nodes()) {
        const Point x = g.coords(node);
        start[node] -= 0.05 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * x[2] * (1 - x[2]);
    }
    std::vector<double> margins;
    const StageResult s = newton_stage(start, 1.0, prob, psi0, lin,
                                       [&](const IterationEvent& ev) { margins.push_back(ev.min_margin); });
    CHECK(s.iterations <= 3);
    CHECK(s.residual_inf <= 1e-9);
    for (double m : margins) CHECK(m > 0.0);
    CHECK(max_error(s.u, u0) < 1e-8);
}

TEST_CASE("solve_dirichlet on the quadratic") {
    const auto spec = QuotientSpec::make(3, 3, 1, 1.0);
    const auto m = verify::manufactured_problem(expr::parse(kHalf3, 3), Grid::unit(3, 9), spec);
    for (std::size_t node : m.problem.grid.interior_nodes())
        CHECK(m.problem.psi.field_values()[node] == Approx(quotient_constant(3, 3, 1) * 2.0));
    auto [u, report] = solve_dirichlet(m.problem);
    CHECK(report.converged);
    CHECK(report.stages.back().t == 1.0);
    CHECK(max_error(u, m.exact) < 1e-12);
    CHECK(report.diagnostics.all_ok());
    CHECK(report.diagnostics.laplacian.value == Approx(3.0));

    // Non-trivial subsolution below u*: the continuation has to move.
    ProblemSpec moved = m.problem;
    moved.subsolution = expr::parse(std::string(kHalf3) + "-0.3*x1*(1-x1)*x2*(1-x2)*x3*(1-x3)", 3);
    auto [v, rep2] = solve_dirichlet(moved);
    CHECK(rep2.stages.size() > 1);
    for (std::size_t i = 1; i < rep2.stages.size(); ++i) CHECK(rep2.stages[i].t > rep2.stages[i - 1].t);
    CHECK(rep2.stages.back().final_residual_inf <= 1e-9);
    CHECK(max_error(v, m.exact) <= 1e-8);
}

TEST_CASE("solver failure keeps the last iterate") {
    ProblemSpec prob = quadratic_problem(6, "(8/6)^0.5", std::string(kHalf3) + "-0.3*x1*(1-x1)*x2*(1-x2)*x3*(1-x3)");
    prob.newton.max_iters = 1;
    prob.newton.tol_residual = 1e-30;
    prob.homotopy.dt_min = 0.05;
    try {
        solve_dirichlet(prob);
        FAIL("expected SolveError");
    } catch (const SolveError& e) {
        CHECK(std::string(e.kind()) == "homotopy-stall");
        CHECK((e.cause() == "newton-divergence" || e.cause() == "line-search-failure"));
        CHECK(e.last_iterate().values.size() == prob.grid.node_count());
        CHECK(e.report().stages.size() == 1);
        CHECK(e.report().rejected_stages > 0);
    }
}

TEST_CASE("diagnostics") {
    const auto m = verify::exp_radial_problem(Grid::unit(3, 7), QuotientSpec::make(3, 3, 1, 1.0));
    const GridFunction u0 = initial_iterate(m.problem);
    const DiagnosticsReport d = run_diagnostics(u0, m.problem);
    CHECK(d.comparison.ok);
    CHECK_FALSE(d.comparison.skipped);
    CHECK(d.comparison.value == 0.0);
    CHECK(d.all_ok());

    GridFunction bumped = u0;
    const std::size_t node = m.problem.grid.flat({3, 3, 3});
    bumped[node] = 10.0;
    const DiagnosticsReport bad = run_diagnostics(bumped, m.problem);
    CHECK_FALSE(bad.max_principle.ok);
    CHECK(bad.max_principle.node == node);
    CHECK_FALSE(bad.admissibility.ok);
    CHECK_FALSE(bad.all_ok());
}
