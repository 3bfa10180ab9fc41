#include "hessquot/problem.hpp"

#include <cmath>
#include <string>

#include "hessquot/errors.hpp"
#include "hessquot/spectral.hpp"

namespace hessquot {

Forcing Forcing::expression(expr::Expr psi, int n) {
    if (n < 1 || n > 3) throw InvalidArgument("forcing expressions support n in [1, 3]");
    Forcing f;
    f.n_ = n;
    f.psi_ = std::move(psi);
    f.psi_z_ = expr::differentiate(f.psi_, expr::Variable::u());
    for (int i = 0; i < n; ++i) f.psi_p_[static_cast<std::size_t>(i)] = expr::differentiate(f.psi_, expr::Variable::p(i));
    return f;
}

Forcing Forcing::field(std::vector<double> node_values) {
    Forcing f;
    for (double v : node_values)
        if (!std::isfinite(v)) throw InvalidArgument("forcing field values must be finite");
    f.field_ = std::move(node_values);
    return f;
}

ForcingSample Forcing::eval(std::size_t node, const Point& x, double u, const std::array<double, 3>& p,
                            bool with_partials) const {
    ForcingSample s;
    if (field_) {
        s.value = (*field_).at(node);
        return s;
    }
    const expr::EvalEnv env{std::span(x).first(static_cast<std::size_t>(n_)), u,
                            std::span(p).first(static_cast<std::size_t>(n_))};
    s.value = expr::evaluate(psi_, env);
    if (with_partials) {
        s.dz = expr::evaluate(psi_z_, env);
        for (int i = 0; i < n_; ++i)
            s.dp[static_cast<std::size_t>(i)] = expr::evaluate(psi_p_[static_cast<std::size_t>(i)], env);
    }
    return s;
}

double eval_at(const expr::Expr& e, const Point& x, int n) {
    return expr::evaluate(e, expr::EvalEnv{std::span(x).first(static_cast<std::size_t>(n)), 0.0, {}});
}

namespace {

bool depends_on_state(const expr::Expr& e, int n) {
    if (expr::depends_on(e, expr::Variable::u())) return true;
    for (int i = 0; i < n; ++i)
        if (expr::depends_on(e, expr::Variable::p(i))) return true;
    return false;
}

std::string node_label(const Grid& g, std::size_t node) {
    const Index idx = g.multi(node);
    std::string s = "(";
    for (int a = 0; a < g.dim(); ++a) s += (a ? "," : "") + std::to_string(idx[a]);
    return s + ")";
}

}  // namespace

GridFunction initial_iterate(const ProblemSpec& prob) {
    const Grid& g = prob.grid;
    const int n = g.dim();
    GridFunction u(g);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const Point x = g.coords(node);
        u[node] = g.is_interior(node) ? eval_at(prob.subsolution, x, n) : eval_at(prob.phi, x, n);
    }
    return u;
}

ProblemCheck check_problem(const ProblemSpec& prob) {
    validate(prob.spec);
    const Grid& g = prob.grid;
    const int n = g.dim();
    if (n != prob.spec.n)
        throw InvalidArgument("grid dimension " + std::to_string(n) + " differs from spec.n = " +
                              std::to_string(prob.spec.n));
    if (depends_on_state(prob.phi, n)) throw InvalidArgument("boundary data phi may depend on x only");
    if (depends_on_state(prob.subsolution, n)) throw InvalidArgument("the subsolution may depend on x only");
    if (prob.psi.is_field() && prob.psi.field_values().size() != g.node_count())
        throw InvalidArgument("forcing field has the wrong number of node values");
    if (!(prob.newton.tol_residual > 0.0) || prob.newton.max_iters < 1)
        throw InvalidArgument("newton options need tol > 0 and max_iters >= 1");
    if (!(prob.homotopy.dt_init > 0.0 && prob.homotopy.dt_init <= 1.0) || !(prob.homotopy.dt_min > 0.0) ||
        prob.homotopy.dt_min > prob.homotopy.dt_init)
        throw InvalidArgument("homotopy options need 0 < dt_min <= dt_init <= 1");

    GridFunction sub(g);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const Point x = g.coords(node);
        sub[node] = eval_at(prob.subsolution, x, n);
        if (!g.is_interior(node)) {
            const double phi = eval_at(prob.phi, x, n);
            if (std::abs(sub[node] - phi) > 1e-10)
                throw InvalidArgument("subsolution differs from phi at boundary node " + node_label(g, node) + " by " +
                                      std::to_string(sub[node] - phi));
        }
    }

    ProblemCheck check;
    double min_psi = INFINITY, min_psi_z = INFINITY;
    for (std::size_t node : g.interior_nodes()) {
        const SymMatrix hess = fd_hessian(sub, node);
        double value = 0.0;
        try {
            value = F_value(eta_transform(hess, prob.spec.tau), prob.spec);
        } catch (const NotAdmissible& e) {
            throw NotAdmissible("subsolution is not admissible at node " + node_label(g, node) + ": " + e.what(),
                                e.eigenvalues(), e.failing_sigma(), node);
        }
        const ForcingSample psi =
            prob.psi.eval(node, g.coords(node), sub[node], fd_gradient(sub, node), !prob.psi.is_field());
        if (value < psi.value - 1e-8)
            throw InvalidArgument("subsolution inequality F(U) >= psi fails at node " + node_label(g, node) + ": F = " +
                                  std::to_string(value) + ", psi = " + std::to_string(psi.value));
        min_psi = std::min(min_psi, psi.value);
        if (!prob.psi.is_field()) min_psi_z = std::min(min_psi_z, psi.dz);
    }
    if (!(min_psi > 0.0)) {
        check.psi_positive = false;
        check.warnings.push_back("psi is not positive at the subsolution (min " + std::to_string(min_psi) + ")");
    }
    if (!prob.psi.is_field() && !(min_psi_z > 0.0)) {
        check.psi_z_positive = false;
        check.warnings.push_back("psi_z is not positive at the subsolution (min " + std::to_string(min_psi_z) +
                                 "); uniqueness and the comparison principle are not guaranteed");
    }
    if (n == 2) check.notes.push_back("n = 2 is a degenerate family (the theory assumes n >= 3)");
    return check;
}

}  // namespace hessquot
