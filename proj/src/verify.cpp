#include "hessquot/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "hessquot/errors.hpp"
#include "hessquot/spectral.hpp"

namespace hessquot::verify {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

CheckResult named(std::string name) {
    CheckResult r;
    r.name = std::move(name);
    return r;
}

void record_failure(CheckResult& r, const std::string& what) {
    if (r.failures++ == 0) r.detail = what;
    r.passed = false;
}

std::string fmt_lambda(std::span<const double> lam) {
    std::string s = "(";
    for (std::size_t i = 0; i < lam.size(); ++i) s += (i ? ", " : "") + num(lam[i]);
    return s + ")";
}

double abs_sigma(std::span<const double> lam, int k) {
    std::vector<double> a(lam.begin(), lam.end());
    for (double& v : a) v = std::abs(v);
    return sigma_all(a)[k];
}

// Uniformly random rotation by Gram-Schmidt on a Gaussian matrix.
SquareMatrix random_rotation(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    SquareMatrix q;
    q.n = n;
    for (int c = 0; c < n; ++c) {
        for (;;) {
            for (int r = 0; r < n; ++r) q(r, c) = normal(rng);
            for (int prev = 0; prev < c; ++prev) {
                double dot = 0.0;
                for (int r = 0; r < n; ++r) dot += q(r, c) * q(r, prev);
                for (int r = 0; r < n; ++r) q(r, c) -= dot * q(r, prev);
            }
            double norm = 0.0;
            for (int r = 0; r < n; ++r) norm += q(r, c) * q(r, c);
            norm = std::sqrt(norm);
            if (norm < 1e-6) continue;
            for (int r = 0; r < n; ++r) q(r, c) /= norm;
            break;
        }
    }
    return q;
}

SymMatrix random_symmetric(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    SymMatrix e(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) e.set(i, j, normal(rng));
    return e;
}

// Admissible U = R diag(lambda) R^T with lambda drawn from Gamma_k.
SymMatrix random_admissible(int n, int k, GammaSampler& sampler, std::mt19937_64& rng) {
    const Lambda lam = sampler.draw(n, k);
    return conjugate(random_rotation(n, rng), SymMatrix::diagonal(lam.values()));
}

// A with T(A) = U: tr(U) = (tau n - 1) tr(A), so A = tau tr(A) I - U.
SymMatrix inverse_eta(const SymMatrix& u, double tau) {
    const int n = u.dim();
    const double tr_a = u.trace() / (tau * n - 1.0);
    SymMatrix a = -1.0 * u;
    for (int i = 0; i < n; ++i) a.set(i, i, a(i, i) + tau * tr_a);
    return a;
}

double min_eigenvalue(const SymMatrix& m) { return sym_eig(m).eigenvalues.front(); }

std::vector<QuotientSpec> spec_family(int max_n) {
    std::vector<QuotientSpec> out;
    const double taus[] = {1.0, 1.5, 3.0};
    for (int n = 3; n <= max_n; ++n)
        for (int k = 2; k <= n; ++k)
            for (int l = 0; l + 2 <= k; ++l)
                for (double tau : taus) out.push_back(QuotientSpec::make(n, k, l, tau));
    return out;
}

}  // namespace

double sigma_bruteforce(std::span<const double> lam, int k) {
    const int n = static_cast<int>(lam.size());
    if (n > 8) throw OracleScaleExceeded("sigma_bruteforce is limited to n <= 8, got n = " + std::to_string(n));
    if (k == 0) return 1.0;
    if (k < 0 || k > n) return 0.0;
    double total = 0.0;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= lam[static_cast<std::size_t>(i)];
        total += prod;
    }
    return total;
}

// ----------------------------------------------------------- manufactured

Manufactured manufactured_problem(const expr::Expr& ustar, const Grid& grid, const QuotientSpec& spec) {
    validate(spec);
    const int n = grid.dim();
    if (n != spec.n) throw InvalidArgument("manufactured_problem: grid dimension differs from spec.n");

    std::vector<expr::Expr> second(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i) {
        const expr::Expr di = expr::differentiate(ustar, expr::Variable::x(i));
        for (int j = i; j < n; ++j) {
            second[static_cast<std::size_t>(i * n + j)] = expr::differentiate(di, expr::Variable::x(j));
        }
    }

    std::vector<double> psi(grid.node_count(), 0.0);
    for (std::size_t node : grid.interior_nodes()) {
        const Point x = grid.coords(node);
        SymMatrix hess(n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) hess.set(i, j, eval_at(second[static_cast<std::size_t>(i * n + j)], x, n));
        try {
            psi[node] = F_value(eta_transform(hess, spec.tau), spec);
        } catch (const NotAdmissible& e) {
            throw NotAdmissible("manufactured solution is not admissible at node " + std::to_string(node) + ": " +
                                    e.what(),
                                e.eigenvalues(), e.failing_sigma(), node);
        }
    }

    ProblemSpec prob;
    prob.grid = grid;
    prob.spec = spec;
    prob.psi = Forcing::field(std::move(psi));
    prob.phi = ustar;
    prob.subsolution = ustar;
    GridFunction exact = GridFunction::sample(grid, [&](const Point& x) { return eval_at(ustar, x, n); });
    return Manufactured{std::move(prob), std::move(exact)};
}

std::string exp_radial_text(int n) {
    std::string r2;
    for (int i = 1; i <= n; ++i) r2 += (i > 1 ? "+x" : "x") + std::to_string(i) + "^2";
    return "exp((" + r2 + ")/4)";
}

std::string exp_radial_operator_text(const QuotientSpec& spec) {
    const int n = spec.n;
    std::string r2;
    for (int i = 1; i <= n; ++i) r2 += (i > 1 ? "+x" : "x") + std::to_string(i) + "^2";
    r2 = "(" + r2 + ")";
    const std::string e = exp_radial_text(n);
    // g(r) = exp(r^2/4): g'' = E (1/2 + r^2/4), g'/r = E/2, Laplacian = E (n/2 + r^2/4).
    const std::string lap = e + "*(" + num(n / 2.0) + "+" + r2 + "/4)";
    const std::string radial = "(" + num(spec.tau) + "*" + lap + "-" + e + "*(0.5+" + r2 + "/4))";
    const std::string tangential = "(" + num(spec.tau) + "*" + lap + "-" + e + "*0.5)";
    auto sigma = [&](int j) -> std::string {
        if (j == 0) return "1";
        std::string s = "(" + num(binomial(n - 1, j)) + "*" + tangential + "^" + std::to_string(j);
        s += "+" + num(binomial(n - 1, j - 1)) + "*" + radial;
        if (j > 1) s += "*" + tangential + "^" + std::to_string(j - 1);
        return s + ")";
    };
    return "(" + sigma(spec.k) + "/" + sigma(spec.l) + ")^(1/" + std::to_string(spec.k - spec.l) + ")";
}

Manufactured exp_radial_problem(const Grid& grid, const QuotientSpec& spec,
                                const std::optional<std::string>& subsolution) {
    validate(spec);
    const int n = grid.dim();
    const std::string ustar = exp_radial_text(n);
    ProblemSpec prob;
    prob.grid = grid;
    prob.spec = spec;
    prob.psi = Forcing::expression(
        expr::parse("(" + exp_radial_operator_text(spec) + ")*exp(u-" + ustar + ")", n), n);
    prob.phi = expr::parse(ustar, n);
    prob.subsolution = expr::parse(subsolution.value_or(ustar), n);
    GridFunction exact = GridFunction::sample(grid, [&](const Point& x) { return eval_at(prob.phi, x, n); });
    return Manufactured{std::move(prob), std::move(exact)};
}

std::string bump_subsolution_text(int n, double c) {
    std::string s = exp_radial_text(n) + "-" + num(c);
    for (int i = 1; i <= n; ++i) s += "*x" + std::to_string(i) + "*(1-x" + std::to_string(i) + ")";
    return s;
}

double error_on_common_nodes(const GridFunction& u, const GridFunction& exact, int coarse_res) {
    const Grid& g = u.grid;
    if ((g.resolution() - 1) % (coarse_res - 1) != 0)
        throw InvalidArgument("grid does not contain the coarse grid's nodes");
    const int ratio = (g.resolution() - 1) / (coarse_res - 1);
    double err = 0.0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const Index idx = g.multi(node);
        bool shared = true;
        for (int a = 0; a < g.dim(); ++a) shared = shared && idx[a] % ratio == 0;
        if (shared) err = std::max(err, std::abs(u[node] - exact[node]));
    }
    return err;
}

double measured_order(std::span<const double> errors) {
    if (errors.size() < 2) throw InvalidArgument("measured_order needs at least two errors");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) sum += std::log2(errors[i] / errors[i + 1]);
    return sum / static_cast<double>(errors.size() - 1);
}

ConvergenceStudy convergence_order(const std::function<Manufactured(int)>& make, std::vector<int> resolutions) {
    if (resolutions.size() < 2) throw InvalidArgument("convergence study needs at least two resolutions");
    for (std::size_t i = 0; i + 1 < resolutions.size(); ++i)
        if (resolutions[i + 1] - 1 != 2 * (resolutions[i] - 1))
            throw InvalidArgument("each resolution must halve the previous spacing ((res - 1) doubling)");

    ConvergenceStudy study;
    study.resolutions = resolutions;
    double scale = 0.0;
    for (int res : resolutions) {
        const Manufactured m = make(res);
        auto [u, report] = solve_dirichlet(m.problem);
        study.errors.push_back(error_on_common_nodes(u, m.exact, resolutions.front()));
        study.reports.push_back(std::move(report));
        scale = std::max(scale, m.exact.max_abs());
    }
    study.exact = std::all_of(study.errors.begin(), study.errors.end(),
                              [&](double e) { return e <= 1e-10 * (1.0 + scale); });
    if (!study.exact) {
        study.order = measured_order(study.errors);
        study.suspicious = study.order < 1.0;
    }
    return study;
}

// ------------------------------------------------------------------ suites

CheckResult check_sigma_oracle(std::size_t per_n, std::uint64_t seed) {
    Stopwatch clock;
    CheckResult r = named("sigma_all matches subset enumeration");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uniform(-3.0, 3.0);
    for (int n = 2; n <= 8; ++n) {
        std::vector<double> lam(static_cast<std::size_t>(n));
        for (std::size_t s = 0; s < per_n; ++s) {
            for (double& v : lam) v = uniform(rng);
            const SigmaTable table = sigma_all(lam);
            for (int k = 0; k <= n; ++k) {
                ++r.cases;
                const double err = std::abs(table[k] - sigma_bruteforce(lam, k)) / abs_sigma(lam, k);
                r.worst = std::max(r.worst, err);
                if (!(err <= 1e-12))
                    record_failure(r, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " lambda=" +
                                          fmt_lambda(lam) + " rel err " + num(err));
            }
        }
    }
    r.seconds = clock.seconds();
    return r;
}

CheckResult check_sigma_properties(std::size_t per_pair, std::uint64_t seed) {
    Stopwatch clock;
    CheckResult r = named("sigma_k properties (cone nesting, positivity, deletion, gradient sum, concavity, ordering, sum)");
    GammaSampler sampler(seed);
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int n = 2; n <= 6; ++n) {
        for (int k = 1; k <= n; ++k) {
            const std::string tag = "n=" + std::to_string(n) + " k=" + std::to_string(k) + " ";
            for (std::size_t s = 0; s < per_pair; ++s) {
                const Lambda lam = sampler.draw(n, k);
                const SigmaTable sigma = sigma_all(lam);
                const auto vals = lam.values();
                r.cases += 1;

                // (1) Gamma_k inside Gamma_j for j < k
                for (int j = 1; j < k; ++j)
                    if (!in_gamma_k(lam, j)) record_failure(r, tag + "cone nesting fails at j=" + std::to_string(j));

                // (2) sigma_{k-1}(lambda|i) > 0, (3) deletion identity, (7) sum identity
                double sum_partials = 0.0;
                for (int i = 0; i < n; ++i) {
                    const double dk = sigma_partial(lam, k, i);
                    sum_partials += dk;
                    if (!(dk > 0.0)) record_failure(r, tag + "sigma_{k-1}(lambda|i) <= 0 at " + fmt_lambda(vals));

                    std::vector<double> rest(vals.begin(), vals.end());
                    rest.erase(rest.begin() + i);
                    const double without = sigma_all(rest)[k];
                    const double err = std::abs(sigma[k] - (without + vals[static_cast<std::size_t>(i)] * dk)) /
                                       abs_sigma(vals, k);
                    r.worst = std::max(r.worst, err);
                    if (!(err <= 1e-12)) record_failure(r, tag + "deletion identity rel err " + num(err));
                }
                const double sum_err =
                    std::abs(sum_partials - (n - k + 1) * sigma[k - 1]) / std::max(1.0, abs_sigma(vals, k - 1) * (n - k + 1));
                r.worst = std::max(r.worst, sum_err);
                if (!(sum_err <= 1e-12)) record_failure(r, tag + "partial-sum identity rel err " + num(sum_err));

                // (6) sorted descending => sigma_{k-1}(lambda|i) nondecreasing
                std::vector<double> sorted(vals.begin(), vals.end());
                std::sort(sorted.begin(), sorted.end(), std::greater<>());
                const Lambda desc(sorted);
                double prev = -INFINITY;
                for (int i = 0; i < n; ++i) {
                    const double d = sigma_partial(desc, k, i);
                    if (d < prev - 1e-10 * std::max(1.0, std::abs(prev)))
                        record_failure(r, tag + "ordering of sigma_{k-1}(lambda|i) fails at " + fmt_lambda(sorted));
                    prev = d;
                }

                // (4) gradient sum bound and (5) concavity, for every l < k
                const Lambda other = sampler.draw(n, k);
                const double theta = unit(rng);
                std::vector<double> mix(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    mix[static_cast<std::size_t>(i)] = theta * lam[i] + (1.0 - theta) * other[i];
                for (int l = 0; l < k; ++l) {
                    const auto d = quotient_derivatives(vals, k, l, false);
                    double gsum = 0.0;
                    for (double g : d.gradient) gsum += g;
                    if (gsum < quotient_constant(n, k, l) - 1e-10)
                        record_failure(r, tag + "l=" + std::to_string(l) + " gradient sum " + num(gsum) +
                                              " below bound");
                    const double f_mix = quotient_derivatives(mix, k, l, false).value;
                    const double f_other = quotient_derivatives(other.values(), k, l, false).value;
                    if (f_mix < theta * d.value + (1.0 - theta) * f_other - 1e-10)
                        record_failure(r, tag + "l=" + std::to_string(l) + " concavity fails");
                }
            }
        }
    }
    r.seconds = clock.seconds();
    return r;
}

CheckResult check_newton_maclaurin(std::size_t per_pair, std::uint64_t seed) {
    Stopwatch clock;
    CheckResult r = named("generalized Newton-MacLaurin inequality");
    GammaSampler sampler(seed);
    for (int n = 2; n <= 6; ++n) {
        for (int m = 1; m <= n; ++m) {
            for (std::size_t s = 0; s < per_pair; ++s) {
                const Lambda lam = sampler.draw(n, m);
                for (int l = 0; l < m; ++l)
                    for (int rr = 1; rr <= m; ++rr)
                        for (int ss = 0; ss < rr && ss <= l; ++ss) {
                            ++r.cases;
                            if (!newton_maclaurin_holds(lam, m, l, rr, ss))
                                record_failure(r, "n=" + std::to_string(n) + " (m,l,r,s)=(" + std::to_string(m) +
                                                      "," + std::to_string(l) + "," + std::to_string(rr) + "," +
                                                      std::to_string(ss) + ") at " + fmt_lambda(lam.values()));
                        }
            }
        }
    }
    r.seconds = clock.seconds();
    return r;
}

namespace {

CheckResult check_quotient_gradient(std::size_t samples, std::uint64_t seed) {
    CheckResult r = named("quotient_gradient vs central differences (1e-6)");
    GammaSampler sampler(seed);
    const auto specs = spec_family(6);
    for (std::size_t s = 0; s < samples; ++s) {
        const QuotientSpec& spec = specs[s % specs.size()];
        const Lambda lam = sampler.draw(spec.n, spec.k);
        const Lambda grad = quotient_gradient(lam, spec);
        double err = 0.0, scale = 0.0;
        for (int i = 0; i < spec.n; ++i) {
            const double h = 1e-6 * (1.0 + std::abs(lam[i]));
            std::vector<double> plus(lam.values().begin(), lam.values().end()), minus = plus;
            plus[static_cast<std::size_t>(i)] += h;
            minus[static_cast<std::size_t>(i)] -= h;
            const double fd = (quotient_value(Lambda(plus), spec) - quotient_value(Lambda(minus), spec)) / (2.0 * h);
            err = std::max(err, std::abs(fd - grad[i]));
            scale = std::max(scale, std::abs(grad[i]));
        }
        ++r.cases;
        r.worst = std::max(r.worst, err / scale);
        if (!(err <= 1e-6 * scale)) record_failure(r, "rel err " + num(err / scale) + " at " + fmt_lambda(lam.values()));
    }
    return r;
}

CheckResult check_quotient_hessian(std::size_t samples, std::uint64_t seed) {
    CheckResult r = named("quotient_hessian vs differences of the gradient (1e-5)");
    GammaSampler sampler(seed);
    const auto specs = spec_family(6);
    for (std::size_t s = 0; s < samples; ++s) {
        const QuotientSpec& spec = specs[s % specs.size()];
        const Lambda lam = sampler.draw(spec.n, spec.k);
        const LambdaHessian hess = quotient_hessian(lam, spec);
        double err = 0.0, scale = 0.0;
        for (int j = 0; j < spec.n; ++j) {
            const double h = 1e-6 * (1.0 + std::abs(lam[j]));
            std::vector<double> plus(lam.values().begin(), lam.values().end()), minus = plus;
            plus[static_cast<std::size_t>(j)] += h;
            minus[static_cast<std::size_t>(j)] -= h;
            const Lambda gp = quotient_gradient(Lambda(plus), spec);
            const Lambda gm = quotient_gradient(Lambda(minus), spec);
            for (int i = 0; i < spec.n; ++i) {
                err = std::max(err, std::abs((gp[i] - gm[i]) / (2.0 * h) - hess(i, j)));
                scale = std::max(scale, std::abs(hess(i, j)));
            }
        }
        ++r.cases;
        r.worst = std::max(r.worst, err / scale);
        if (!(err <= 1e-5 * scale)) record_failure(r, "rel err " + num(err / scale) + " at " + fmt_lambda(lam.values()));
    }
    return r;
}

CheckResult check_F_gradient(std::size_t samples, std::uint64_t seed) {
    CheckResult r = named("F_gradient vs directional differences (1e-6)");
    GammaSampler sampler(seed);
    std::mt19937_64 rng(seed + 1);
    const auto specs = spec_family(6);
    for (std::size_t s = 0; s < samples; ++s) {
        const QuotientSpec& spec = specs[s % specs.size()];
        const SymMatrix u = random_admissible(spec.n, spec.k, sampler, rng);
        const SymMatrix grad = F_gradient(u, spec);
        const double h = 1e-6 * (1.0 + u.max_abs());
        const double gnorm = std::sqrt(grad.frobenius_dot(grad));
        for (int d = 0; d < 10; ++d) {
            const SymMatrix e = random_symmetric(spec.n, rng);
            const double fd = (F_value(u + h * e, spec) - F_value(u - h * e, spec)) / (2.0 * h);
            const double exact = grad.frobenius_dot(e);
            const double rel = std::abs(fd - exact) / (gnorm * std::sqrt(e.frobenius_dot(e)));
            ++r.cases;
            r.worst = std::max(r.worst, rel);
            if (!(rel <= 1e-6)) record_failure(r, "rel err " + num(rel));
        }
    }
    return r;
}

CheckResult check_jacobian(std::size_t samples, std::uint64_t seed) {
    CheckResult r = named("residual Jacobian vs matrix-free differences (1e-5)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const QuotientSpec specs[] = {QuotientSpec::make(3, 3, 1, 1.0), QuotientSpec::make(3, 2, 0, 1.5),
                                  QuotientSpec::make(2, 2, 0, 1.0), QuotientSpec::make(3, 3, 0, 2.0)};
    for (std::size_t s = 0; s < samples; ++s) {
        const QuotientSpec& spec = specs[s % std::size(specs)];
        const int n = spec.n;
        ProblemSpec prob;
        prob.grid = Grid::unit(n, 6);
        prob.spec = spec;
        prob.psi = Forcing::expression(
            expr::parse(n == 2 ? "exp(0.2*u)*(1+0.1*p1^2+0.05*p2*x1)" : "exp(0.2*u)*(1+0.1*p1^2+0.05*p2*x1+0.1*sin(p3))",
                        n),
            n);
        const Grid& g = prob.grid;
        const double h2 = g.spacing(0) * g.spacing(0);
        GridFunction u = GridFunction::sample(g, [&](const Point& x) {
            double q = 0.0;
            for (int a = 0; a < n; ++a) q += 0.5 * x[a] * x[a];
            return q;
        });
        for (double& v : u.values) v += 0.05 * h2 * normal(rng);
        GridFunction psi0(g);
        for (double& v : psi0.values) v = 1.0 + unit(rng);
        const double t = 0.1 + 0.9 * unit(rng);

        std::vector<double> delta(g.interior_nodes().size(), 0.0);
        for (int m = 0; m < 3; ++m)
            delta[static_cast<std::size_t>(unit(rng) * static_cast<double>(delta.size())) % delta.size()] = normal(rng);

        const SparseSystem jac = assemble_jacobian(u, prob, t, psi0);
        const std::vector<double> jd = jac.multiply(delta);

        const double eps = 1e-6;
        GridFunction up = u, um = u;
        for (std::size_t row = 0; row < delta.size(); ++row) {
            up[g.interior_nodes()[row]] += eps * delta[row];
            um[g.interior_nodes()[row]] -= eps * delta[row];
        }
        const ResidualField rp = assemble_residual(up, prob, t, psi0);
        const ResidualField rm = assemble_residual(um, prob, t, psi0);
        double err = 0.0, scale = 0.0;
        for (std::size_t row = 0; row < delta.size(); ++row) {
            err = std::max(err, std::abs((rp.values[row] - rm.values[row]) / (2.0 * eps) - jd[row]));
            scale = std::max(scale, std::abs(jd[row]));
        }
        ++r.cases;
        r.worst = std::max(r.worst, err / scale);
        if (!(err <= 1e-5 * scale)) record_failure(r, "rel err " + num(err / scale) + " for n=" + std::to_string(n));
        // Row sparsity is bounded by the stencil.
        std::size_t limit = 1;
        for (int a = 0; a < n; ++a) limit *= 3;
        for (std::size_t row = 0; row < jac.rows; ++row)
            if (jac.row_nonzeros(row) > limit) record_failure(r, "row exceeds 3^n nonzeros");
    }
    return r;
}

// Random expression over x1, x2, u, p1, p2.
std::string random_expression(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 99);
    std::uniform_real_distribution<double> lit(0.5, 2.0);
    static const char* leaves[] = {"x1", "x2", "u", "p1", "p2"};
    if (depth == 0 || pick(rng) < 20) {
        const int c = pick(rng);
        if (c < 25) return num(std::round(lit(rng) * 100.0) / 100.0);
        return leaves[c % 5];
    }
    const int op = pick(rng) % 10;
    const std::string a = random_expression(rng, depth - 1);
    switch (op) {
        case 0: return "(" + a + "+" + random_expression(rng, depth - 1) + ")";
        case 1: return "(" + a + "-" + random_expression(rng, depth - 1) + ")";
        case 2:
        case 3: return "(" + a + "*" + random_expression(rng, depth - 1) + ")";
        case 4: return "(" + a + "/" + random_expression(rng, depth - 1) + ")";
        case 5: return "(" + a + ")^" + std::to_string(2 + pick(rng) % 2);
        case 6: return "exp(" + a + "/4)";
        case 7: return "log(" + a + ")";
        case 8: return (pick(rng) % 2 ? "sin(" : "cos(") + a + ")";
        default: return "sqrt(" + a + ")";
    }
}

CheckResult check_expr_derivatives(std::size_t samples, std::uint64_t seed) {
    CheckResult r = named("expr differentiate vs central differences (1e-6)");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coord(0.5, 1.5);
    const expr::Variable vars[] = {expr::Variable::x(0), expr::Variable::x(1), expr::Variable::u(),
                                   expr::Variable::p(0), expr::Variable::p(1)};
    std::size_t accepted = 0;
    while (accepted < samples) {
        const std::string text = random_expression(rng, 4);
        const expr::Expr e = expr::parse(text, 2);
        std::array<double, 2> x{coord(rng), coord(rng)}, p{coord(rng), coord(rng)};
        double u = coord(rng);
        auto value_at = [&](const expr::Expr& ex) { return expr::evaluate(ex, expr::EvalEnv{x, u, p}); };
        try {
            if (std::abs(value_at(e)) > 100.0) continue;
            std::vector<std::pair<double, double>> pairs;
            for (const auto& v : vars) {
                double* slot = v.kind == expr::VarKind::U ? &u
                               : v.kind == expr::VarKind::X ? &x[static_cast<std::size_t>(v.index)]
                                                            : &p[static_cast<std::size_t>(v.index)];
                const double base = *slot;
                const double h = 1e-6 * (1.0 + std::abs(base));
                *slot = base + h;
                const double fp = value_at(e);
                *slot = base - h;
                const double fm = value_at(e);
                *slot = base;
                pairs.emplace_back((fp - fm) / (2.0 * h), value_at(expr::differentiate(e, v)));
            }
            ++accepted;
            for (const auto& [fd, exact] : pairs) {
                const double rel = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
                ++r.cases;
                r.worst = std::max(r.worst, rel);
                if (!(rel <= 1e-6)) record_failure(r, "rel err " + num(rel) + " for " + text);
            }
        } catch (const DomainFault&) {
            continue;
        }
    }
    return r;
}

}  // namespace

std::vector<CheckResult> check_derivative_oracles(std::size_t samples, std::uint64_t seed) {
    std::vector<CheckResult> out;
    auto timed = [&](auto fn, std::uint64_t salt) {
        Stopwatch clock;
        CheckResult r = fn(samples, seed + salt);
        r.seconds = clock.seconds();
        out.push_back(std::move(r));
    };
    timed(check_quotient_gradient, 11);
    timed(check_quotient_hessian, 12);
    timed(check_F_gradient, 13);
    timed(check_jacobian, 14);
    timed(check_expr_derivatives, 15);
    return out;
}

CheckResult check_ellipticity_concavity(std::size_t pairs, std::uint64_t seed) {
    Stopwatch clock;
    CheckResult r = named("ellipticity, trace bound and concavity of F");
    GammaSampler sampler(seed);
    std::mt19937_64 rng(seed + 7);
    const auto specs = spec_family(6);
    for (std::size_t s = 0; s < pairs; ++s) {
        const QuotientSpec& spec = specs[s % specs.size()];
        const std::string tag = "n=" + std::to_string(spec.n) + " k=" + std::to_string(spec.k) +
                                " l=" + std::to_string(spec.l) + " tau=" + num(spec.tau) + ": ";
        const SymMatrix u = random_admissible(spec.n, spec.k, sampler, rng);
        const SymMatrix w = random_admissible(spec.n, spec.k, sampler, rng);
        ++r.cases;

        const SymMatrix grad = F_gradient(u, spec);
        const double min_f = min_eigenvalue(grad);
        if (!(min_f > 0.0)) record_failure(r, tag + "F_gradient min eigenvalue " + num(min_f));
        const double bound = quotient_constant(spec.n, spec.k, spec.l);
        if (grad.trace() < bound - 1e-10) record_failure(r, tag + "trace " + num(grad.trace()) + " below " + num(bound));

        const double min_q = min_eigenvalue(Q_gradient(inverse_eta(u, spec.tau), spec));
        if (!(min_q > 0.0)) record_failure(r, tag + "Q_gradient min eigenvalue " + num(min_q));

        const double mid = F_value(0.5 * u + 0.5 * w, spec);
        const double chord = 0.5 * F_value(u, spec) + 0.5 * F_value(w, spec);
        r.worst = std::max(r.worst, chord - mid);
        if (mid < chord - 1e-10) record_failure(r, tag + "midpoint concavity fails by " + num(chord - mid));
    }
    r.seconds = clock.seconds();
    return r;
}

CheckResult check_divided_difference(std::size_t samples, std::uint64_t seed) {
    Stopwatch clock;
    CheckResult r = named("off-diagonal second derivative equals the divided difference (1e-4)");
    GammaSampler sampler(seed);
    std::vector<QuotientSpec> specs;
    for (const auto& spec : spec_family(6))
        if (spec.k >= 3) specs.push_back(spec);
    std::size_t taken = 0;
    while (taken < samples) {
        const QuotientSpec& spec = specs[taken % specs.size()];
        const Lambda lam = sampler.draw(spec.n, spec.k);
        std::vector<double> sorted(lam.values().begin(), lam.values().end());
        std::sort(sorted.begin(), sorted.end());
        bool separated = true;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) separated = separated && sorted[i + 1] - sorted[i] > 0.05;
        if (!separated) continue;
        ++taken;

        const SymMatrix u = SymMatrix::diagonal(lam.values());
        const double s = 1e-4 * (1.0 + u.max_abs());
        for (int i = 0; i < spec.n; ++i) {
            for (int j = 0; j < spec.n; ++j) {
                if (i == j) continue;
                SymMatrix e(spec.n);
                e.set(i, j, 1.0);
                // Along U + s(E_ij + E_ji): d^2F/ds^2 = 2 F^{ij,ji}. Fourth-order central difference.
                auto at = [&](double m) { return F_value(u + (m * s) * e, spec); };
                const double second =
                    (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * s * s);
                const double oracle = -0.5 * second;
                const double value = F_second_offdiag(u, spec, i, j);
                const double err = std::abs(value - oracle);
                ++r.cases;
                r.worst = std::max(r.worst, err);
                if (!(err <= 1e-4 * std::max(1.0, std::abs(oracle))))
                    record_failure(r, "err " + num(err) + " at " + fmt_lambda(lam.values()));
            }
        }
    }
    r.seconds = clock.seconds();
    return r;
}

}  // namespace hessquot::verify
