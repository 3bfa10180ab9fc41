#include "hessquot/solver.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <chrono>
#include <cmath>

#include "hessquot/spectral.hpp"

namespace hessquot {

struct LinearSolver::Impl {
    using Matrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

    Eigen::SparseLU<Matrix, Eigen::COLAMDOrdering<int>> lu;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;
    bool analyzed = false;

    Matrix to_eigen(const SparseSystem& sys) const {
        std::vector<Eigen::Triplet<double, int>> triplets;
        triplets.reserve(sys.vals.size());
        for (std::size_t r = 0; r < sys.rows; ++r)
            for (std::size_t k = sys.row_ptr[r]; k < sys.row_ptr[r + 1]; ++k)
                triplets.emplace_back(static_cast<int>(r), static_cast<int>(sys.cols[k]), sys.vals[k]);
        Matrix m(static_cast<int>(sys.rows), static_cast<int>(sys.rows));
        m.setFromTriplets(triplets.begin(), triplets.end());
        m.makeCompressed();
        return m;
    }
};

LinearSolver::LinearSolver() : impl_(std::make_unique<Impl>()) {}
LinearSolver::~LinearSolver() = default;

std::vector<double> LinearSolver::solve(const SparseSystem& sys) {
    const std::size_t n = sys.rows;
    if (sys.rhs.size() != n || sys.row_ptr.size() != n + 1) throw InvalidArgument("malformed sparse system");
    if (n == 0) return {};

    const Impl::Matrix a = impl_->to_eigen(sys);
    if (!impl_->analyzed || impl_->row_ptr != sys.row_ptr || impl_->cols != sys.cols) {
        impl_->lu.analyzePattern(a);
        impl_->row_ptr = sys.row_ptr;
        impl_->cols = sys.cols;
        impl_->analyzed = true;
    }
    impl_->lu.factorize(a);
    if (impl_->lu.info() != Eigen::Success)
        throw SingularSystem("sparse LU factorization failed (" + impl_->lu.lastErrorMessage() +
                             "); probable collapse of the admissibility margin");

    const Eigen::Map<const Eigen::VectorXd> b(sys.rhs.data(), static_cast<Eigen::Index>(n));
    const double bnorm = b.norm();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    if (bnorm == 0.0) return std::vector<double>(n, 0.0);

    x = impl_->lu.solve(b);
    Eigen::VectorXd r = b - a * x;
    for (int sweep = 0; sweep < 2 && r.norm() > 1e-10 * bnorm; ++sweep) {
        x += impl_->lu.solve(r);
        r = b - a * x;
    }
    if (!(r.norm() <= 1e-10 * bnorm))
        throw SingularSystem("linear solve residual " + std::to_string(r.norm() / bnorm) +
                             " exceeds 1e-10 relative; the Jacobian is numerically singular");
    return std::vector<double>(x.data(), x.data() + n);
}

std::string linear_backend_version() {
    return "Eigen SparseLU " + std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
           std::to_string(EIGEN_MINOR_VERSION);
}

std::vector<double> linear_solve(const SparseSystem& sys) {
    LinearSolver solver;
    return solver.solve(sys);
}

GridFunction homotopy_rhs_field(const ProblemSpec& prob) {
    const GridFunction u0 = initial_iterate(prob);
    GridFunction psi0(prob.grid);
    for (std::size_t node : prob.grid.interior_nodes()) {
        try {
            psi0[node] = F_value(eta_transform(fd_hessian(u0, node), prob.spec.tau), prob.spec);
        } catch (const NotAdmissible& e) {
            throw NotAdmissible(std::string("subsolution is not admissible: ") + e.what(), e.eigenvalues(),
                                e.failing_sigma(), node);
        }
    }
    return psi0;
}

StageResult newton_stage(const GridFunction& u0, double t, const ProblemSpec& prob, const GridFunction& psi0,
                         LinearSolver& linear, const IterationObserver& observer) {
    constexpr double kMinStep = 0x1p-30;
    const auto& interior = prob.grid.interior_nodes();

    GridFunction u = u0;
    ResidualField res = assemble_residual(u, prob, t, psi0);
    int iter = 0;
    while (res.inf_norm > prob.newton.tol_residual) {
        if (iter >= prob.newton.max_iters)
            throw SolveError("Newton did not converge in " + std::to_string(prob.newton.max_iters) +
                                 " iterations at t = " + std::to_string(t) + " (residual " +
                                 std::to_string(res.inf_norm) + ")",
                             "newton-divergence", "", u, {});

        const SparseSystem sys = assemble_jacobian(u, prob, t, psi0);
        const std::vector<double> delta = linear.solve(sys);

        double step = 1.0;
        GridFunction trial = u;
        ResidualField trial_res;
        for (;;) {
            if (step < kMinStep)
                throw SolveError("line search failed at t = " + std::to_string(t) + " (residual " +
                                     std::to_string(res.inf_norm) + ")",
                                 "line-search-failure", "", u, {});
            for (std::size_t row = 0; row < interior.size(); ++row)
                trial[interior[row]] = u[interior[row]] + step * delta[row];
            try {
                trial_res = assemble_residual(trial, prob, t, psi0);
                if (trial_res.inf_norm <= (1.0 - step / 4.0) * res.inf_norm) break;
            } catch (const NotAdmissible&) {
            } catch (const DomainFault&) {
            }
            step *= 0.5;
        }
        u = std::move(trial);
        res = std::move(trial_res);
        ++iter;
        if (observer) observer(IterationEvent{t, iter, res.inf_norm, step, res.min_margin});
    }
    return StageResult{std::move(u), iter, res.inf_norm, res.min_margin};
}

std::pair<GridFunction, SolveReport> solve_dirichlet(const ProblemSpec& prob, const IterationObserver& observer) {
    const auto started = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    };

    SolveReport report;
    const ProblemCheck check = check_problem(prob);
    report.warnings = check.warnings;
    report.notes = check.notes;

    GridFunction u = initial_iterate(prob);
    const GridFunction psi0 = homotopy_rhs_field(prob);
    LinearSolver linear;

    const ResidualField at_target = assemble_residual(u, prob, 1.0, psi0);
    if (at_target.inf_norm <= prob.newton.tol_residual) {
        report.stages.push_back({1.0, 0, at_target.inf_norm, at_target.min_margin});
    } else {
        const ResidualField at_start = assemble_residual(u, prob, 0.0, psi0);
        report.stages.push_back({0.0, 0, at_start.inf_norm, at_start.min_margin});

        double t = 0.0;
        double dt = prob.homotopy.dt_init;
        while (t < 1.0) {
            const double t_next = (t + dt >= 1.0 - 1e-12) ? 1.0 : t + dt;
            std::string failure;
            std::string failure_message;
            try {
                StageResult stage = newton_stage(u, t_next, prob, psi0, linear, observer);
                u = std::move(stage.u);
                t = t_next;
                report.stages.push_back({t, stage.iterations, stage.residual_inf, stage.min_margin});
                if (stage.iterations <= 3) dt = std::min(2.0 * dt, prob.homotopy.dt_max);
                continue;
            } catch (const SolveError& e) {
                failure = e.kind();
                failure_message = e.what();
            } catch (const SingularSystem& e) {
                failure = e.kind();
                failure_message = e.what();
            }
            ++report.rejected_stages;
            dt *= 0.5;
            if (dt < prob.homotopy.dt_min) {
                report.wall_time = elapsed();
                throw SolveError("continuation stalled at t = " + std::to_string(t) + ": step below dt_min = " +
                                     std::to_string(prob.homotopy.dt_min) + "; last failure: " + failure_message,
                                 "homotopy-stall", failure, u, report);
            }
        }
    }

    report.converged = true;
    report.diagnostics = run_diagnostics(u, prob);
    report.wall_time = elapsed();
    return {std::move(u), std::move(report)};
}

}  // namespace hessquot
