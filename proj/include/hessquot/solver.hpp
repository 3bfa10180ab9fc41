#pragma once

// Continuation method for the Dirichlet problem: march t from 0 to 1 along
//   F(U[u]) = t psi(x, u, grad u) + (1 - t) F(U[subsolution]),
// starting from the subsolution (the exact solution at t = 0) and solving every
// stage with a damped Newton iteration that keeps all iterates admissible.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hessquot/assembly.hpp"
#include "hessquot/diagnostics.hpp"
#include "hessquot/errors.hpp"
#include "hessquot/problem.hpp"

namespace hessquot {

struct StageRecord {
    double t = 0.0;
    int newton_iters = 0;
    double final_residual_inf = 0.0;
    double min_admissibility_margin = 0.0;
};

struct SolveReport {
    std::vector<StageRecord> stages;   // strictly increasing t
    bool converged = false;
    DiagnosticsReport diagnostics;
    std::vector<std::string> warnings;
    std::vector<std::string> notes;
    int rejected_stages = 0;
    double wall_time = 0.0;            // seconds
};

/// One accepted Newton step, reported to an optional observer (used for logging).
struct IterationEvent {
    double t = 0.0;
    int iter = 0;
    double residual_inf = 0.0;
    double step = 0.0;
    double min_margin = 0.0;
};
using IterationObserver = std::function<void(const IterationEvent&)>;

/// Raised by solve_dirichlet / newton_stage; carries the last iterate and the report so far.
class SolveError : public Error {
public:
    SolveError(const std::string& what, std::string kind, std::string cause, GridFunction last, SolveReport report)
        : Error(what), kind_(std::move(kind)), cause_(std::move(cause)),
          last_(std::make_shared<GridFunction>(std::move(last))),
          report_(std::make_shared<SolveReport>(std::move(report))) {}

    /// "homotopy-stall", "newton-divergence" or "line-search-failure".
    const char* kind() const noexcept override { return kind_.c_str(); }
    /// Kind of the last stage failure behind a homotopy stall.
    const std::string& cause() const noexcept { return cause_; }
    const GridFunction& last_iterate() const noexcept { return *last_; }
    const SolveReport& report() const noexcept { return *report_; }

private:
    std::string kind_;
    std::string cause_;
    std::shared_ptr<GridFunction> last_;
    std::shared_ptr<SolveReport> report_;
};

/// Direct sparse LU with partial pivoting. The symbolic analysis is reused while the
/// sparsity pattern stays fixed (it does along a solve).
class LinearSolver {
public:
    LinearSolver();
    ~LinearSolver();
    LinearSolver(const LinearSolver&) = delete;
    LinearSolver& operator=(const LinearSolver&) = delete;

    /// Returns delta with ||A delta - b|| <= 1e-10 ||b|| (up to two refinement sweeps).
    /// Throws SingularSystem when the factorization fails or the bound cannot be met.
    std::vector<double> solve(const SparseSystem& sys);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Name and version of the sparse direct solver backend, e.g. "Eigen SparseLU 3.4.0".
std::string linear_backend_version();

/// Stateless convenience wrapper around LinearSolver.
std::vector<double> linear_solve(const SparseSystem& sys);

/// psi0 = F(U[initial_iterate(prob)]) at interior nodes; 0 on the boundary.
GridFunction homotopy_rhs_field(const ProblemSpec& prob);

struct StageResult {
    GridFunction u;
    int iterations = 0;
    double residual_inf = 0.0;
    double min_margin = 0.0;
};

/// Damped Newton at fixed t. Accepts the largest s in {1, 1/2, 1/4, ...} keeping every interior node
/// in Gamma_k and reducing ||R||_inf by a factor <= 1 - s/4. Throws SolveError with kind
/// "line-search-failure" (s < 2^-30) or "newton-divergence" (max_iters exceeded).
StageResult newton_stage(const GridFunction& u0, double t, const ProblemSpec& prob, const GridFunction& psi0,
                         LinearSolver& linear, const IterationObserver& observer = {});

/// Full continuation solve. Runs check_problem first (its exceptions propagate) and
/// run_diagnostics on the converged solution. Throws SolveError on failure.
std::pair<GridFunction, SolveReport> solve_dirichlet(const ProblemSpec& prob, const IterationObserver& observer = {});

}  // namespace hessquot
