#pragma once

// Post-solve checks of the discrete maximum principle, the comparison with the
// subsolution, admissibility and the sign hypotheses on psi.

#include <cstddef>

#include "hessquot/grid.hpp"
#include "hessquot/problem.hpp"

namespace hessquot {

/// A boolean verdict with the node and value that decided it.
struct DiagnosticCheck {
    bool ok = true;
    bool skipped = false;
    std::size_t node = 0;
    double value = 0.0;
};

struct DiagnosticsReport {
    /// value: max_nodes u - max_boundary phi; ok when <= 1e-8 (1 + ||u||_inf).
    DiagnosticCheck max_principle;
    /// value: min_nodes (u - subsolution); ok when >= -1e-6 (1 + ||u||_inf).
    /// Skipped unless psi_z > 0 holds at every probed state.
    DiagnosticCheck comparison;
    /// value: min_nodes min_j sigma_j(lambda[U]) / C(n, j); ok when > 0.
    DiagnosticCheck admissibility;
    /// value: min_nodes discrete Laplacian; ok when > 0.
    DiagnosticCheck laplacian;
    /// value: min psi over the solution states.
    DiagnosticCheck psi_positive;
    /// value: min psi_z; skipped for field forcing.
    DiagnosticCheck psi_z_positive;

    /// True when every non-skipped check passed.
    bool all_ok() const;
};

/// Never throws on a boundary-correct u: inadmissible nodes are reported through `admissibility`.
DiagnosticsReport run_diagnostics(const GridFunction& u, const ProblemSpec& prob);

}  // namespace hessquot
