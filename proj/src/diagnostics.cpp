#include "hessquot/diagnostics.hpp"

#include <cmath>

#include "hessquot/errors.hpp"
#include "hessquot/spectral.hpp"

namespace hessquot {

bool DiagnosticsReport::all_ok() const {
    for (const DiagnosticCheck* c : {&max_principle, &comparison, &admissibility, &laplacian, &psi_positive,
                                     &psi_z_positive})
        if (!c->skipped && !c->ok) return false;
    return true;
}

DiagnosticsReport run_diagnostics(const GridFunction& u, const ProblemSpec& prob) {
    const Grid& g = u.grid;
    const int n = g.dim();
    const double scale = 1.0 + u.max_abs();
    DiagnosticsReport rep;

    // Maximum principle: the largest value sits on the boundary.
    double max_u = -INFINITY, max_phi = -INFINITY;
    std::size_t argmax = 0;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        if (u[node] > max_u) {
            max_u = u[node];
            argmax = node;
        }
        if (!g.is_interior(node)) max_phi = std::max(max_phi, eval_at(prob.phi, g.coords(node), n));
    }
    rep.max_principle.node = argmax;
    rep.max_principle.value = max_u - max_phi;
    rep.max_principle.ok = rep.max_principle.value <= 1e-8 * scale;

    rep.admissibility.value = INFINITY;
    rep.laplacian.value = INFINITY;
    rep.psi_positive.value = INFINITY;
    rep.psi_z_positive.value = INFINITY;
    rep.psi_z_positive.skipped = prob.psi.is_field();
    for (std::size_t node : g.interior_nodes()) {
        const SymMatrix hess = fd_hessian(u, node);
        const double lap = hess.trace();
        if (lap < rep.laplacian.value) {
            rep.laplacian.value = lap;
            rep.laplacian.node = node;
        }
        const auto eig = sym_eig(eta_transform(hess, prob.spec.tau));
        const double margin = admissibility_margin(sigma_all(eig.eigenvalues), n, prob.spec.k);
        if (margin < rep.admissibility.value) {
            rep.admissibility.value = margin;
            rep.admissibility.node = node;
        }
        try {
            const ForcingSample s = prob.psi.eval(node, g.coords(node), u[node], fd_gradient(u, node), true);
            if (s.value < rep.psi_positive.value) {
                rep.psi_positive.value = s.value;
                rep.psi_positive.node = node;
            }
            if (!prob.psi.is_field() && s.dz < rep.psi_z_positive.value) {
                rep.psi_z_positive.value = s.dz;
                rep.psi_z_positive.node = node;
            }
        } catch (const DomainFault&) {
            rep.psi_positive.value = NAN;
            rep.psi_positive.node = node;
            break;
        }
    }
    rep.admissibility.ok = rep.admissibility.value > 0.0;
    rep.laplacian.ok = rep.laplacian.value > 0.0;
    rep.psi_positive.ok = rep.psi_positive.value > 0.0;
    rep.psi_z_positive.ok = rep.psi_z_positive.skipped || rep.psi_z_positive.value > 0.0;

    // Comparison with the subsolution needs psi_z > 0.
    rep.comparison.skipped = rep.psi_z_positive.skipped || !rep.psi_z_positive.ok;
    rep.comparison.value = INFINITY;
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        const double below = u[node] - eval_at(prob.subsolution, g.coords(node), n);
        if (below < rep.comparison.value) {
            rep.comparison.value = below;
            rep.comparison.node = node;
        }
    }
    rep.comparison.ok = rep.comparison.value >= -1e-6 * scale;
    return rep;
}

}  // namespace hessquot
