#pragma once

// Discrete residual of the continuation family
//   R_p(u; t) = F(T(D_h^2 u)(p)) - [t psi(x_p, u_p, D_h u(p)) + (1 - t) psi0_p]
// over interior nodes, and its sparse Jacobian.

#include <cstddef>
#include <vector>

#include "hessquot/grid.hpp"
#include "hessquot/problem.hpp"

namespace hessquot {

/// Residual values indexed by interior row (Grid::interior_row).
struct ResidualField {
    std::vector<double> values;
    double inf_norm = 0.0;
    double min_margin = 0.0;   // min over nodes of min_j sigma_j(lambda[U]) / C(n, j)
    std::size_t min_margin_node = 0;
};

/// Compressed-row matrix over interior rows/columns plus a right-hand side.
struct SparseSystem {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;
    std::vector<double> vals;
    std::vector<double> rhs;

    std::vector<double> multiply(const std::vector<double>& x) const;
    std::size_t row_nonzeros(std::size_t row) const { return row_ptr[row + 1] - row_ptr[row]; }
};

/// psi0 holds F(U[subsolution]) at interior nodes (boundary entries unused).
/// Throws NotAdmissible carrying the node and lambda[U] if any interior node leaves Gamma_k.
ResidualField assemble_residual(const GridFunction& u, const ProblemSpec& prob, double t, const GridFunction& psi0);

/// dR_p/du_q = sum_ij Q^{ij}(p) H^{ij}_{pq} - t psi_z(p) delta_pq - t sum_i psi_{p_i}(p) G^i_{pq}.
/// Boundary columns are dropped: Newton corrections vanish on the boundary where u = phi is fixed.
/// rhs = -R(u; t).
SparseSystem assemble_jacobian(const GridFunction& u, const ProblemSpec& prob, double t, const GridFunction& psi0);

}  // namespace hessquot
