#include "hessquot/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "hessquot/errors.hpp"
#include "hessquot/spectral.hpp"

namespace hessquot {

namespace {

struct NodeLinearization {
    OperatorLinearization op;
    ForcingSample psi;
    double residual = 0.0;
};

void require_matching(const GridFunction& u, const ProblemSpec& prob, const GridFunction& psi0) {
    if (!(u.grid == prob.grid) || !(psi0.grid == prob.grid))
        throw InvalidArgument("assembly: grid functions do not live on the problem grid");
}

NodeLinearization linearize_node(const GridFunction& u, const ProblemSpec& prob, double t, const GridFunction& psi0,
                                 std::size_t node, bool with_partials) {
    const Grid& g = u.grid;
    NodeLinearization out;
    try {
        out.op = linearize(fd_hessian(u, node), prob.spec);
    } catch (const NotAdmissible& e) {
        const Index idx = g.multi(node);
        std::string where = "(";
        for (int a = 0; a < g.dim(); ++a) where += (a ? "," : "") + std::to_string(idx[a]);
        throw NotAdmissible("iterate leaves Gamma_k at node " + where + ": " + e.what(), e.eigenvalues(),
                            e.failing_sigma(), node);
    }
    double forcing = (1.0 - t) * psi0[node];
    if (t != 0.0) {
        out.psi = prob.psi.eval(node, g.coords(node), u[node], fd_gradient(u, node), with_partials);
        forcing += t * out.psi.value;
    }
    out.residual = out.op.value - forcing;
    return out;
}

}  // namespace

std::vector<double> SparseSystem::multiply(const std::vector<double>& x) const {
    std::vector<double> y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += vals[k] * x[cols[k]];
        y[r] = s;
    }
    return y;
}

ResidualField assemble_residual(const GridFunction& u, const ProblemSpec& prob, double t, const GridFunction& psi0) {
    require_matching(u, prob, psi0);
    const auto& interior = prob.grid.interior_nodes();
    ResidualField out;
    out.values.resize(interior.size());
    out.min_margin = INFINITY;
    for (std::size_t row = 0; row < interior.size(); ++row) {
        const std::size_t node = interior[row];
        const NodeLinearization lin = linearize_node(u, prob, t, psi0, node, false);
        out.values[row] = lin.residual;
        out.inf_norm = std::max(out.inf_norm, std::abs(lin.residual));
        if (lin.op.margin < out.min_margin) {
            out.min_margin = lin.op.margin;
            out.min_margin_node = node;
        }
    }
    return out;
}

SparseSystem assemble_jacobian(const GridFunction& u, const ProblemSpec& prob, double t, const GridFunction& psi0) {
    require_matching(u, prob, psi0);
    const Grid& g = prob.grid;
    const int n = g.dim();
    const auto& interior = g.interior_nodes();

    SparseSystem sys;
    sys.rows = interior.size();
    sys.row_ptr.reserve(sys.rows + 1);
    sys.row_ptr.push_back(0);
    sys.rhs.resize(sys.rows);

    std::vector<std::pair<std::size_t, double>> entries;
    entries.reserve(32);
    for (std::size_t row = 0; row < interior.size(); ++row) {
        const std::size_t node = interior[row];
        const NodeLinearization lin = linearize_node(u, prob, t, psi0, node, true);
        sys.rhs[row] = -lin.residual;
        const SymMatrix& q = lin.op.q_gradient;

        entries.clear();
        auto add = [&](std::size_t col, double w) { entries.emplace_back(col, w); };
        add(node, -t * lin.psi.dz);
        for (int i = 0; i < n; ++i) {
            const std::size_t si = g.stride(i);
            const double hi = g.spacing(i);
            const double wd = q(i, i) / (hi * hi);
            add(node + si, wd);
            add(node - si, wd);
            add(node, -2.0 * wd);

            const double wg = t * lin.psi.dp[static_cast<std::size_t>(i)] / (2.0 * hi);
            add(node + si, -wg);
            add(node - si, wg);

            for (int j = i + 1; j < n; ++j) {
                const std::size_t sj = g.stride(j);
                // Q^{ij} and Q^{ji} both multiply the same cross difference.
                const double wc = 2.0 * q(i, j) / (4.0 * hi * g.spacing(j));
                add(node + si + sj, wc);
                add(node + si - sj, -wc);
                add(node - si + sj, -wc);
                add(node - si - sj, wc);
            }
        }

        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::size_t k = 0;
        while (k < entries.size()) {
            const std::size_t col_node = entries[k].first;
            double w = 0.0;
            while (k < entries.size() && entries[k].first == col_node) w += entries[k++].second;
            const long col = g.interior_row(col_node);
            if (col < 0) continue;
            sys.cols.push_back(static_cast<std::size_t>(col));
            sys.vals.push_back(w);
        }
        sys.row_ptr.push_back(sys.cols.size());
    }
    return sys;
}

}  // namespace hessquot
