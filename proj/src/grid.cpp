#include "hessquot/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessquot/errors.hpp"

namespace hessquot {

Grid Grid::make(int n, std::span<const double> lo, std::span<const double> hi, int res) {
    if (n != 2 && n != 3) throw InvalidArgument("grid dimension must be 2 or 3, got " + std::to_string(n));
    if (lo.size() != static_cast<std::size_t>(n) || hi.size() != static_cast<std::size_t>(n))
        throw InvalidArgument("grid corners must have n entries");
    if (res < 5) throw InvalidArgument("grid resolution must be >= 5 nodes per axis, got " + std::to_string(res));

    Grid g;
    g.n_ = n;
    g.res_ = res;
    for (int a = 0; a < n; ++a) {
        if (!(std::isfinite(lo[a]) && std::isfinite(hi[a]) && lo[a] < hi[a]))
            throw InvalidArgument("grid corners must be finite with lo < hi on every axis");
        g.lo_[a] = lo[a];
        g.hi_[a] = hi[a];
        g.h_[a] = (hi[a] - lo[a]) / (res - 1);
    }
    std::size_t stride = 1;
    for (int a = n - 1; a >= 0; --a) {
        g.strides_[static_cast<std::size_t>(a)] = stride;
        stride *= static_cast<std::size_t>(res);
    }
    g.count_ = stride;

    g.rows_.assign(g.count_, -1);
    for (std::size_t node = 0; node < g.count_; ++node) {
        if (g.is_interior(node)) {
            g.rows_[node] = static_cast<long>(g.interior_.size());
            g.interior_.push_back(node);
        }
    }
    return g;
}

Grid Grid::unit(int n, int res) {
    const std::array<double, 3> lo{0.0, 0.0, 0.0};
    const std::array<double, 3> hi{1.0, 1.0, 1.0};
    return make(n, std::span(lo).first(static_cast<std::size_t>(n)), std::span(hi).first(static_cast<std::size_t>(n)),
                res);
}

std::size_t Grid::flat(const Index& idx) const {
    std::size_t f = 0;
    for (int a = 0; a < n_; ++a) f += static_cast<std::size_t>(idx[a]) * strides_[a];
    return f;
}

Index Grid::multi(std::size_t node) const {
    Index idx{};
    for (int a = 0; a < n_; ++a) {
        idx[a] = static_cast<int>(node / strides_[a]);
        node %= strides_[a];
    }
    return idx;
}

Point Grid::coords(std::size_t node) const {
    const Index idx = multi(node);
    Point x{};
    for (int a = 0; a < n_; ++a) x[a] = (idx[a] == res_ - 1) ? hi_[a] : lo_[a] + idx[a] * h_[a];
    return x;
}

bool Grid::is_interior(std::size_t node) const {
    const Index idx = multi(node);
    for (int a = 0; a < n_; ++a)
        if (idx[a] < 1 || idx[a] > res_ - 2) return false;
    return true;
}

GridFunction::GridFunction(Grid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.node_count()) throw InvalidArgument("grid function needs one value per node");
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const Point&)>& f) {
    GridFunction out(g);
    for (std::size_t node = 0; node < g.node_count(); ++node) out.values[node] = f(g.coords(node));
    return out;
}

double GridFunction::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void require_interior(const Grid& g, std::size_t node, const char* what) {
    if (node >= g.node_count() || !g.is_interior(node))
        throw InvalidArgument(std::string(what) + ": node " + std::to_string(node) + " is not an interior node");
}

}  // namespace

std::array<double, 3> fd_gradient(const GridFunction& u, std::size_t node) {
    const Grid& g = u.grid;
    require_interior(g, node, "fd_gradient");
    std::array<double, 3> grad{};
    for (int a = 0; a < g.dim(); ++a) {
        const std::size_t s = g.stride(a);
        grad[a] = (u[node + s] - u[node - s]) / (2.0 * g.spacing(a));
    }
    return grad;
}

SymMatrix fd_hessian(const GridFunction& u, std::size_t node) {
    const Grid& g = u.grid;
    require_interior(g, node, "fd_hessian");
    const int n = g.dim();
    SymMatrix hess(n);
    const double c = u[node];
    for (int i = 0; i < n; ++i) {
        const std::size_t si = g.stride(i);
        const double hi = g.spacing(i);
        hess.set(i, i, (u[node + si] - 2.0 * c + u[node - si]) / (hi * hi));
        for (int j = i + 1; j < n; ++j) {
            const std::size_t sj = g.stride(j);
            const double cross =
                (u[node + si + sj] - u[node + si - sj]) - (u[node - si + sj] - u[node - si - sj]);
            hess.set(i, j, cross / (4.0 * hi * g.spacing(j)));
        }
    }
    return hess;
}

double fd_laplacian(const GridFunction& u, std::size_t node) { return fd_hessian(u, node).trace(); }

}  // namespace hessquot
