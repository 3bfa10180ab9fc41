#pragma once

// Uniform box grids in 2 or 3 dimensions with an explicit boundary layer,
// central finite-difference stencils and grid-valued fields.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "hessquot/spectral.hpp"

namespace hessquot {

using Point = std::array<double, 3>;   // first `n` entries used
using Index = std::array<int, 3>;      // first `n` entries used

class Grid {
public:
    Grid() = default;

    /// n in {2, 3}, lo < hi componentwise, res >= 5 nodes per axis (boundary included).
    static Grid make(int n, std::span<const double> lo, std::span<const double> hi, int res);
    /// The unit box [0,1]^n.
    static Grid unit(int n, int res);

    int dim() const noexcept { return n_; }
    int resolution() const noexcept { return res_; }
    double lo(int axis) const { return lo_[static_cast<std::size_t>(axis)]; }
    double hi(int axis) const { return hi_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return h_[static_cast<std::size_t>(axis)]; }

    std::size_t node_count() const noexcept { return count_; }
    /// Row-major: the last axis varies fastest.
    std::size_t flat(const Index& idx) const;
    Index multi(std::size_t node) const;
    Point coords(std::size_t node) const;
    /// Flat offset of one step along `axis`.
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    bool is_interior(std::size_t node) const;
    /// Interior nodes in ascending flat order.
    const std::vector<std::size_t>& interior_nodes() const noexcept { return interior_; }
    /// Row of an interior node in interior_nodes(), or -1 for boundary nodes.
    long interior_row(std::size_t node) const { return rows_[node]; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.n_ == b.n_ && a.res_ == b.res_ && a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    int n_ = 0;
    int res_ = 0;
    Point lo_{};
    Point hi_{};
    Point h_{};
    std::array<std::size_t, 3> strides_{};
    std::size_t count_ = 0;
    std::vector<std::size_t> interior_;
    std::vector<long> rows_;
};

/// One value per grid node.
struct GridFunction {
    Grid grid;
    std::vector<double> values;

    explicit GridFunction(Grid g) : grid(std::move(g)), values(grid.node_count(), 0.0) {}
    GridFunction(Grid g, std::vector<double> v);

    static GridFunction sample(const Grid& g, const std::function<double(const Point&)>& f);

    double operator[](std::size_t node) const { return values[node]; }
    double& operator[](std::size_t node) { return values[node]; }
    double max_abs() const;
};

/// Central differences (u(+e_i) - u(-e_i)) / (2 h_i). Throws InvalidArgument on boundary nodes.
std::array<double, 3> fd_gradient(const GridFunction& u, std::size_t node);

/// 3-point second differences on the diagonal, 4-point cross for mixed entries.
/// Throws InvalidArgument on boundary nodes.
SymMatrix fd_hessian(const GridFunction& u, std::size_t node);

/// Sum of the diagonal second differences at an interior node.
double fd_laplacian(const GridFunction& u, std::size_t node);

}  // namespace hessquot
