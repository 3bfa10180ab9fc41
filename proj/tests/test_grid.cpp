#include "doctest.h"

#include <cmath>

#include "hessquot/errors.hpp"
#include "hessquot/grid.hpp"

using namespace hessquot;
using doctest::Approx;

TEST_CASE("grid indexing") {
    const Grid g = Grid::unit(3, 5);
    CHECK(g.node_count() == 125);
    CHECK(g.interior_nodes().size() == 27);
    CHECK(g.stride(2) == 1);
    CHECK(g.stride(0) == 25);
    const Index idx{1, 2, 3};
    CHECK(g.multi(g.flat(idx)) == idx);
    CHECK(g.coords(g.flat({4, 4, 4}))[0] == 1.0);
    CHECK_FALSE(g.is_interior(0));
    CHECK(g.interior_row(g.interior_nodes()[5]) == 5);
    CHECK(g.interior_row(0) == -1);
    CHECK_THROWS_AS(Grid::unit(3, 4), InvalidArgument);
    CHECK_THROWS_AS(Grid::unit(4, 5), InvalidArgument);
    const double lo[] = {0, 1}, hi[] = {1, 1};
    CHECK_THROWS_AS(Grid::make(2, lo, hi, 5), InvalidArgument);
}

TEST_CASE("fd_gradient exactness") {
    const double lo[] = {-1, 0.5, 2}, hi[] = {1, 1.5, 3};
    const Grid g = Grid::make(3, lo, hi, 7);
    const GridFunction lin = GridFunction::sample(g, [](const Point& x) { return x[0]; });
    const GridFunction quad =
        GridFunction::sample(g, [](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; });
    for (std::size_t node : g.interior_nodes()) {
        const auto gl = fd_gradient(lin, node);
        CHECK(gl[0] == Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(gl[1]) < 1e-12);
        const auto gq = fd_gradient(quad, node);
        const Point x = g.coords(node);
        for (int a = 0; a < 3; ++a) CHECK(gq[a] == Approx(2 * x[a]).epsilon(1e-12));
    }
    CHECK_THROWS_AS(fd_gradient(lin, 0), InvalidArgument);
}

TEST_CASE("fd_gradient order") {
    auto err = [](int res) {
        const Grid g = Grid::unit(2, res);
        const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::sin(x[0]); });
        double e = 0;
        for (std::size_t node : g.interior_nodes())
            e = std::max(e, std::abs(fd_gradient(u, node)[0] - std::cos(g.coords(node)[0])));
        return e;
    };
    CHECK(err(17) / err(33) == Approx(4.0).epsilon(0.05));
}

TEST_CASE("fd_hessian exactness and order") {
    const Grid g = Grid::unit(3, 6);
    const GridFunction half = GridFunction::sample(g, [](const Point& x) {
        return 0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    });
    const GridFunction cross = GridFunction::sample(g, [](const Point& x) { return x[0] * x[1]; });
    for (std::size_t node : g.interior_nodes()) {
        CHECK((fd_hessian(half, node) - SymMatrix::identity(3)).max_abs() < 1e-10);
        CHECK(fd_hessian(cross, node)(0, 1) == Approx(1.0).epsilon(1e-10));
        CHECK(fd_laplacian(half, node) == Approx(3.0).epsilon(1e-10));
    }
    auto err = [](int res) {
        const Grid g = Grid::unit(2, res);
        const GridFunction u =
            GridFunction::sample(g, [](const Point& x) { return std::sin(x[0]) * std::sin(x[1]); });
        double e = 0;
        for (std::size_t node : g.interior_nodes()) {
            const Point x = g.coords(node);
            const SymMatrix h = fd_hessian(u, node);
            e = std::max(e, std::abs(h(0, 0) + std::sin(x[0]) * std::sin(x[1])));
            e = std::max(e, std::abs(h(0, 1) - std::cos(x[0]) * std::cos(x[1])));
        }
        return e;
    };
    CHECK(err(17) / err(33) == Approx(4.0).epsilon(0.05));
}
