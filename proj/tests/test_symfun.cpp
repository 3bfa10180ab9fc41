#include "doctest.h"

#include <cmath>

#include "hessquot/errors.hpp"
#include "hessquot/symfun.hpp"

using namespace hessquot;
using doctest::Approx;

TEST_CASE("sigma_all examples") {
    const SigmaTable ones = sigma_all(Lambda{1, 1, 1});
    CHECK(ones[0] == 1.0);
    CHECK(ones[1] == 3.0);
    CHECK(ones[2] == 3.0);
    CHECK(ones[3] == 1.0);
    CHECK(ones[4] == 0.0);
    CHECK(ones[-1] == 0.0);

    CHECK(sigma_all(Lambda{1, 2, 3})[2] == 11.0);

    const SigmaTable zero = sigma_all(Lambda{0, 0, 0, 0});
    for (int j = 1; j <= 4; ++j) CHECK(zero[j] == 0.0);
}

TEST_CASE("Lambda rejects bad input") {
    CHECK_THROWS_AS(Lambda({1.0}), InvalidArgument);
    CHECK_THROWS_AS(Lambda({1.0, NAN}), InvalidArgument);
    CHECK_THROWS_AS(Lambda({1.0, INFINITY}), InvalidArgument);
}

TEST_CASE("sigma_partial examples") {
    const Lambda lam{1, 2, 3};
    CHECK(sigma_partial(lam, 2, 0) == 5.0);
    CHECK(sigma_partial(lam, 3, 1) == 3.0);
    const double c = 1.7;
    const Lambda sym{c, c, c, c};
    for (int k = 1; k <= 4; ++k)
        CHECK(sigma_partial(sym, k, 2) == Approx(binomial(3, k - 1) * std::pow(c, k - 1)));
    CHECK_THROWS_AS(sigma_partial(lam, 0, 0), InvalidArgument);
    CHECK_THROWS_AS(sigma_partial(lam, 2, 3), InvalidArgument);
}

TEST_CASE("sigma_second_partial examples") {
    const Lambda lam{1, 2, 3};
    CHECK(sigma_second_partial(lam, 2, 0, 1) == 1.0);
    CHECK(sigma_second_partial(lam, 3, 0, 2) == 2.0);
    CHECK(sigma_second_partial(Lambda{1, 1, 1, 1}, 3, 0, 1) == 2.0);
    CHECK_THROWS_AS(sigma_second_partial(lam, 2, 1, 1), InvalidArgument);
    CHECK_THROWS_AS(sigma_second_partial(lam, 1, 0, 1), InvalidArgument);
}

TEST_CASE("cone membership") {
    CHECK_FALSE(in_gamma_k(Lambda{3, 1, -1}, 2));
    CHECK(in_gamma_k(Lambda{3, 1, -1}, 1));
    CHECK(first_cone_violation(Lambda{3, 1, -1}, 2) == 2);
    for (int k = 1; k <= 5; ++k) CHECK(in_gamma_k(Lambda{1, 1, 1, 1, 1}, k));
    // The cone is open: the boundary is excluded.
    CHECK_FALSE(in_gamma_k(Lambda{1, 0, 0}, 2));
    CHECK(admissibility_margin(sigma_all(Lambda{1, 1, 1}), 3, 3) == Approx(1.0));
    CHECK(admissibility_margin(sigma_all(Lambda{3, 1, -1}), 3, 2) < 0.0);
}

TEST_CASE("QuotientSpec validation") {
    CHECK_NOTHROW(QuotientSpec::make(3, 3, 1, 1.0));
    CHECK_NOTHROW(QuotientSpec::make(2, 2, 0, 1.0));
    CHECK_THROWS_AS(QuotientSpec::make(3, 2, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(QuotientSpec::make(3, 4, 1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(QuotientSpec::make(3, 3, -1, 1.0), InvalidArgument);
    CHECK_THROWS_AS(QuotientSpec::make(3, 3, 1, 0.5), InvalidArgument);
}

TEST_CASE("quotient_value examples") {
    CHECK(quotient_value(Lambda{2, 2, 2}, QuotientSpec::make(3, 3, 1, 1.0)) == Approx(std::sqrt(8.0 / 6.0)));
    CHECK(quotient_value(Lambda{1, 2, 3}, QuotientSpec::make(3, 2, 0, 1.0)) == Approx(std::sqrt(11.0)));
    const double c = 0.7;
    const auto spec = QuotientSpec::make(5, 4, 1, 1.0);
    CHECK(quotient_value(Lambda{c, c, c, c, c}, spec) == Approx(quotient_constant(5, 4, 1) * c));
    CHECK_THROWS_AS(quotient_value(Lambda{3, 1, -1}, QuotientSpec::make(3, 2, 0, 1.0)), NotAdmissible);
}

TEST_CASE("not-admissible carries the eigenvalues") {
    try {
        quotient_value(Lambda{3, 1, -1}, QuotientSpec::make(3, 2, 0, 1.0));
        FAIL("expected NotAdmissible");
    } catch (const NotAdmissible& e) {
        CHECK(e.failing_sigma() == 2);
        REQUIRE(e.eigenvalues().size() == 3);
        CHECK(e.eigenvalues()[2] == -1.0);
    }
}

TEST_CASE("quotient_gradient examples") {
    const Lambda g = quotient_gradient(Lambda{1, 2, 3}, QuotientSpec::make(3, 3, 1, 1.0));
    CHECK(g[0] == Approx(5.0 / 12.0).epsilon(1e-14));
    CHECK(g[1] == Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(g[2] == Approx(1.0 / 12.0).epsilon(1e-14));

    const Lambda g2 = quotient_gradient(Lambda{1, 1, 1}, QuotientSpec::make(3, 2, 0, 1.0));
    for (int i = 0; i < 3; ++i) CHECK(g2[i] == Approx(1.0 / std::sqrt(3.0)));

    const Lambda g3 = quotient_gradient(Lambda{2, 2, 2, 2}, QuotientSpec::make(4, 3, 1, 1.0));
    for (int i = 0; i < 4; ++i) CHECK(g3[i] == Approx(quotient_constant(4, 3, 1) / 4.0));
}

TEST_CASE("quotient_hessian") {
    const auto spec = QuotientSpec::make(4, 4, 1, 1.0);
    const LambdaHessian h = quotient_hessian(Lambda{1.5, 1.5, 1.5, 1.5}, spec);
    for (int i = 0; i < 4; ++i) {
        double row = 0.0;
        for (int j = 0; j < 4; ++j) row += h(i, j) * 1.5;
        CHECK(std::abs(row) < 1e-12);
    }
    // (1,2,3), k=3, l=1 against differences of the gradient.
    const auto s3 = QuotientSpec::make(3, 3, 1, 1.0);
    const Lambda lam{1, 2, 3};
    const LambdaHessian h3 = quotient_hessian(lam, s3);
    for (int j = 0; j < 3; ++j) {
        std::vector<double> p{1, 2, 3}, m{1, 2, 3};
        const double step = 1e-6 * (1.0 + lam[j]);
        p[static_cast<std::size_t>(j)] += step;
        m[static_cast<std::size_t>(j)] -= step;
        const Lambda gp = quotient_gradient(Lambda(p), s3), gm = quotient_gradient(Lambda(m), s3);
        for (int i = 0; i < 3; ++i) CHECK((gp[i] - gm[i]) / (2 * step) == Approx(h3(i, j)).epsilon(1e-5));
    }
}

TEST_CASE("quotient_derivatives accepts l = k - 1") {
    const auto d = quotient_derivatives(Lambda{1, 2, 3}.values(), 2, 1, true);
    CHECK(d.value == Approx(11.0 / 6.0));
}

TEST_CASE("Newton-MacLaurin examples") {
    for (int m = 1; m <= 4; ++m)
        for (int l = 0; l < m; ++l)
            for (int r = 1; r <= m; ++r)
                for (int s = 0; s < r && s <= l; ++s) CHECK(newton_maclaurin_holds(Lambda{1, 1, 1, 1}, m, l, r, s));
    CHECK(newton_maclaurin_holds(Lambda{1, 2, 3}, 3, 1, 2, 0));
    CHECK_THROWS_AS(newton_maclaurin_holds(Lambda{1, 2, 3}, 2, 1, 3, 0), InvalidArgument);
    CHECK_THROWS_AS(newton_maclaurin_holds(Lambda{3, 1, -1}, 2, 0, 1, 0), InvalidArgument);
}

TEST_CASE("sampler") {
    const Lambda a = sample_gamma_k(3, 3, 42);
    CHECK(in_gamma_k(a, 3));
    CHECK(sigma_all(sample_gamma_k(3, 1, 7))[1] > 0.0);
    CHECK(sample_gamma_k(3, 3, 42) == a);
    GammaSampler s(1);
    for (int i = 0; i < 100; ++i) CHECK(in_gamma_k(s.draw(6, 4), 4));
}
