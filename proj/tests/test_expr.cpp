#include "doctest.h"

#include <cmath>

#include "hessquot/errors.hpp"
#include "hessquot/expr.hpp"

using namespace hessquot;
using namespace hessquot::expr;
using doctest::Approx;

namespace {

double eval(const std::string& text, std::vector<double> x, double u, std::vector<double> p) {
    return evaluate(parse(text, static_cast<int>(x.size())), EvalEnv{x, u, p});
}

}  // namespace

TEST_CASE("parse examples") {
    CHECK_NOTHROW(parse("2*x1 + exp(u)", 1));
    CHECK_THROWS_AS(parse("p4", 3), UnknownIdentifier);
    CHECK(parse("x1^2^3", 1) == parse("x1^(2^3)", 1));
    CHECK_FALSE(parse("x1^2^3", 1) == parse("(x1^2)^3", 1));
    CHECK(eval("-x1^2", {3}, 0, {0}) == -9.0);
    CHECK(eval("2^-1", {0}, 0, {0}) == 0.5);
    CHECK(eval("1 - 2 - 3", {0}, 0, {0}) == -4.0);
    CHECK(eval("8 / 4 / 2", {0}, 0, {0}) == 1.0);
    CHECK(eval("1.5e1 + .5", {0}, 0, {0}) == 15.5);
}

TEST_CASE("parse errors carry offsets") {
    try {
        parse("x1 + * 2", 2);
        FAIL("expected ParseError");
    } catch (const UnknownIdentifier&) {
        FAIL("wrong error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 5);
        CHECK_FALSE(e.expected().empty());
        CHECK(std::string(e.kind()) == "syntax-error");
    }
    try {
        parse("x1 + foo", 2);
        FAIL("expected UnknownIdentifier");
    } catch (const UnknownIdentifier& e) {
        CHECK(e.offset() == 5);
        CHECK(e.name() == "foo");
    }
    CHECK_THROWS_AS(parse("(x1", 2), ParseError);
    CHECK_THROWS_AS(parse("", 2), ParseError);
    CHECK_THROWS_AS(parse("x1 x2", 2), ParseError);
    CHECK_THROWS_AS(parse("x0", 2), UnknownIdentifier);
    CHECK_THROWS_AS(parse("x01", 2), UnknownIdentifier);
    CHECK_THROWS_AS(parse("exp", 2), ParseError);
}

TEST_CASE("evaluate examples") {
    CHECK(eval("x1*x2", {2, 3}, 0, {0, 0}) == 6.0);
    CHECK_THROWS_AS(eval("log(u)", {0, 0}, 0, {0, 0}), DomainFault);
    CHECK(eval("sqrt(p1^2+p2^2)", {0, 0}, 0, {3, 4}) == 5.0);
    CHECK_THROWS_AS(eval("sqrt(u)", {0}, -1, {0}), DomainFault);
    CHECK_THROWS_AS(eval("1/u", {0}, 0, {0}), DomainFault);
    CHECK_THROWS_AS(eval("u^0.5", {0}, -1, {0}), DomainFault);
    CHECK(eval("u^3", {0}, -2, {0}) == -8.0);
    CHECK_THROWS_AS(eval("exp(u)", {0}, 1000, {0}), DomainFault);
    try {
        eval("1 + log(x1 - 1)", {1}, 0, {0});
        FAIL("expected DomainFault");
    } catch (const DomainFault& e) {
        CHECK(e.subexpression().find("log") != std::string::npos);
    }
}

TEST_CASE("differentiate examples") {
    CHECK(to_string(differentiate(parse("u^2", 1), Variable::u())) == "2*u");
    CHECK(differentiate(parse("exp(u)*p1", 1), Variable::p(0)) == parse("exp(u)", 1));
    CHECK(differentiate(parse("x1 + 3", 2), Variable::x(1)).is_literal());
    CHECK(differentiate(parse("x1 + 3", 2), Variable::x(1)).literal_value() == 0.0);
    const Expr d = differentiate(parse("x1^x2", 2), Variable::x(1));
    std::vector<double> x{2.0, 3.0}, p{0, 0};
    CHECK(evaluate(d, EvalEnv{x, 0, p}) == Approx(8.0 * std::log(2.0)));
    CHECK(depends_on(parse("sin(p2)*x1", 2), Variable::p(1)));
    CHECK_FALSE(depends_on(parse("sin(p2)*x1", 2), Variable::u()));
}

TEST_CASE("print and re-parse is idempotent") {
    const char* samples[] = {"-x1^2", "(x1-x2)-(u-p1)", "x1/(x2*u)", "2^(3^x1)", "(2^3)^x1", "-(x1+x2)*3",
                             "exp(-u)*sqrt(p1^2+1e-3)", "x1-(-x2)", "1/(2/x1)", "(-2)^2", "1.25e-7*x1"};
    for (const char* s : samples) {
        const Expr e = parse(s, 2);
        const Expr again = parse(to_string(e), 2);
        CHECK_MESSAGE(again == e, s << " -> " << to_string(e));
        CHECK(to_string(again) == to_string(e));
    }
}
