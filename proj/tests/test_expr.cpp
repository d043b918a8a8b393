#include "doctest.h"

#include "chaincalc/errors.hpp"
#include "chaincalc/expr.hpp"

#include <cmath>

using namespace chaincalc;

namespace {

double ev(const std::string& text, std::vector<double> coords = {}) {
    return Expression::parse(text).eval(coords);
}

template <typename Fn> std::string code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

} // namespace

TEST_CASE("precedence and associativity") {
    CHECK(ev("1+2*3") == 7.0);
    CHECK(ev("(1+2)*3") == 9.0);
    CHECK(ev("2^3^2") == 512.0); // right associative
    CHECK(ev("-2^2") == -4.0);   // the minus binds outside the power
    CHECK(ev("2*-3") == -6.0);
    CHECK(ev("10-4-3") == 3.0); // left associative
    CHECK(ev("8/4/2") == 1.0);
    CHECK(ev(" 1 + 2 ") == 3.0);
    CHECK(ev("1e-3") == 0.001);
    CHECK(ev("2^-1") == 0.5);
}

TEST_CASE("variables and aliases") {
    CHECK(ev("x", {5.0}) == 5.0);
    CHECK(ev("x1 + 2*x0", {1.0, 10.0}) == 12.0);
    CHECK(ev("x + y + z", {1.0, 2.0, 3.0}) == 6.0);
    CHECK(Expression::parse("x1 + 2*x0").arity() == 2);
    CHECK(Expression::parse("3.5").arity() == 0);
    CHECK(Expression::parse("min(x, x3)").arity() == 4);
    CHECK(Expression::parse("x*(1-x)").eval1(0.25) == 0.1875);
}

TEST_CASE("functions and constants") {
    CHECK(ev("min(3, x)", {7.0}) == 3.0);
    CHECK(ev("max(3, x)", {7.0}) == 7.0);
    CHECK(ev("pow(2, 10)") == 1024.0);
    CHECK(ev("abs(-3.5)") == 3.5);
    CHECK(ev("sqrt(x)*sqrt(x)", {16.0}) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(ev("floor(2.7) + ceil(2.2)") == 5.0);
    CHECK(ev("cos(0) + sin(0)") == 1.0);
    CHECK(ev("log(e)") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ev("pi") == doctest::Approx(3.14159265358979).epsilon(1e-12));
    CHECK(std::isinf(ev("inf")));
    CHECK(std::isinf(ev("1/0")));
}

TEST_CASE("parse and arity failures") {
    CHECK(code_of([] { Expression::parse(""); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("1 +"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("foo(2)"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("min(1)"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("2 3"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse(")"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("x(3)"); }) == "ConfigParse");
    CHECK(code_of([] { Expression::parse("(1+2"); }) == "ConfigParse");
    CHECK(code_of([] { ev("x2", {1.0}); }) == "ConfigParse");
}
