#include <doctest.h>

#include <cmath>

#include "vhs/error.hpp"
#include "vhs/expression.hpp"

using vhs::Expression;

TEST_CASE("arithmetic precedence and associativity") {
  CHECK(Expression::parse("1 + 2 * 3").evaluate() == doctest::Approx(7.0));
  CHECK(Expression::parse("(1 + 2) * 3").evaluate() == doctest::Approx(9.0));
  CHECK(Expression::parse("2 ^ 3 ^ 2").evaluate() == doctest::Approx(512.0));
  CHECK(Expression::parse("-2 ^ 2").evaluate() == doctest::Approx(-4.0));
  CHECK(Expression::parse("8 / 4 / 2").evaluate() == doctest::Approx(1.0));
  CHECK(Expression::parse("1e-3 * 2").evaluate() == doctest::Approx(0.002));
}

TEST_CASE("unicode operators match their ASCII forms") {
  CHECK(Expression::parse("6 × 7").evaluate() == doctest::Approx(42.0));
  CHECK(Expression::parse("6 ÷ 4").evaluate() == doctest::Approx(1.5));
  CHECK(Expression::parse("−pi/2").evaluate() == doctest::Approx(-M_PI / 2));
}

TEST_CASE("functions and variables") {
  const Expression p = Expression::parse("-ln(x)/x");
  CHECK(p(0.5) == doctest::Approx(-std::log(0.5) / 0.5));
  CHECK(Expression::parse("exp(0) + sqrt(16)").evaluate() == doctest::Approx(5.0));
  const Expression e = Expression::parse("-W_s/2 + D_ub");
  CHECK(e.variables() == std::vector<std::string>{"D_ub", "W_s"});
  CHECK(e.evaluate({{"W_s", 0.357}, {"D_ub", 0.3465}}) == doctest::Approx(0.168));
}

TEST_CASE("unbound symbol names the symbol") {
  try {
    Expression::parse("R_ua + 1").evaluate();
    FAIL("expected ConfigError");
  } catch (const vhs::ConfigError& err) {
    CHECK(std::string(err.what()).find("R_ua") != std::string::npos);
  }
}

TEST_CASE("parse errors report the column") {
  auto position_of = [](const char* text) -> std::size_t {
    try {
      Expression::parse(text);
    } catch (const vhs::ExpressionParseError& e) {
      return e.position();
    }
    return 0;
  };
  CHECK(position_of("1 + ") == 5);
  CHECK(position_of("2 * (3") == 7);
  CHECK(position_of("x $ 2") == 3);
  CHECK(position_of("foo(1)") == 1);
  CHECK(position_of("1 2") == 3);
}
