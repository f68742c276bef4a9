#include <doctest.h>

#include <cmath>

#include "ddfem/error.hpp"
#include "ddfem/expression.hpp"

using namespace ddfem;

namespace {

double eval(const char* src, double t = 0.0, Point x = make_point({0.3, -0.7})) {
  Expression::Env env;
  env.t = t;
  env.x = &x;
  return Expression::parse(src).evaluate_scalar(env);
}

ErrorCode parse_error_code(const char* src) {
  try {
    Expression::parse(src);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;  // sentinel: no error
}

}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(eval("1 + 2 * 3") == 7.0);
  CHECK(eval("(1 + 2) * 3") == 9.0);
  CHECK(eval("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval("-2 ^ 2") == -4.0);
  CHECK(eval("1 / 4 - 1") == -0.75);
  CHECK(eval("1e-3 * 2") == doctest::Approx(2e-3));
  CHECK(eval("pi") == doctest::Approx(M_PI));
}

TEST_CASE("variables and functions") {
  const Point x = make_point({0.3, -0.7});
  CHECK(eval("x[0] + 2 * x[1]", 0.0, x) == doctest::Approx(0.3 - 1.4));
  CHECK(eval("t * 2", 1.5) == 3.0);
  CHECK(eval("dot(x, x)", 0.0, x) == doctest::Approx(0.58));
  CHECK(eval("norm(x - [0.3, 0.3])", 0.0, x) == doctest::Approx(1.0));
  CHECK(eval("sin(0.5) + cos(0.5) + tanh(0.2) + sqrt(2) + exp(1) + log(2) + abs(-3)") ==
        doctest::Approx(std::sin(0.5) + std::cos(0.5) + std::tanh(0.2) + std::sqrt(2.0) + std::exp(1.0) +
                        std::log(2.0) + 3.0));
  CHECK(eval("min(1, 2) + max(1, 2) + pow(2, 10) + atan2(1, 1)") ==
        doctest::Approx(3.0 + 1024.0 + M_PI / 4));
}

TEST_CASE("comparisons give 0 or 1") {
  CHECK(eval("1 < 2") == 1.0);
  CHECK(eval("2 <= 1") == 0.0);
  CHECK(eval("(t < 10) * 5", 3.0) == 5.0);
  CHECK(eval("(t < 10) * 5", 12.0) == 0.0);
  CHECK(eval("1 == 1") == 1.0);
  CHECK(eval("1 != 1") == 0.0);
}

TEST_CASE("vector values and broadcasting") {
  const Point x = make_point({1.0, 2.0});
  Expression::Env env;
  env.x = &x;
  const auto v = Expression::parse("3 * [x[1], -x[0]]").evaluate(env);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == 6.0);
  CHECK(v[1] == -3.0);
  const State s = Expression::parse("2").evaluate_state(env, 3);
  CHECK(s == State::Constant(3, 2.0));
  CHECK_THROWS_AS(Expression::parse("[1, 2]").evaluate_state(env, 3), Error);
  CHECK_THROWS_AS(Expression::parse("[1, 2] + [1, 2, 3]").evaluate(env), Error);
}

TEST_CASE("state, gradient and normal") {
  const Point x = make_point({0.0, 0.0});
  const Point n = make_point({0.0, 1.0});
  const State U = make_state({2.0, 5.0});
  Flux DU(2, 2);
  DU << 1, 2, 3, 4;
  Expression::Env env;
  env.x = &x;
  env.U = &U;
  env.DU = &DU;
  env.n = &n;
  CHECK(Expression::parse("U[1] * DU[1][0] + n[1]").evaluate_scalar(env) == 16.0);
  const auto e = Expression::parse("U[0] * x[0]");
  CHECK(e.uses("U"));
  CHECK(e.uses("x"));
  CHECK_FALSE(e.uses("t"));
  Expression::Env bare;
  bare.x = &x;
  CHECK_THROWS_AS(e.evaluate(bare), Error);
}

TEST_CASE("parse errors") {
  for (const char* bad : {"1 +", "sin(1, 2)", "foo(1)", "y + 1", "(1", "[1, 2", "DU[0]", "1 $ 2", ""}) {
    CAPTURE(bad);
    CHECK(parse_error_code(bad) == ErrorCode::kParse);
  }
  try {
    Expression::parse("1 + bogus");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("index out of range is an evaluation error") {
  const Point x = make_point({1.0, 2.0});
  Expression::Env env;
  env.x = &x;
  CHECK_THROWS_AS(Expression::parse("x[2]").evaluate(env), Error);
  CHECK_THROWS_AS(Expression::parse("x").evaluate_scalar(env), Error);
}
