#include <doctest.h>

#include <cfloat>
#include <cmath>
#include <numbers>

#include "rkhs/bigfloat.hpp"
#include "rkhs/error.hpp"
#include "rkhs/expression.hpp"
#include "support.hpp"

using namespace rkhs;

TEST_CASE("epsilon matches the double spacing at 53 bits") {
    CHECK(BigFloat::epsilon(53).to_double() == DBL_EPSILON);
    CHECK(BigFloat::power_of_two(-10).to_double() == 1.0 / 1024.0);
}

TEST_CASE("decimal text round-trips at the stored precision") {
    testing::for_all(200, 11, [](testing::Rng& rng, int) {
        const double x = std::ldexp(rng.uniform(-1.0, 1.0), static_cast<int>(rng.integer(-300, 300)));
        const BigFloat a(x, 256);
        CHECK(BigFloat::from_string(a.to_string(), 256) == a);
        CHECK(BigFloat::from_string(a.to_string(), 256).to_double() == x);
    });
    const BigFloat pi = BigFloat::pi(512);
    CHECK(BigFloat::from_string(pi.to_string(), 512) == pi);
    CHECK(BigFloat::infinity(-1).to_string() == "-inf");
    CHECK(BigFloat::from_string("inf").is_finite() == false);
}

TEST_CASE("integers convert exactly") {
    const BigInt big = BigInt(1) << 200;
    const BigFloat b = BigFloat::from_integer(big + 1, 256);
    CHECK(b.is_integer());
    CHECK(b.to_integer() == big + 1);
    CHECK_THROWS_AS((void)BigFloat(0.5).to_integer(), PreconditionError);
}

TEST_CASE("mixed-precision arithmetic takes the wider operand") {
    const BigFloat a(1.0, 64);
    const BigFloat b(3.0, 512);
    CHECK((a / b).precision() == 512);
    CHECK((a + 1.0).precision() == 64);
    CHECK(BigFloat(2.0) < 3.0);
    CHECK(max(BigFloat(2.0), BigFloat(-5.0)) == 2.0);
}

TEST_CASE("elementary functions agree with libm") {
    testing::for_all(100, 12, [](testing::Rng& rng, int) {
        const double x = rng.uniform(-20.0, 20.0);
        const BigFloat bx(x);
        CHECK(testing::relative_error(exp(bx).to_double(), std::exp(x)) < 1e-15);
        CHECK(std::abs(sin(bx).to_double() - std::sin(x)) < 1e-15);
        CHECK(std::abs(cos(bx).to_double() - std::cos(x)) < 1e-15);
        CHECK(testing::relative_error(sqrt(abs(bx)).to_double(), std::sqrt(std::abs(x))) < 1e-15);
    });
    CHECK(fmod(BigFloat(7.5), BigFloat(2.0)) == 1.5);
    CHECK(fmod(BigFloat(-7.5), BigFloat(2.0)) == -1.5);
    CHECK(floor(BigFloat(-0.5)) == -1.0);
    CHECK(pow(BigFloat(2.0), 10) == 1024.0);
}

TEST_CASE("expressions evaluate in both arithmetics") {
    const Expression p = Expression::parse("pow(x, 3) - 2*x + 1");
    CHECK(p(2.0) == 5.0);
    CHECK(p(BigFloat(2.0)) == 5.0);

    const Expression g = Expression::parse("exp(-r) * cos(pi * r) / sqrt(1 + abs(r))", "r");
    testing::for_all(100, 13, [&](testing::Rng& rng, int) {
        const double r = rng.uniform(-10.0, 10.0);
        const double want = std::exp(-r) * std::cos(std::numbers::pi * r) / std::sqrt(1 + std::abs(r));
        const double envelope = std::exp(-r) / std::sqrt(1 + std::abs(r));  // scale away the zeros of cos
        CHECK(std::abs(g(r) - want) < 1e-13 * envelope);
        CHECK(std::abs(g(BigFloat(r)).to_double() - want) < 1e-13 * envelope);
    });
}

TEST_CASE("expression literals are read at the target precision") {
    const Expression e = Expression::parse("0.1");
    const BigFloat at512 = e(BigFloat(0.0, 512));
    CHECK(at512 == BigFloat::from_string("0.1", 512));
    CHECK(at512 != BigFloat(0.1, 512));
}

TEST_CASE("unary minus, precedence and parentheses") {
    const Expression e = Expression::parse("-x*2 + (3 - x)/2");
    CHECK(e(4.0) == -8.0 + -0.5);
    CHECK(Expression::parse("-pow(x, 2)")(3.0) == -9.0);
    CHECK(Expression::parse("2*-x")(3.0) == -6.0);
}

TEST_CASE("malformed expressions are configuration errors") {
    CHECK_THROWS_AS(Expression::parse("1 +"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("foo(x)"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("y + 1"), ConfigError);
    CHECK_THROWS_AS(Expression::parse("pow(x, 1.5)"), ConfigError);
    CHECK_THROWS_WITH_AS(Expression::parse("(x"), doctest::Contains("offset"), ConfigError);
    CHECK_THROWS_AS((void)Expression::parse("x").constant(), ConfigError);
}

TEST_CASE("scalars parse as literals or constant expressions") {
    CHECK(parse_real("0.1") == 0.1);
    CHECK(parse_real("1e-3") == 1e-3);
    CHECK(testing::relative_error(parse_scalar("exp(-100)").to_double(), std::exp(-100.0)) < 1e-15);
    CHECK(parse_real("1/4") == 0.25);
}
