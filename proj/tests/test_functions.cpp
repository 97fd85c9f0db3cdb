#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rkhs/error.hpp"
#include "rkhs/functions.hpp"
#include "support.hpp"

using namespace rkhs;

TEST_CASE("constants declare both tails") {
    const CandidateFunction f = make_constant(-2.5);
    CHECK(f.id() == "constant:-2.5");
    CHECK(f(123.0) == -2.5);
    REQUIRE(f.tail(Direction::Positive));
    CHECK(f.tail(Direction::Positive)->alpha == 2.5);
    CHECK(f.tail(Direction::Positive)->sign == -1);
    CHECK(f.tail(Direction::Negative)->sign == -1);
    CHECK_FALSE(make_constant(0.0).tail(Direction::Positive));
}

TEST_CASE("polynomial tail declarations hold beyond the threshold") {
    testing::for_all(40, 31, [](testing::Rng& rng, int) {
        const std::size_t degree = static_cast<std::size_t>(rng.integer(1, 4));
        std::vector<double> coeffs;
        for (std::size_t k = 0; k <= degree; ++k) coeffs.push_back(std::round(rng.uniform(-5.0, 5.0)));
        if (coeffs.back() == 0.0) coeffs.back() = 1.0;
        const CandidateFunction f = make_polynomial(coeffs);
        for (const Direction d : {Direction::Positive, Direction::Negative}) {
            REQUIRE(f.tail(d));
            const TailBound t = *f.tail(d);
            CHECK(t.alpha > 0.0);
            for (int i = 0; i < 100; ++i) {
                const double offset = std::exp(rng.uniform(0.0, 12.0)) - 1.0;
                const double x = d == Direction::Positive ? t.threshold + offset : t.threshold - offset;
                CAPTURE(f.id());
                CAPTURE(x);
                CHECK(t.sign * f(x) >= t.alpha);
            }
        }
    });
}

TEST_CASE("polynomial signs follow the leading term") {
    const std::vector<double> cubic{0.0, 0.0, 0.0, -1.0};
    const CandidateFunction f = make_polynomial(cubic);
    CHECK(f.tail(Direction::Positive)->sign == -1);
    CHECK(f.tail(Direction::Negative)->sign == 1);
    const std::vector<double> quad{-4.0, 0.0, 1.0};
    const CandidateFunction g = make_polynomial(quad);
    CHECK(g.tail(Direction::Positive)->threshold >= 2.0);
    CHECK(g.tail(Direction::Negative)->sign == 1);
    CHECK(function_from_id("poly:-4,0,1").id() == "poly:-4,0,1");
}

TEST_CASE("exp(-sin^2 x + 1/sqrt(1 + x^2)) stays above e^-1") {
    const CandidateFunction f = make_paper_example();
    testing::for_all(2000, 32, [&](testing::Rng& rng, int) {
        const double x = rng.uniform(-1e4, 1e4);
        CHECK(f(x) >= std::exp(-1.0));
    });
    CHECK(f.tail(Direction::Positive)->alpha == std::exp(-1.0));
    CHECK(f.eval(0.0, 256).to_double() == doctest::Approx(std::exp(1.0)));
}

TEST_CASE("shifted sin squared equals one at every integer") {
    const CandidateFunction f = make_sin_squared_shifted();
    for (long n = -2000; n <= 2000; n += 7) {
        CHECK(std::abs(f(static_cast<double>(n)) - 1.0) < 1e-10);
        CHECK(abs(f.eval(static_cast<double>(n), 256) - 1.0) < 1e-70);
    }
    CHECK(f(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    REQUIRE(f.integer_points());
    CHECK(f.integer_points()->alpha == 1.0);
    testing::for_all(200, 23, [&](testing::Rng& rng, int) {
        const double x = rng.uniform(-50.0, 50.0);
        const double s = std::sin(std::numbers::pi * (x + 0.5));
        CHECK(std::abs(f(x) - s * s) < 1e-12);
        CHECK(std::abs(f.eval(x, 256).to_double() - s * s) < 1e-12);
    });
}

TEST_CASE("tail_lower_bound samples sign and minimum") {
    const SequenceSpec tri = triangular_sequence(Direction::Positive);
    const auto sin2 = tail_lower_bound(make_sin_squared_shifted(), tri, 1, 64);
    REQUIRE(sin2);
    CHECK(std::abs(sin2->alpha - 1.0) < 1e-10);
    CHECK(sin2->sign == 1);

    const auto neg = tail_lower_bound(make_constant(-3.0), tri, 5, 10);
    REQUIRE(neg);
    CHECK(neg->alpha == 3.0);
    CHECK(neg->sign == -1);

    CHECK_FALSE(tail_lower_bound(make_expression_function("cos(pi*x)"), arithmetic_sequence(1.0), 1, 4));
    CHECK_FALSE(tail_lower_bound(make_constant(0.0), tri, 1, 4));
    CHECK_THROWS_AS(tail_lower_bound(make_constant(1.0), tri, 1, 1), PreconditionError);
    CHECK_THROWS_AS(tail_lower_bound(make_constant(1.0), tri, 0, 3), PreconditionError);
}

TEST_CASE("kernel sections reproduce the kernel") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = function_from_id("kernel_section:0.5", &k);
    CHECK(f(1.5) == k(1.5, 0.5));
    CHECK(f.eval(1.5, 256) == k.eval(1.5, 0.5, 256));
    CHECK_FALSE(f.tail(Direction::Positive));
    CHECK_THROWS_AS(function_from_id("kernel_section:0"), ConfigError);
}

TEST_CASE("function identifiers resolve or fail as configuration errors") {
    CHECK(function_from_id("constant:1").id() == "constant:1");
    CHECK(function_from_id("expr:x*x")(3.0) == 9.0);
    CHECK(function_from_id("paper_example").id() == "paper_example");
    CHECK_THROWS_AS(function_from_id("bessel"), ConfigError);
    CHECK_THROWS_AS(function_from_id("expr:x+"), ConfigError);
}

TEST_CASE("domain descriptors") {
    DomainSpec full;
    CHECK_NOTHROW(full.validate());

    DomainSpec interval{DomainKind::Interval, 0.0, 1.0, {}, true};
    CHECK_NOTHROW(interval.validate());
    interval.upper = -1.0;
    CHECK_THROWS_AS(interval.validate(), ConfigError);

    DomainSpec finite{DomainKind::FiniteSet, 0.0, 0.0, {1.0, 2.0}, false};
    CHECK_NOTHROW(finite.validate());
    finite.accumulation_point = true;
    CHECK_THROWS_AS(finite.validate(), ConfigError);
    finite.accumulation_point = false;
    finite.points = {1.0, 1.0};
    CHECK_THROWS_AS(finite.validate(), ConfigError);
    CHECK(to_string(DomainKind::FiniteSet) == "finite_set");
}
