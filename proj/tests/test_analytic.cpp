#include <doctest.h>

#include <cmath>
#include <map>

#include "rkhs/analytic.hpp"
#include "rkhs/error.hpp"
#include "support.hpp"

using namespace rkhs;

namespace {

BigInt factorial(unsigned n) {
    BigInt out = 1;
    for (unsigned k = 2; k <= n; ++k) out *= k;
    return out;
}

BigInt binomial(unsigned n, unsigned k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

/// Bivariate polynomial sum c_{ij} v^i w^j with integer coefficients.
using Poly = std::map<std::pair<unsigned, unsigned>, BigInt>;

/// p((v - w)^2) for p(r) = sum a_k r^k.
Poly compose_square_difference(const std::vector<BigInt>& a) {
    Poly out;
    for (unsigned k = 0; k < a.size(); ++k) {
        for (unsigned i = 0; i <= 2 * k; ++i) {
            const BigInt term = binomial(2 * k, i) * ((2 * k - i) % 2 == 0 ? 1 : -1) * a[k];
            out[{i, 2 * k - i}] += term;
        }
    }
    return out;
}

Poly differentiate(const Poly& p, bool in_v) {
    Poly out;
    for (const auto& [exponents, c] : p) {
        const unsigned e = in_v ? exponents.first : exponents.second;
        if (e == 0) continue;
        const auto next = in_v ? std::pair{e - 1, exponents.second} : std::pair{exponents.first, e - 1};
        out[next] += c * e;
    }
    return out;
}

/// Evaluates on the diagonal v = w = x for integer x.
BigInt on_diagonal(const Poly& p, long x) {
    BigInt total = 0;
    for (const auto& [exponents, c] : p) {
        BigInt power = 1;
        for (unsigned i = 0; i < exponents.first + exponents.second; ++i) power *= x;
        total += c * power;
    }
    return total;
}

/// Radial kernel with polynomial profile sum a_k r^k and exact Taylor data.
Kernel polynomial_profile_kernel(const std::vector<BigInt>& a) {
    RadialProfile phi;
    std::vector<double> coeffs;
    for (const auto& c : a) coeffs.push_back(static_cast<double>(c));
    phi.eval = [coeffs](double r) {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
        return acc;
    };
    phi.eval_extended = [coeffs](const BigFloat& r) {
        BigFloat acc(0.0, r.precision());
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * r + *it;
        return acc;
    };
    phi.derivative = [a](unsigned n, unsigned bits) {
        if (n >= a.size()) return BigFloat(0.0, bits);
        return BigFloat::from_integer(a[n] * factorial(n), bits);
    };
    return custom_radial("polynomial profile", phi);
}

}  // namespace

TEST_CASE("diagonal derivative examples") {
    CHECK(dnn_diagonal(make_gaussian(), 0) == 1.0);
    CHECK(dnn_diagonal(make_gaussian(), 1) == 2.0);
    CHECK(dnn_diagonal(make_gaussian(), 2) == 12.0);
    CHECK(dnn_diagonal(make_inverse_quadratic(), 1) == 2.0);
    CHECK(dnn_diagonal(make_inverse_quadratic(), 2) == 24.0);
}

TEST_CASE("factorial ratios are exact") {
    for (unsigned n = 0; n <= 30; ++n) CHECK(factorial_ratio(n) == factorial(2 * n) / factorial(n));
}

TEST_CASE("closed form matches symbolic differentiation of polynomial profiles") {
    testing::for_all(15, 71, [](testing::Rng& rng, int) {
        std::vector<BigInt> a;
        a.push_back(rng.integer(1, 9));
        const unsigned degree = static_cast<unsigned>(rng.integer(1, 6));
        for (unsigned k = 1; k <= degree; ++k) a.push_back(rng.integer(-9, 9));
        const Kernel k = polynomial_profile_kernel(a);
        Poly p = compose_square_difference(a);
        for (unsigned n = 0; n <= degree + 1; ++n) {
            if (n > 0) p = differentiate(differentiate(p, true), false);
            const long x = static_cast<long>(rng.integer(-5, 5));
            CAPTURE(n);
            CHECK(BigFloat::from_integer(on_diagonal(p, x)) == dnn_diagonal(k, n));
        }
    });
}

TEST_CASE("finite differences agree with the closed form") {
    testing::for_all(5, 72, [](testing::Rng& rng, int) {
        const double x = rng.uniform(-10.0, 10.0);
        for (const Kernel& k : {make_gaussian(), make_inverse_quadratic()}) {
            for (unsigned n = 1; n <= 2; ++n) {
                const double fd = fd_cross_derivative(k, n, x, 1e-4, 256).to_double();
                const double exact = dnn_diagonal(k, n).to_double();
                CAPTURE(k.id());
                CAPTURE(n);
                CHECK(testing::relative_error(fd, exact) <= 1e-6);
            }
        }
    });
    const double at0 = fd_cross_derivative(make_gaussian(), 1, 0.0, 1e-4).to_double();
    const double at5 = fd_cross_derivative(make_gaussian(), 1, 5.0, 1e-4).to_double();
    CHECK(at0 == doctest::Approx(at5).epsilon(1e-9));
}

TEST_CASE("finite difference preconditions") {
    CHECK_THROWS_AS(fd_cross_derivative(make_gaussian(), 1, 0.0, 0.0), PreconditionError);
    CHECK_THROWS_WITH_AS(fd_cross_derivative(make_gaussian(), 3, 0.0, 1e-4), doctest::Contains("stencil not implemented"),
                         PreconditionError);
}

TEST_CASE("diagonal values are nonnegative for the analytic built-ins") {
    for (const Kernel& k : {make_gaussian(), make_inverse_quadratic()}) {
        for (unsigned n = 0; n <= 15; ++n) CHECK(dnn_diagonal(k, n) >= 0.0);
    }
}

TEST_CASE("member derivative bounds") {
    CHECK(member_derivative_bound(make_gaussian(), 1.0, 0) == 1.0);
    CHECK(member_derivative_bound(make_gaussian(), 1.0, 1).to_double() == doctest::Approx(std::sqrt(2.0)));
    for (unsigned n = 0; n < 6; ++n) CHECK(member_derivative_bound(make_gaussian(), 0.0, n) == 0.0);
    CHECK_THROWS_AS(member_derivative_bound(make_gaussian(), -1.0, 0), PreconditionError);
}

TEST_CASE("missing Taylor data is reported") {
    CHECK_THROWS_WITH_AS(dnn_diagonal(make_laplace(), 1), doctest::Contains("requires analytic radial profile"),
                         PreconditionError);
    CHECK_THROWS_WITH_AS(dnn_diagonal(make_exp_product(), 0), doctest::Contains("requires analytic radial profile"),
                         PreconditionError);
    CHECK_THROWS_AS(analyticity_envelope(make_laplace(), 1.0, 3), PreconditionError);
}

TEST_CASE("envelope dominates the exact bound, checked in integers") {
    for (const Kernel& k : {make_gaussian(), make_inverse_quadratic()}) {
        const DerivativeReport report = analyticity_envelope(k, 1.0, 30);
        REQUIRE(report.orders.size() == 31);
        CHECK(report.all_dominated());
        for (unsigned n = 0; n <= 30; ++n) {
            // (2n)!/n! |phi^(n)(0)| <= C 4^n R^n (n!)^2 with C = R = 1
            const BigInt d = abs(k.profile()->derivative_at_zero(n).to_integer());
            const BigInt lhs = factorial(2 * n) / factorial(n) * d;
            const BigInt rhs = (BigInt(1) << (2 * n)) * factorial(n) * factorial(n);
            CAPTURE(k.id());
            CAPTURE(n);
            CHECK(lhs <= rhs);
            CHECK(report.exact_bounds[n] <= report.bound_curve[n]);
        }
    }
}

TEST_CASE("envelope report values") {
    const DerivativeReport g = analyticity_envelope(make_gaussian(), 1.0, 2);
    CHECK(g.exact_bounds[0] == 1.0);
    CHECK(g.bound_curve[0] == 1.0);
    CHECK(g.exact_bounds[2].to_double() == doctest::Approx(std::sqrt(12.0)));
    CHECK(g.bound_curve[2] == 8.0);
    REQUIRE(g.fd_values);
    CHECK(g.fd_values->size() == 2);
    const DerivativeReport q = analyticity_envelope(make_inverse_quadratic(), 1.0, 1);
    CHECK(q.exact_bounds[1].to_double() == doctest::Approx(std::sqrt(2.0)));
    CHECK(q.bound_curve[1] == 2.0);
}

TEST_CASE("exact comparison catches a violated constant") {
    AnalyticConstants tight{1.0, 0.25};
    // inverse quadratic n = 3: 6!/3! * 3! = 720 > 4^3 * 0.25^3 * 36 = 36
    CHECK_FALSE(envelope_dominates(BigFloat(6.0), tight, 3));
    CHECK(envelope_dominates(BigFloat(6.0), AnalyticConstants{1.0, 1.0}, 3));
    // equality at order zero: phi(0) = C
    CHECK(envelope_dominates(BigFloat(2.0), AnalyticConstants{2.0, 1.0}, 0));
    CHECK_FALSE(envelope_dominates(BigFloat(2.0), AnalyticConstants{1.999, 1.0}, 0));
}
