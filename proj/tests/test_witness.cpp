#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>

#include "rkhs/error.hpp"
#include "rkhs/witness.hpp"
#include "support.hpp"

using namespace rkhs;
using Rational = boost::multiprecision::cpp_rational;

namespace {

/// sum_{i,j} (K(x_i, x_j) - c^2 f(x_i) f(x_j)) in plain double arithmetic.
template <typename K, typename F>
double ones_form(const K& kernel, const F& f, double c, const std::vector<double>& x) {
    double total = 0.0;
    for (const double xi : x) {
        for (const double xj : x) total += kernel(xi, xj) - c * c * f(xi) * f(xj);
    }
    return total;
}

const SequenceSpec kTri = triangular_sequence(Direction::Positive);

}  // namespace

TEST_CASE("threshold is the least integer above 2 C / (c alpha)^2") {
    CHECK(n_threshold(1.0, 1.0, 1.0) == 3);
    CHECK(n_threshold(1.0, 0.5, 1.0) == 9);
    CHECK(n_threshold(1.0, 0.25, 1.0) == 33);
    CHECK(n_threshold(1.0, 1.0, std::exp(-1.0)) == 15);  // 2e^2 = 14.78
    CHECK_THROWS_WITH_AS(n_threshold(INFINITY, 1.0, 1.0), doctest::Contains("unbounded"), PreconditionError);
    CHECK_THROWS_AS(n_threshold(1.0, 0.0, 1.0), PreconditionError);
    CHECK_THROWS_AS(n_threshold(1.0, 1.0, -1.0), PreconditionError);
}

TEST_CASE("threshold is monotone in c and clears the bound") {
    testing::for_all(200, 61, [](testing::Rng& rng, int) {
        const double c1 = std::exp(rng.uniform(-5.0, 1.0));
        const double c2 = c1 * rng.uniform(0.01, 1.0);
        const double alpha = std::exp(rng.uniform(-2.0, 1.0));
        const double C = rng.uniform(0.5, 4.0);
        const std::int64_t n1 = n_threshold(C, c1, alpha);
        CHECK(n_threshold(C, c2, alpha) >= n1);
        const double bound = 2.0 * C / (c1 * c1 * alpha * alpha);
        CHECK(static_cast<double>(n1) > bound * (1 - 1e-15));
        CHECK(static_cast<double>(n1 - 1) <= bound * (1 + 1e-15));
    });
}

TEST_CASE("find_ell examples") {
    CHECK(find_ell(make_gaussian(), kTri, 3, BigFloat(0.5), 64) == 0);
    CHECK(find_ell(make_laplace(), kTri, 2, exp(BigFloat(-3.0)), 64) == 1);
    CHECK_THROWS_AS(find_ell(make_exp_product(), kTri, 3, BigFloat(0.5), 64), DecayNotMet);
    CHECK_THROWS_AS(find_ell(make_gaussian(), arithmetic_sequence(1.0), 3, BigFloat(1e-10), 64), DecayNotMet);
    CHECK_THROWS_AS(find_ell(make_gaussian(), kTri, 1, BigFloat(0.5), 64), PreconditionError);
}

TEST_CASE("gaussian witness at c = 1 on the points 1, 3, 6") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = make_constant(1.0);
    const WitnessCertificate cert = build_witness(k, f, kTri, 1.0, 1.0, 64);
    CHECK(cert.N == 3);
    CHECK(cert.ell == 0);
    CHECK(cert.points == std::vector<double>{1.0, 3.0, 6.0});
    CHECK(cert.alpha_provenance == AlphaProvenance::Declared);
    CHECK(cert.evaluation == FormEvaluation::Dense);
    const double oracle = 3.0 + 2.0 * (std::exp(-4.0) + std::exp(-25.0) + std::exp(-9.0)) - 9.0;
    CHECK(testing::relative_error(cert.r_value.to_double(), oracle) < 1e-12);
    CHECK(cert.r_value < -5.0);
    CHECK(verify_certificate(cert, k, f));
}

TEST_CASE("inverse quadratic witness matches exact rational arithmetic") {
    const Kernel k = make_inverse_quadratic();
    const CandidateFunction f = make_constant(1.0);
    const WitnessCertificate cert = build_witness(k, f, kTri, 1.0, 1.0, 64);
    CHECK(cert.N == 3);
    CHECK(cert.ell == 0);
    const Rational exact = Rational(3) + 2 * (Rational(1, 5) + Rational(1, 26) + Rational(1, 10)) - 9;
    CHECK(testing::relative_error(cert.r_value.to_double(), static_cast<double>(exact)) < 1e-15);
    CHECK(verify_certificate(cert, k, f));
}

TEST_CASE("dense certificates match the double-sum oracle") {
    const CandidateFunction f = make_paper_example();
    for (const Kernel& k : {make_gaussian(), make_inverse_quadratic()}) {
        for (const double c : {1.0, 0.5, 0.25}) {
            const WitnessCertificate cert = build_witness(k, f, kTri, c, std::exp(-1.0), 128);
            REQUIRE(cert.evaluation == FormEvaluation::Dense);
            const double oracle = ones_form(k, f, c, cert.points);
            CAPTURE(k.id());
            CAPTURE(c);
            CHECK(testing::relative_error(cert.r_value.to_double(), oracle) < 1e-12);
            CHECK(verify_certificate(cert, k, f));
        }
    }
}

TEST_CASE("banded evaluation agrees with the dense double sum") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = make_paper_example();
    const std::vector<double> points = kTri.window(0, 700);
    const FormEstimate banded = deflated_form_ones(k, f, 0.3, points, 256);
    REQUIRE(banded.evaluation == FormEvaluation::Banded);
    const double oracle = ones_form(k, f, 0.3, points);
    CHECK(testing::relative_error(banded.value.to_double(), oracle) < 1e-12);
    CHECK(banded.omitted_bound >= 0.0);
    CHECK(banded.omitted_bound < 1e-70);

    // Laplace decays slowly, so the band limit is what stops each row.
    const Kernel l = make_laplace();
    const std::vector<double> arith = arithmetic_sequence(0.5).window(0, 600);
    const FormEstimate lb = deflated_form_ones(l, f, 0.1, arith, 256, 8);
    const double lo = ones_form(l, f, 0.1, arith);
    CHECK(lb.value.to_double() <= lo + 1e-9);
    CHECK((lb.value + lb.omitted_bound).to_double() >= lo - 1e-9);
}

TEST_CASE("banded evaluation requires a monotone profile") {
    const std::vector<double> points = kTri.window(0, 600);
    CHECK_THROWS_AS(deflated_form_ones(kernel_from_id("custom:exp(-r)"), make_constant(1.0), 1.0, points, 256),
                    PreconditionError);
    CHECK_NOTHROW(deflated_form_ones(kernel_from_id("custom:exp(-r);nonneg;nonincreasing"), make_constant(1.0), 1.0,
                                     points, 256));
}

TEST_CASE("tampered certificates are rejected") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = make_constant(1.0);
    const WitnessCertificate cert = build_witness(k, f, kTri, 0.5, 1.0, 64);
    REQUIRE(verify_certificate(cert, k, f));

    WitnessCertificate positive = cert;
    positive.r_value = BigFloat(1.0, cert.precision_bits);
    CHECK_FALSE(verify_certificate(positive, k, f));

    WitnessCertificate nudged = cert;
    nudged.r_value = cert.r_value * (BigFloat(1.0, cert.precision_bits) + BigFloat(1e-20, cert.precision_bits));
    CHECK_FALSE(verify_certificate(nudged, k, f));

    WitnessCertificate shrunk = cert;
    shrunk.N = 8;
    shrunk.points.pop_back();
    shrunk.coefficients.pop_back();
    CHECK_FALSE(verify_certificate(shrunk, k, f));

    WitnessCertificate moved = cert;
    moved.points[0] += 1.0;
    CHECK_FALSE(verify_certificate(moved, k, f));

    CHECK_THROWS_AS(verify_certificate(cert, make_inverse_quadratic(), f), PreconditionError);
    CHECK_THROWS_AS(verify_certificate(cert, k, make_constant(2.0)), PreconditionError);
}

TEST_CASE("alpha resolution") {
    const AlphaChoice sin2 = resolve_alpha(make_sin_squared_shifted(), kTri);
    CHECK(sin2.provenance == AlphaProvenance::Declared);
    CHECK(sin2.alpha == 1.0);
    const AlphaChoice sin2_arith = resolve_alpha(make_sin_squared_shifted(), arithmetic_sequence(2.0));
    CHECK(sin2_arith.provenance == AlphaProvenance::Declared);
    const AlphaChoice expr = resolve_alpha(make_expression_function("2 + 1/(1 + x*x)"), kTri);
    CHECK(expr.provenance == AlphaProvenance::Empirical);
    CHECK(expr.alpha > 2.0);
    CHECK_THROWS_AS(resolve_alpha(make_constant(0.0), kTri), PreconditionError);

    const std::vector<double> quad{-100.0, 0.0, 1.0};
    const AlphaChoice poly = resolve_alpha(make_polynomial(quad), kTri);
    CHECK(poly.ell_min > 0);
    CHECK(kTri(poly.ell_min + 1) >= make_polynomial(quad).tail(Direction::Positive)->threshold);
    CHECK(kTri(poly.ell_min) < make_polynomial(quad).tail(Direction::Positive)->threshold);
}

TEST_CASE("zero function cannot be refuted") {
    CHECK_THROWS_AS(build_witness(make_gaussian(), make_constant(0.0), kTri, 1.0, 0.0, 64), PreconditionError);
    const std::vector<double> grid{1.0};
    CHECK_THROWS_AS(sweep_c(make_gaussian(), make_constant(0.0), kTri, grid, 64), PreconditionError);
}

TEST_CASE("empirical alpha must hold on the witness points") {
    const CandidateFunction f = make_expression_function("exp(-x/100)");
    CHECK_THROWS_AS(build_witness(make_gaussian(), f, kTri, 0.5, 0.9, 64), PreconditionError);
}

TEST_CASE("a genuine member exhausts the doubling cap") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = make_kernel_section(k, 0.0);
    WitnessOptions options;
    options.enforce_tail_hypothesis = false;
    CHECK_THROWS_WITH_AS(build_witness(k, f, kTri, 1.0, 1.0, 64, options), doctest::Contains("r not negative at cap"),
                         NumericalError);
}

TEST_CASE("sweep over the default grid") {
    const Kernel k = make_gaussian();
    const CandidateFunction f = make_constant(1.0);
    const auto grid = default_c_grid();
    REQUIRE(grid.size() == 9);
    const SweepResult sweep = sweep_c(k, f, kTri, grid, 64);
    CHECK(sweep.failures.empty());
    REQUIRE(sweep.certificates.size() == grid.size());
    CHECK(sweep.n_star == std::vector<std::int64_t>{3, 9, 33, 129, 513, 2049, 8193, 32769, 131073});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(std::abs(sweep.scaled_threshold[i] - 1.0) <= 0.5);
        CHECK(sweep.certificates[i].c == grid[i]);
        CHECK(verify_certificate(sweep.certificates[i], k, f));
    }
    const std::vector<double> empty;
    CHECK_THROWS_AS(sweep_c(k, f, kTri, empty, 64), PreconditionError);
}

TEST_CASE("sweep results do not depend on the number of jobs") {
    const Kernel k = make_inverse_quadratic();
    const CandidateFunction f = make_paper_example();
    const std::vector<double> grid{1.0, 0.7, 0.5, 0.3, 0.2};
    const SweepResult one = sweep_c(k, f, kTri, grid, 128, {}, std::nullopt, 1);
    const SweepResult three = sweep_c(k, f, kTri, grid, 128, {}, std::nullopt, 3);
    REQUIRE(one.certificates.size() == three.certificates.size());
    CHECK(one.failures.size() == three.failures.size());
    for (std::size_t i = 0; i < one.certificates.size(); ++i) {
        CHECK(one.certificates[i].r_value == three.certificates[i].r_value);
        CHECK(one.certificates[i].points == three.certificates[i].points);
    }
}

TEST_CASE("certificates and failures partition the grid") {
    const Kernel k = make_gaussian();
    const std::vector<double> grid{1.0, 0.5};
    const SweepResult fail = sweep_c(k, make_constant(1.0), arithmetic_sequence(0.1), grid, 8);
    CHECK(fail.certificates.empty());
    CHECK(fail.failures.size() == 2);
    CHECK(fail.failures[0].reason.find("decay condition not met") != std::string::npos);
}
