#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "rkhs/error.hpp"
#include "rkhs/interpolant.hpp"
#include "support.hpp"

using namespace rkhs;

namespace {

/// sqrt(v^T G^{-1} v) by a dense double-precision solve.
double double_norm(const Kernel& k, const CandidateFunction& f, const std::vector<double>& points) {
    const auto n = static_cast<Eigen::Index>(points.size());
    Eigen::MatrixXd g(n, n);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = f(points[static_cast<std::size_t>(i)]);
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = k(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
    }
    return std::sqrt(v.dot(g.ldlt().solve(v)));
}

}  // namespace

TEST_CASE("two-point closed form for the constant function") {
    const Kernel k = make_gaussian();
    const CandidateFunction one = make_constant(1.0);
    for (const double t : {0.5, 1.0, 2.0}) {
        const std::vector<double> points{0.0, t};
        const BigFloat norm = min_norm_interpolant_norm(k, one, points);
        const double want = 2.0 / (1.0 + std::exp(-t * t));
        CHECK(std::abs((norm * norm).to_double() - want) <= 1e-12);
    }
    const std::vector<double> at1{0.0, 1.0};
    CHECK(min_norm_interpolant_norm(k, one, at1).to_double() == doctest::Approx(1.20918).epsilon(1e-5));
}

TEST_CASE("reproducing property and the zero function") {
    const Kernel k = make_gaussian();
    const CandidateFunction section = make_kernel_section(k, 0.0);
    testing::for_all(10, 81, [&](testing::Rng& rng, int) {
        std::vector<double> points = rng.separated_points(static_cast<std::size_t>(rng.integer(1, 8)), -4.0, 4.0, 0.3);
        points.push_back(0.0);
        if (std::any_of(points.begin(), points.end() - 1, [](double x) { return std::abs(x) < 0.3; })) return;
        CHECK(abs(min_norm_interpolant_norm(k, section, points) - 1.0) < 1e-40);
    });
    const std::vector<double> points{-1.0, 2.0};
    CHECK(min_norm_interpolant_norm(k, make_constant(0.0), points) == 0.0);
}

TEST_CASE("norms grow along nested chains") {
    const Kernel k = make_gaussian();
    testing::for_all(20, 82, [&](testing::Rng& rng, int chain) {
        const CandidateFunction f = chain % 2 == 0 ? make_constant(1.0) : make_paper_example();
        const auto points = rng.separated_points(10, -6.0, 6.0, 0.25);
        BigFloat previous(0.0);
        for (std::size_t n = 1; n <= points.size(); ++n) {
            const std::vector<double> prefix(points.begin(), points.begin() + static_cast<std::ptrdiff_t>(n));
            const BigFloat norm = min_norm_interpolant_norm(k, f, prefix);
            CAPTURE(chain);
            CAPTURE(n);
            CHECK(norm >= previous - 1e-20);
            previous = norm;
        }
    });
}

TEST_CASE("trace of a kernel section is constant") {
    const Kernel k = make_gaussian();
    const std::vector<double> base{0.0};
    const NormTrace trace = norm_growth_trace(k, make_kernel_section(k, 0.0), base, ExtensionRule::Widen, 6);
    REQUIRE(trace.norms.size() == 7);
    CHECK_FALSE(trace.truncated);
    for (const auto& n : trace.norms) CHECK(abs(n - 1.0) < 1e-10);
    CHECK_FALSE(trace.divergence_evidence);
    CHECK(trace.point_sets[1] == std::vector<double>{0.0, 1.0});
    CHECK(trace.point_sets[2] == std::vector<double>{0.0, 1.0, -1.0});
    CHECK(trace.point_sets[3] == std::vector<double>{0.0, 1.0, -1.0, 3.0});
}

TEST_CASE("trace of the constant function increases") {
    const Kernel k = make_gaussian();
    const CandidateFunction one = make_constant(1.0);
    const std::vector<double> base{0.0};
    const NormTrace trace = norm_growth_trace(k, one, base, ExtensionRule::Widen, 6);
    REQUIRE(trace.norms.size() == 7);
    for (std::size_t i = 1; i < trace.norms.size(); ++i) CHECK(trace.norms[i] > trace.norms[i - 1]);
    for (std::size_t i = 0; i <= 4; ++i) {
        CHECK(testing::relative_error(trace.norms[i].to_double(), double_norm(k, one, trace.point_sets[i])) < 1e-10);
    }
}

TEST_CASE("widened traces of a non-member eventually show divergence") {
    const Kernel k = make_gaussian();
    const std::vector<double> base{0.0};
    const NormTrace trace = norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Widen, 6, 256, 0.0, 2.0);
    CHECK(trace.divergence_evidence);
}

TEST_CASE("refinement inserts midpoints") {
    const Kernel k = make_inverse_quadratic();
    const std::vector<double> base{-2.0, 2.0};
    const NormTrace trace = norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Refine, 2);
    REQUIRE(trace.point_sets.size() == 3);
    CHECK(trace.point_sets[1] == std::vector<double>{-2.0, 2.0, 0.0});
    CHECK(trace.point_sets[2].size() == 5);
    CHECK(trace.norms[2] >= trace.norms[1] - 1e-20);
    CHECK_THROWS_AS(norm_growth_trace(k, make_constant(1.0), std::vector<double>{0.0}, ExtensionRule::Refine, 2),
                    PreconditionError);
}

TEST_CASE("ridge lowers the norm and converges as it vanishes") {
    const Kernel k = make_gaussian();
    testing::for_all(10, 83, [&](testing::Rng& rng, int) {
        const auto points = rng.separated_points(3, -3.0, 3.0, 0.5);
        const CandidateFunction f = make_paper_example();
        const BigFloat exact = min_norm_interpolant_norm(k, f, points, 256, 0.0);
        BigFloat previous(0.0);
        for (const double ridge : {1e-2, 1e-6, 1e-10}) {
            const BigFloat n = min_norm_interpolant_norm(k, f, points, 256, ridge);
            CHECK(n <= exact);
            CHECK(n >= previous);
            previous = n;
        }
        CHECK(abs(previous - exact) < 1e-8);
    });
}

TEST_CASE("nearly coincident nodes escalate precision") {
    const Kernel k = make_gaussian();
    const std::vector<double> close{0.0, 1e-40};
    CHECK_THROWS_WITH_AS(min_norm_interpolant_norm(k, make_constant(1.0), close, 256),
                         doctest::Contains("Gram numerically singular"), NumericalError);
    CHECK_NOTHROW(min_norm_interpolant_norm(k, make_constant(1.0), close, 1024));
    CHECK_NOTHROW(min_norm_interpolant_norm(k, make_constant(1.0), close, 256, 1e-6));

    const std::vector<double> base{0.0, 1e-40};
    const NormTrace trace = norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Widen, 1);
    REQUIRE(trace.norms.size() == 2);
    CHECK(trace.precision_bits[0] == 1024);
}

TEST_CASE("traces stop with a reason when even 1024 bits fail") {
    const Kernel k = make_gaussian();
    const std::vector<double> base{0.0, 1e-200};
    const NormTrace trace = norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Widen, 3);
    CHECK(trace.norms.empty());
    REQUIRE(trace.truncated);
    CHECK(trace.truncated->find("singular") != std::string::npos);
}

TEST_CASE("trace preconditions and CSV") {
    const Kernel k = make_gaussian();
    const std::vector<double> base{0.0};
    CHECK_THROWS_AS(norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Widen, 0), PreconditionError);
    const NormTrace trace = norm_growth_trace(k, make_constant(1.0), base, ExtensionRule::Widen, 2);
    std::ostringstream out;
    write_trace_csv(trace, out);
    const std::string text = out.str();
    CHECK(text.starts_with("step,n_points,norm\n0,1,"));
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
    CHECK(extension_rule_from_string("refine") == ExtensionRule::Refine);
    CHECK_THROWS_AS(extension_rule_from_string("shrink"), ConfigError);
}
