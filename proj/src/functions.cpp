#include "rkhs/functions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "rkhs/error.hpp"
#include "rkhs/expression.hpp"

namespace rkhs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string shortest(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, result.ptr);
}

template <typename T>
T horner(std::span<const double> coeffs, const T& x) {
    T acc = lift(0.0, x);
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

/// 1 + max_{k<d} |c_k / c_d|: every complex root has modulus below it.
double cauchy_bound(std::span<const double> coeffs) {
    const double lead = std::abs(coeffs.back());
    double ratio = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs.size(); ++k) ratio = std::max(ratio, std::abs(coeffs[k]) / lead);
    return 1.0 + ratio;
}

int sign_of(double v) { return v < 0 ? -1 : 1; }

}  // namespace

CandidateFunction& CandidateFunction::declare_tail(Direction direction, TailBound bound) {
    if (!(bound.alpha > 0.0)) throw PreconditionError("declared tail alpha must be positive");
    if (bound.sign != 1 && bound.sign != -1) throw PreconditionError("declared tail sign must be +1 or -1");
    (direction == Direction::Positive ? tail_pos_ : tail_neg_) = bound;
    return *this;
}

CandidateFunction& CandidateFunction::declare_integer_points(IntegerPointBound bound) {
    if (!(bound.alpha > 0.0)) throw PreconditionError("declared alpha must be positive");
    integer_points_ = bound;
    return *this;
}

CandidateFunction make_constant(double v) {
    CandidateFunction f(
        "constant:" + shortest(v), [v](double) { return v; },
        [v](const BigFloat& x) { return BigFloat(v, x.precision()); });
    if (v != 0.0) {
        f.declare_tail(Direction::Positive, {std::abs(v), sign_of(v), -kInf});
        f.declare_tail(Direction::Negative, {std::abs(v), sign_of(v), kInf});
    }
    return f;
}

CandidateFunction make_polynomial(std::span<const double> coeffs) {
    if (coeffs.empty()) throw PreconditionError("polynomial needs at least one coefficient");
    std::string id = "poly:";
    for (std::size_t k = 0; k < coeffs.size(); ++k) id += (k ? "," : "") + shortest(coeffs[k]);

    std::vector<double> c(coeffs.begin(), coeffs.end());
    while (c.size() > 1 && c.back() == 0.0) c.pop_back();

    CandidateFunction f(
        id, [c](double x) { return horner<double>(c, x); }, [c](const BigFloat& x) { return horner<BigFloat>(c, x); });
    if (c.size() == 1) {
        if (c[0] != 0.0) {
            f.declare_tail(Direction::Positive, {std::abs(c[0]), sign_of(c[0]), -kInf});
            f.declare_tail(Direction::Negative, {std::abs(c[0]), sign_of(c[0]), kInf});
        }
        return f;
    }

    // Beyond the root bounds of f and f', f has no zeros and |f| is increasing
    // away from the origin, so the grid minimum sits at the threshold itself.
    const std::size_t degree = c.size() - 1;
    double threshold = cauchy_bound(c);
    if (degree >= 2) {
        std::vector<double> derivative;
        for (std::size_t k = 1; k < c.size(); ++k) derivative.push_back(static_cast<double>(k) * c[k]);
        threshold = std::max(threshold, cauchy_bound(derivative));
    }

    constexpr int kGrid = 10000;
    constexpr double kSpan = 1000.0;
    double min_pos = kInf;
    double min_neg = kInf;
    for (int i = 0; i < kGrid; ++i) {
        const double offset = kSpan * i / (kGrid - 1);
        min_pos = std::min(min_pos, std::abs(horner<double>(c, threshold + offset)));
        min_neg = std::min(min_neg, std::abs(horner<double>(c, -threshold - offset)));
    }
    const int lead_sign = sign_of(c.back());
    const int odd = degree % 2 == 1 ? -1 : 1;
    f.declare_tail(Direction::Positive, {min_pos / 2, lead_sign, threshold});
    f.declare_tail(Direction::Negative, {min_neg / 2, lead_sign * odd, -threshold});
    return f;
}

CandidateFunction make_paper_example() {
    CandidateFunction f(
        "paper_example",
        [](double x) {
            const double s = std::sin(x);
            return std::exp(-s * s + 1.0 / std::sqrt(1.0 + x * x));
        },
        [](const BigFloat& x) {
            const BigFloat s = sin(x);
            return exp(-s * s + 1.0 / sqrt(1.0 + x * x));
        });
    // -sin^2 >= -1 and 1/sqrt(1 + x^2) > 0 give f > e^-1 on the whole line.
    const double alpha = std::exp(-1.0);
    f.declare_tail(Direction::Positive, {alpha, 1, -kInf});
    f.declare_tail(Direction::Negative, {alpha, 1, kInf});
    return f;
}

CandidateFunction make_sin_squared_shifted() {
    // sin(pi (x + 1/2))^2 = cos(pi u)^2 with u = x - round(x), an exact reduction
    // that puts integer inputs at u = 0.
    CandidateFunction f(
        "sin_squared_shifted",
        [](double x) {
            const double s = std::cos(std::numbers::pi * (x - std::nearbyint(x)));
            return s * s;
        },
        [](const BigFloat& x) {
            const unsigned bits = x.precision();
            const BigFloat u = x - floor(x + 0.5);
            const BigFloat s = cos(BigFloat::pi(bits) * u);
            return s * s;
        });
    f.declare_integer_points({1.0, 1});
    return f;
}

CandidateFunction make_kernel_section(const Kernel& k, double x0) {
    return CandidateFunction(
        "kernel_section:" + shortest(x0), [k, x0](double x) { return k(x, x0); },
        [k, x0](const BigFloat& x) { return k(x, BigFloat(x0, x.precision())); });
}

CandidateFunction make_expression_function(std::string_view expression) {
    Expression expr = Expression::parse(expression, "x");
    return CandidateFunction(
        "expr:" + std::string(expression), [expr](double x) { return expr(x); },
        [expr](const BigFloat& x) { return expr(x); });
}

CandidateFunction function_from_id(std::string_view id, const Kernel* k) {
    if (id == "paper_example") return make_paper_example();
    if (id == "sin_squared_shifted") return make_sin_squared_shifted();
    if (id.starts_with("constant:")) return make_constant(parse_real(id.substr(9)));
    if (id.starts_with("poly:")) {
        std::vector<double> coeffs;
        std::string_view rest = id.substr(5);
        for (;;) {
            const std::size_t cut = rest.find(',');
            coeffs.push_back(parse_real(rest.substr(0, cut)));
            if (cut == std::string_view::npos) break;
            rest.remove_prefix(cut + 1);
        }
        return make_polynomial(coeffs);
    }
    if (id.starts_with("expr:")) return make_expression_function(id.substr(5));
    if (id.starts_with("kernel_section:")) {
        if (k == nullptr) throw ConfigError("function '" + std::string(id) + "' needs a kernel");
        return make_kernel_section(*k, parse_real(id.substr(15)));
    }
    throw ConfigError("unknown function identifier '" + std::string(id) + "'");
}

std::optional<TailSample> tail_lower_bound(const CandidateFunction& f, const SequenceSpec& seq, std::int64_t start,
                                           std::int64_t count) {
    if (count < 2) throw PreconditionError("tail_lower_bound needs count >= 2");
    if (start < 1) throw PreconditionError("tail_lower_bound needs start >= 1");
    TailSample out{kInf, 0};
    for (std::int64_t n = start; n < start + count; ++n) {
        const double value = f(seq(n));
        if (!(value != 0.0) || !std::isfinite(value)) return std::nullopt;
        const int s = sign_of(value);
        if (out.sign == 0) out.sign = s;
        if (s != out.sign) return std::nullopt;
        out.alpha = std::min(out.alpha, std::abs(value));
    }
    return out;
}

void DomainSpec::validate() const {
    switch (kind) {
        case DomainKind::FullLine: return;
        case DomainKind::Interval:
            if (!(lower < upper)) throw ConfigError("interval domain needs lower < upper");
            return;
        case DomainKind::FiniteSet: {
            const std::set<double> unique(points.begin(), points.end());
            if (unique.size() != points.size()) throw ConfigError("finite_set domain points must be distinct");
            if (accumulation_point) throw ConfigError("a finite set has no accumulation point");
            return;
        }
    }
}

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::FullLine: return "full_line";
        case DomainKind::Interval: return "interval";
        case DomainKind::FiniteSet: return "finite_set";
    }
    return "unknown";
}

}  // namespace rkhs
