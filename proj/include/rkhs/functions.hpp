#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/kernels.hpp"
#include "rkhs/sequences.hpp"

namespace rkhs {

/// sign * f(x) >= alpha for every x beyond `threshold` (x >= threshold on the
/// positive tail, x <= threshold on the negative tail). The threshold may be infinite.
struct TailBound {
    double alpha = 0.0;
    int sign = 1;
    double threshold = 0.0;
};

/// sign * f(k) >= alpha at every integer k.
struct IntegerPointBound {
    double alpha = 0.0;
    int sign = 1;
};

/// A candidate function f given through an extension f_e to the whole line.
class CandidateFunction {
public:
    using DoubleFn = std::function<double(double)>;
    using ExtendedFn = std::function<BigFloat(const BigFloat&)>;

    CandidateFunction(std::string id, DoubleFn eval, ExtendedFn eval_extended)
        : id_(std::move(id)), eval_(std::move(eval)), eval_extended_(std::move(eval_extended)) {}

    [[nodiscard]] const std::string& id() const { return id_; }
    [[nodiscard]] double operator()(double x) const { return eval_(x); }
    [[nodiscard]] BigFloat operator()(const BigFloat& x) const { return eval_extended_(x); }
    [[nodiscard]] BigFloat eval(double x, unsigned precision_bits) const {
        return eval_extended_(BigFloat(x, precision_bits));
    }

    [[nodiscard]] const std::optional<TailBound>& tail(Direction direction) const {
        return direction == Direction::Positive ? tail_pos_ : tail_neg_;
    }
    [[nodiscard]] const std::optional<IntegerPointBound>& integer_points() const { return integer_points_; }

    CandidateFunction& declare_tail(Direction direction, TailBound bound);
    CandidateFunction& declare_integer_points(IntegerPointBound bound);

private:
    std::string id_;
    DoubleFn eval_;
    ExtendedFn eval_extended_;
    std::optional<TailBound> tail_pos_;
    std::optional<TailBound> tail_neg_;
    std::optional<IntegerPointBound> integer_points_;
};

/// f == v; both tails declared with alpha = |v| unless v == 0.
CandidateFunction make_constant(double v);

/// f(x) = sum_k coeffs[k] x^k. Tails are declared beyond the larger Cauchy root
/// bound of f and f', where |f| is monotone and nonzero; alpha is half the
/// smallest |f| seen on a 10^4-point grid over [x+, x+ + 10^3].
CandidateFunction make_polynomial(std::span<const double> coeffs);

/// f(x) = exp(-sin(x)^2 + 1/sqrt(1 + x^2)) >= e^-1 everywhere.
CandidateFunction make_paper_example();

/// f(x) = sin(pi (x + 1/2))^2. No tail bound, but f == 1 at every integer.
CandidateFunction make_sin_squared_shifted();

/// f = K(., x0), a member of the RKHS with norm sqrt(K(x0, x0)).
CandidateFunction make_kernel_section(const Kernel& k, double x0);

/// f given by an expression in x; no tail declarations.
CandidateFunction make_expression_function(std::string_view expression);

/// "constant:v", "poly:c0,c1,...", "paper_example", "sin_squared_shifted",
/// "expr:<expression>", "kernel_section:x0" (needs `k`).
CandidateFunction function_from_id(std::string_view id, const Kernel* k = nullptr);

struct TailSample {
    double alpha = 0.0;
    int sign = 1;
};

/// Samples f at x_start, ..., x_{start+count-1}; returns the smallest |f| and the
/// common sign, or nothing if the samples vanish or change sign.
std::optional<TailSample> tail_lower_bound(const CandidateFunction& f, const SequenceSpec& seq, std::int64_t start,
                                           std::int64_t count);

enum class DomainKind { FullLine, Interval, FiniteSet };

/// The set Omega on which membership is asked. Non-membership is certified on
/// the whole line; transfer to Omega rests on a user-declared accumulation point.
struct DomainSpec {
    DomainKind kind = DomainKind::FullLine;
    double lower = 0.0;
    double upper = 0.0;
    std::vector<double> points;
    bool accumulation_point = true;

    /// Throws `ConfigError` on unordered endpoints, repeated points, or a finite
    /// set flagged as having an accumulation point.
    void validate() const;
};

std::string to_string(DomainKind kind);

}  // namespace rkhs
