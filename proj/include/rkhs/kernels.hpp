#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "rkhs/bigfloat.hpp"

namespace rkhs {

/// Constants (C, R) with |phi^(n)(0)| <= C * R^n * n! for every order n.
struct AnalyticConstants {
    double C = 1.0;
    double R = 1.0;
};

/// Profile phi on [0, inf) of a translation-invariant kernel K(x, y) = phi((x - y)^2).
struct RadialProfile {
    using DoubleFn = std::function<double(double)>;
    using ExtendedFn = std::function<BigFloat(const BigFloat&)>;
    /// phi_+^(n)(0) at the requested precision; throws `NumericalError` where it does not exist.
    using DerivativeFn = std::function<BigFloat(unsigned order, unsigned precision_bits)>;

    DoubleFn eval;
    ExtendedFn eval_extended;
    DerivativeFn derivative;  // empty when Taylor data is not supplied
    std::optional<AnalyticConstants> analytic_constants;
    bool decays_to_zero = false;
    bool nonneg = false;
    /// phi(r) <= phi(s) whenever r >= s. Lets pairwise maxima and long-range sums be bounded
    /// from the nearest pairs alone.
    bool nonincreasing = false;

    [[nodiscard]] double operator()(double r) const { return eval(r); }
    [[nodiscard]] BigFloat operator()(const BigFloat& r) const { return eval_extended(r); }
    [[nodiscard]] bool has_derivatives() const { return static_cast<bool>(derivative); }

    /// Throws `PreconditionError` when no derivative callback is present.
    [[nodiscard]] BigFloat derivative_at_zero(unsigned order, unsigned precision_bits = kDefaultPrecisionBits) const;
};

/// A positive-semidefinite kernel on the real line, evaluable in double and extended precision.
///
/// Kernels are immutable values; the evaluation callbacks are pure.
class Kernel {
public:
    using DoubleFn = std::function<double(double, double)>;
    using ExtendedFn = std::function<BigFloat(const BigFloat&, const BigFloat&)>;

    /// Non-translation-invariant kernel. `diag_sup` may be +inf.
    Kernel(std::string id, DoubleFn eval, ExtendedFn eval_extended, double diag_sup);
    /// Translation-invariant kernel built from a profile.
    Kernel(std::string id, RadialProfile profile);

    [[nodiscard]] const std::string& id() const { return id_; }

    [[nodiscard]] double operator()(double x, double y) const { return eval_(x, y); }
    [[nodiscard]] BigFloat operator()(const BigFloat& x, const BigFloat& y) const { return eval_extended_(x, y); }
    [[nodiscard]] BigFloat eval(double x, double y, unsigned precision_bits) const {
        return eval_extended_(BigFloat(x, precision_bits), BigFloat(y, precision_bits));
    }

    [[nodiscard]] const std::optional<RadialProfile>& profile() const { return profile_; }
    [[nodiscard]] bool translation_invariant() const { return profile_.has_value(); }

    /// C_K = sup_x K(x, x); +inf for unbounded kernels.
    [[nodiscard]] double diag_sup() const { return diag_sup_; }
    [[nodiscard]] bool is_bounded() const;

    /// True when the profile is nonnegative and nonincreasing, so |K(x, y)| is
    /// nonincreasing in |x - y|.
    [[nodiscard]] bool monotone_radial() const;

private:
    std::string id_;
    DoubleFn eval_;
    ExtendedFn eval_extended_;
    std::optional<RadialProfile> profile_;
    double diag_sup_;
};

/// phi(r) = exp(-r).
Kernel make_gaussian();
/// phi(r) = 1 / (1 + r).
Kernel make_inverse_quadratic();
/// phi(r) = exp(-sqrt(r)), i.e. exp(-|x - y|). Not differentiable at the origin.
Kernel make_laplace();
/// K(x, y) = exp(x * y). Unbounded and not translation-invariant.
Kernel make_exp_product();
/// Wraps a user profile. Throws `PreconditionError` if phi(0) <= 0 or phi(0) is not finite.
Kernel custom_radial(std::string id, RadialProfile phi);

/// Resolves "gaussian", "inverse_quadratic", "laplace", "exp_product", or
/// "custom:<expression in r>[;decays][;nonneg][;nonincreasing]".
Kernel kernel_from_id(std::string_view id);

}  // namespace rkhs
