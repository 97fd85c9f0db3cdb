#include "rkhs/kernels.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "rkhs/error.hpp"
#include "rkhs/expression.hpp"

namespace rkhs {

namespace {

BigInt factorial(unsigned n) {
    BigInt out = 1;
    for (unsigned k = 2; k <= n; ++k) out *= k;
    return out;
}

BigFloat signed_unit(unsigned order, unsigned bits) { return BigFloat(order % 2 == 0 ? 1.0 : -1.0, bits); }

}  // namespace

BigFloat RadialProfile::derivative_at_zero(unsigned order, unsigned precision_bits) const {
    if (!derivative) throw PreconditionError("radial profile has no Taylor data at the origin");
    return derivative(order, precision_bits);
}

Kernel::Kernel(std::string id, DoubleFn eval, ExtendedFn eval_extended, double diag_sup)
    : id_(std::move(id)), eval_(std::move(eval)), eval_extended_(std::move(eval_extended)), diag_sup_(diag_sup) {}

Kernel::Kernel(std::string id, RadialProfile profile) : id_(std::move(id)) {
    // (x - y)^2 == (y - x)^2 bit for bit, so symmetry is exact.
    eval_ = [phi = profile.eval](double x, double y) {
        const double d = x - y;
        return phi(d * d);
    };
    eval_extended_ = [phi = profile.eval_extended](const BigFloat& x, const BigFloat& y) {
        const BigFloat d = x - y;
        return phi(d * d);
    };
    diag_sup_ = profile.eval(0.0);
    profile_ = std::move(profile);
}

bool Kernel::is_bounded() const { return std::isfinite(diag_sup_); }

bool Kernel::monotone_radial() const { return profile_ && profile_->nonneg && profile_->nonincreasing; }

Kernel make_gaussian() {
    RadialProfile phi;
    phi.eval = [](double r) { return std::exp(-r); };
    phi.eval_extended = [](const BigFloat& r) { return exp(-r); };
    phi.derivative = [](unsigned n, unsigned bits) { return signed_unit(n, bits); };
    phi.analytic_constants = AnalyticConstants{1.0, 1.0};
    phi.decays_to_zero = true;
    phi.nonneg = true;
    phi.nonincreasing = true;
    return Kernel("gaussian", std::move(phi));
}

Kernel make_inverse_quadratic() {
    RadialProfile phi;
    phi.eval = [](double r) { return 1.0 / (1.0 + r); };
    phi.eval_extended = [](const BigFloat& r) { return 1.0 / (1.0 + r); };
    phi.derivative = [](unsigned n, unsigned bits) {
        return signed_unit(n, bits) * BigFloat::from_integer(factorial(n), bits);
    };
    phi.analytic_constants = AnalyticConstants{1.0, 1.0};
    phi.decays_to_zero = true;
    phi.nonneg = true;
    phi.nonincreasing = true;
    return Kernel("inverse_quadratic", std::move(phi));
}

Kernel make_laplace() {
    RadialProfile phi;
    phi.eval = [](double r) { return std::exp(-std::sqrt(r)); };
    phi.eval_extended = [](const BigFloat& r) { return exp(-sqrt(r)); };
    phi.derivative = [](unsigned n, unsigned bits) {
        if (n == 0) return BigFloat(1.0, bits);
        throw NumericalError("profile not differentiable at origin: exp(-sqrt(r)) has no right derivative at 0");
    };
    phi.decays_to_zero = true;
    phi.nonneg = true;
    phi.nonincreasing = true;
    return Kernel("laplace", std::move(phi));
}

Kernel make_exp_product() {
    return Kernel(
        "exp_product", [](double x, double y) { return std::exp(x * y); },
        [](const BigFloat& x, const BigFloat& y) { return exp(x * y); }, std::numeric_limits<double>::infinity());
}

Kernel custom_radial(std::string id, RadialProfile phi) {
    if (!phi.eval || !phi.eval_extended) throw PreconditionError("custom profile needs double and extended evaluators");
    const double at_zero = phi.eval(0.0);
    if (!(at_zero > 0.0) || !std::isfinite(at_zero)) {
        throw PreconditionError("custom profile must satisfy 0 < phi(0) < inf, got phi(0) = " + std::to_string(at_zero));
    }
    return Kernel(std::move(id), std::move(phi));
}

Kernel kernel_from_id(std::string_view id) {
    if (id == "gaussian") return make_gaussian();
    if (id == "inverse_quadratic") return make_inverse_quadratic();
    if (id == "laplace") return make_laplace();
    if (id == "exp_product") return make_exp_product();
    constexpr std::string_view prefix = "custom:";
    if (id.substr(0, prefix.size()) == prefix) {
        std::string_view rest = id.substr(prefix.size());
        std::vector<std::string_view> parts;
        for (std::size_t cut; (cut = rest.find(';')) != std::string_view::npos; rest.remove_prefix(cut + 1)) {
            parts.push_back(rest.substr(0, cut));
        }
        parts.push_back(rest);
        const Expression expr = Expression::parse(parts.front(), "r");
        RadialProfile phi;
        phi.eval = [expr](double r) { return expr(r); };
        phi.eval_extended = [expr](const BigFloat& r) { return expr(r); };
        for (std::size_t i = 1; i < parts.size(); ++i) {
            if (parts[i] == "decays") {
                phi.decays_to_zero = true;
            } else if (parts[i] == "nonneg") {
                phi.nonneg = true;
            } else if (parts[i] == "nonincreasing") {
                phi.nonincreasing = true;
            } else {
                throw ConfigError("unknown custom kernel flag '" + std::string(parts[i]) + "'");
            }
        }
        return custom_radial(std::string(id), std::move(phi));
    }
    throw ConfigError("unknown kernel identifier '" + std::string(id) + "'");
}

}  // namespace rkhs
