#include "rkhs/analytic.hpp"

#include <gmp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

BigInt factorial(unsigned n) {
    BigInt out = 1;
    for (unsigned k = 2; k <= n; ++k) out *= k;
    return out;
}

/// x = mantissa * 2^exponent exactly.
struct Dyadic {
    BigInt mantissa;
    long exponent = 0;
};

Dyadic to_dyadic(const BigFloat& x) {
    if (!x.is_finite()) throw PreconditionError("exact comparison needs finite operands");
    if (x.is_zero()) return {0, 0};
    mpz_t z;
    mpz_init(z);
    const long exponent = mpfr_get_z_2exp(z, x.raw());
    std::unique_ptr<char, void (*)(void*)> text(mpz_get_str(nullptr, 10, z), std::free);
    mpz_clear(z);
    return {BigInt(text.get()), exponent};
}

/// a <= b for dyadic rationals.
bool dyadic_less_equal(const Dyadic& a, const Dyadic& b) {
    const long shift = std::min(a.exponent, b.exponent);
    const BigInt lhs = a.mantissa << static_cast<unsigned>(a.exponent - shift);
    const BigInt rhs = b.mantissa << static_cast<unsigned>(b.exponent - shift);
    return lhs <= rhs;
}

Dyadic times(const Dyadic& a, const BigInt& k) { return {a.mantissa * k, a.exponent}; }

Dyadic power(const Dyadic& a, unsigned n) {
    Dyadic out{1, 0};
    for (unsigned i = 0; i < n; ++i) out = {out.mantissa * a.mantissa, out.exponent + a.exponent};
    return out;
}

const RadialProfile& analytic_profile(const Kernel& k) {
    if (!k.profile() || !k.profile()->has_derivatives()) {
        throw PreconditionError("requires analytic radial profile (kernel " + k.id() + ")");
    }
    return *k.profile();
}

BigFloat derivative_or_throw(const RadialProfile& phi, unsigned n, unsigned bits) {
    try {
        return phi.derivative_at_zero(n, bits);
    } catch (const NumericalError& e) {
        throw PreconditionError(std::string("requires analytic radial profile: ") + e.what());
    }
}

}  // namespace

BigInt factorial_ratio(unsigned n) {
    BigInt out = 1;
    for (unsigned k = n + 1; k <= 2 * n; ++k) out *= k;
    return out;
}

BigFloat dnn_diagonal(const Kernel& k, unsigned n, unsigned precision_bits) {
    const RadialProfile& phi = analytic_profile(k);
    const BigFloat d = derivative_or_throw(phi, n, precision_bits);
    const BigFloat ratio = BigFloat::from_integer(factorial_ratio(n), precision_bits);
    return n % 2 == 0 ? ratio * d : -(ratio * d);
}

BigFloat fd_cross_derivative(const Kernel& k, unsigned n, double x, double step, unsigned precision_bits) {
    if (!(step > 0.0)) throw PreconditionError("finite-difference step must be positive");
    if (n == 0 || n > 2) throw PreconditionError("stencil not implemented for order " + std::to_string(n));
    const BigFloat h(step, precision_bits);
    const BigFloat x0(x, precision_bits);
    // Tensor product of the one-dimensional central stencils in v and w.
    if (n == 1) {
        const BigFloat p = x0 + h;
        const BigFloat m = x0 - h;
        return (k(p, p) - k(p, m) - k(m, p) + k(m, m)) / (4.0 * h * h);
    }
    constexpr std::array<int, 3> offsets{-1, 0, 1};
    constexpr std::array<double, 3> weights{1.0, -2.0, 1.0};
    BigFloat sum(0.0, precision_bits);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const BigFloat v = x0 + h * static_cast<double>(offsets[i]);
            const BigFloat w = x0 + h * static_cast<double>(offsets[j]);
            sum += k(v, w) * (weights[i] * weights[j]);
        }
    }
    return sum / pow(h, 4);
}

BigFloat member_derivative_bound(const Kernel& k, double norm_f, unsigned n, unsigned precision_bits) {
    if (!(norm_f >= 0.0)) throw PreconditionError("norm_f must be nonnegative");
    const BigFloat dnn = dnn_diagonal(k, n, precision_bits);
    if (dnn < 0.0) throw NumericalError("profile inconsistent with PSD at order " + std::to_string(n));
    return BigFloat(norm_f, precision_bits) * sqrt(dnn);
}

bool envelope_dominates(const BigFloat& derivative_at_zero, const AnalyticConstants& constants, unsigned n) {
    const Dyadic d = to_dyadic(abs(derivative_at_zero));
    const Dyadic c = to_dyadic(BigFloat(constants.C, 64));
    const Dyadic r = to_dyadic(BigFloat(constants.R, 64));
    const BigInt nf = factorial(n);
    const Dyadic lhs = times(d, factorial_ratio(n));
    Dyadic rhs = power(r, n);
    rhs = {rhs.mantissa * c.mantissa * nf * nf, rhs.exponent + c.exponent + 2 * static_cast<long>(n)};
    return dyadic_less_equal(lhs, rhs);
}

bool DerivativeReport::all_dominated() const {
    return std::all_of(dominated.begin(), dominated.end(), [](bool b) { return b; });
}

DerivativeReport analyticity_envelope(const Kernel& k, double norm_f, unsigned n_max, unsigned precision_bits,
                                      bool with_fd) {
    if (!(norm_f >= 0.0)) throw PreconditionError("norm_f must be nonnegative");
    const RadialProfile& phi = analytic_profile(k);
    if (!phi.analytic_constants) throw PreconditionError("requires analytic radial profile: " + k.id() + " has no analytic constants");
    const AnalyticConstants constants = *phi.analytic_constants;

    DerivativeReport report;
    report.growth_constants = constants;
    report.norm_f = norm_f;
    const BigFloat norm(norm_f, precision_bits);
    const BigFloat sqrt_c = sqrt(BigFloat(constants.C, precision_bits));
    const BigFloat two_sqrt_r = 2.0 * sqrt(BigFloat(constants.R, precision_bits));
    BigFloat envelope = norm * sqrt_c;  // n = 0
    for (unsigned n = 0; n <= n_max; ++n) {
        if (n > 0) envelope = envelope * two_sqrt_r * static_cast<double>(n);
        const BigFloat d = derivative_or_throw(phi, n, precision_bits);
        const BigFloat dnn = dnn_diagonal(k, n, precision_bits);
        report.orders.push_back(n);
        report.dnn_values.push_back(dnn);
        report.exact_bounds.push_back(norm * sqrt(max(dnn, BigFloat(0.0, precision_bits))));
        report.bound_curve.push_back(envelope);
        report.dominated.push_back(dnn >= 0.0 && envelope_dominates(d, constants, n));
    }
    if (with_fd && k.translation_invariant()) {
        std::vector<BigFloat> fd;
        for (unsigned n = 1; n <= std::min(2u, n_max); ++n) fd.push_back(fd_cross_derivative(k, n, 0.0, 1e-4, precision_bits));
        report.fd_values = std::move(fd);
    }
    return report;
}

}  // namespace rkhs
