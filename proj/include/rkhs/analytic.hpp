#pragma once

#include <optional>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/kernels.hpp"

namespace rkhs {

/// (2n)! / n!, exact.
BigInt factorial_ratio(unsigned n);

/// D^{n,n} K(x, x) = (-1)^n (2n)!/n! phi^(n)(0) for a radial kernel; independent of x.
/// Throws `PreconditionError` when the profile lacks Taylor data.
BigFloat dnn_diagonal(const Kernel& k, unsigned n, unsigned precision_bits = kDefaultPrecisionBits);

/// Central finite-difference estimate of d^{2n} K / dv^n dw^n at (x, x), for n in {1, 2}.
BigFloat fd_cross_derivative(const Kernel& k, unsigned n, double x, double step,
                             unsigned precision_bits = kDefaultPrecisionBits);

/// norm_f * sqrt(D^{n,n} K(x, x)), a bound on |f^(n)(x)| for every f with ||f||_K <= norm_f.
BigFloat member_derivative_bound(const Kernel& k, double norm_f, unsigned n,
                                 unsigned precision_bits = kDefaultPrecisionBits);

/// Exact comparison  (2n)!/n! |phi^(n)(0)| <= C 4^n R^n (n!)^2  in rational arithmetic.
/// Every operand is a binary floating-point value, so no rounding enters.
bool envelope_dominates(const BigFloat& derivative_at_zero, const AnalyticConstants& constants, unsigned n);

struct DerivativeReport {
    std::vector<unsigned> orders;
    std::vector<BigFloat> dnn_values;
    std::optional<std::vector<BigFloat>> fd_values;  // orders 1 and 2 only, at x = 0
    AnalyticConstants growth_constants;
    double norm_f = 1.0;
    std::vector<BigFloat> exact_bounds;  // norm_f sqrt(dnn)
    std::vector<BigFloat> bound_curve;   // norm_f sqrt(C) (2 sqrt(R))^n n!
    std::vector<bool> dominated;         // exact check per order
    [[nodiscard]] bool all_dominated() const;
};

/// Tabulates the derivative bounds for n = 0..n_max against the analytic envelope.
/// Throws `PreconditionError` when the profile has no analytic constants.
DerivativeReport analyticity_envelope(const Kernel& k, double norm_f, unsigned n_max,
                                      unsigned precision_bits = kDefaultPrecisionBits, bool with_fd = true);

}  // namespace rkhs
