#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/functions.hpp"
#include "rkhs/kernels.hpp"

namespace rkhs {

/// Norm of the minimum-norm interpolant sqrt(v^T (G + ridge I)^{-1} v), v = f(points).
/// Throws `NumericalError` when the regularized Gram matrix does not factor completely.
BigFloat min_norm_interpolant_norm(const Kernel& k, const CandidateFunction& f, std::span<const double> points,
                                   unsigned precision_bits = kDefaultPrecisionBits, double ridge = 0.0);

enum class ExtensionRule {
    Widen,   // add +-T(1), +-T(2), ... in alternation, T the triangular numbers
    Refine,  // insert every midpoint between neighbours of the current set
};

struct NormTrace {
    ExtensionRule rule = ExtensionRule::Widen;
    std::vector<std::vector<double>> point_sets;  // nested; entry 0 is the base set
    std::vector<BigFloat> norms;
    std::vector<unsigned> precision_bits;  // precision actually used per entry
    double regularization = 0.0;
    double divergence_factor = 1e3;
    bool divergence_evidence = false;
    std::optional<std::string> truncated;  // reason the trace stopped early
};

/// Records the interpolant norm along `steps` nested extensions of `base_points`.
/// Singular Gram matrices are retried at 1024 bits; a step that still fails
/// ends the trace with the reason recorded.
NormTrace norm_growth_trace(const Kernel& k, const CandidateFunction& f, std::span<const double> base_points,
                            ExtensionRule rule, int steps, unsigned precision_bits = kDefaultPrecisionBits,
                            double ridge = 0.0, double divergence_factor = 1e3);

/// "step,n_points,norm" followed by one row per entry.
void write_trace_csv(const NormTrace& trace, std::ostream& out);

std::string to_string(ExtensionRule rule);
ExtensionRule extension_rule_from_string(std::string_view name);

}  // namespace rkhs
