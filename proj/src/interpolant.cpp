#include "rkhs/interpolant.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>

#include "rkhs/error.hpp"
#include "rkhs/quadform.hpp"

namespace rkhs {

namespace {

constexpr unsigned kEscalatedBits = 1024;

std::vector<double> widen(const std::vector<double>& current, std::int64_t& cursor) {
    const std::set<double> present(current.begin(), current.end());
    std::vector<double> next = current;
    for (;; ++cursor) {
        const std::int64_t k = cursor / 2 + 1;
        const double t = static_cast<double>(k * (k + 1) / 2);
        const double x = cursor % 2 == 0 ? t : -t;
        if (!present.contains(x)) {
            next.push_back(x);
            ++cursor;
            return next;
        }
    }
}

std::vector<double> refine(const std::vector<double>& current) {
    std::vector<double> sorted = current;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> next = current;
    for (std::size_t i = 1; i < sorted.size(); ++i) next.push_back(sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2.0);
    return next;
}

}  // namespace

BigFloat min_norm_interpolant_norm(const Kernel& k, const CandidateFunction& f, std::span<const double> points,
                                   unsigned precision_bits, double ridge) {
    if (!(ridge >= 0.0)) throw PreconditionError("ridge must be nonnegative");
    if (points.empty()) return BigFloat(0.0, precision_bits);
    GramMatrix g = assemble_gram(k, points, precision_bits);
    if (ridge > 0.0) {
        for (std::size_t i = 0; i < g.size(); ++i) g.set(i, i, g(i, i) + ridge);
    }
    std::vector<BigFloat> v;
    v.reserve(points.size());
    bool all_zero = true;
    for (const double x : points) {
        v.push_back(f.eval(x, precision_bits));
        all_zero = all_zero && v.back().is_zero();
    }
    if (all_zero) return BigFloat(0.0, precision_bits);

    const PivotedLdlt ldlt(g, psd_tolerance(g));
    if (!ldlt.complete() || !(ldlt.min_pivot() > 0.0)) {
        throw NumericalError("Gram numerically singular; raise precision or ridge");
    }
    const std::vector<BigFloat> w = ldlt.solve(v);
    CompensatedSum energy(precision_bits);
    for (std::size_t i = 0; i < v.size(); ++i) energy.add(v[i] * w[i]);
    const BigFloat e = energy.value();
    if (e < 0.0) throw NumericalError("Gram numerically singular; raise precision or ridge");
    return sqrt(e);
}

NormTrace norm_growth_trace(const Kernel& k, const CandidateFunction& f, std::span<const double> base_points,
                            ExtensionRule rule, int steps, unsigned precision_bits, double ridge,
                            double divergence_factor) {
    if (steps < 1) throw PreconditionError("norm_growth_trace needs steps >= 1");
    if (base_points.empty()) throw PreconditionError("norm_growth_trace needs a nonempty base set");
    if (rule == ExtensionRule::Refine && base_points.size() < 2) {
        throw PreconditionError("refinement needs at least two base points");
    }
    NormTrace trace;
    trace.rule = rule;
    trace.regularization = ridge;
    trace.divergence_factor = divergence_factor;

    std::vector<double> current(base_points.begin(), base_points.end());
    std::int64_t cursor = 0;
    for (int step = 0; step <= steps; ++step) {
        if (step > 0) current = rule == ExtensionRule::Widen ? widen(current, cursor) : refine(current);
        std::optional<BigFloat> norm;
        unsigned used = precision_bits;
        try {
            norm = min_norm_interpolant_norm(k, f, current, precision_bits, ridge);
        } catch (const NumericalError& first) {
            if (precision_bits < kEscalatedBits) {
                used = kEscalatedBits;
                try {
                    norm = min_norm_interpolant_norm(k, f, current, kEscalatedBits, ridge);
                } catch (const NumericalError& second) {
                    trace.truncated = "step " + std::to_string(step) + ": " + second.what();
                }
            } else {
                trace.truncated = "step " + std::to_string(step) + ": " + first.what();
            }
        } catch (const Error& e) {
            trace.truncated = "step " + std::to_string(step) + ": " + e.what();
        }
        if (!norm) break;
        trace.point_sets.push_back(current);
        trace.norms.push_back(*norm);
        trace.precision_bits.push_back(used);
    }
    if (trace.norms.size() >= 2 && trace.norms.front() > 0.0) {
        trace.divergence_evidence = trace.norms.back() > trace.norms.front() * divergence_factor;
    }
    return trace;
}

void write_trace_csv(const NormTrace& trace, std::ostream& out) {
    out << "step,n_points,norm\n";
    for (std::size_t i = 0; i < trace.norms.size(); ++i) {
        out << i << ',' << trace.point_sets[i].size() << ',' << trace.norms[i].to_string() << '\n';
    }
}

std::string to_string(ExtensionRule rule) { return rule == ExtensionRule::Widen ? "widen" : "refine"; }

ExtensionRule extension_rule_from_string(std::string_view name) {
    if (name == "widen") return ExtensionRule::Widen;
    if (name == "refine") return ExtensionRule::Refine;
    throw ConfigError("unknown extension rule '" + std::string(name) + "'");
}

}  // namespace rkhs
