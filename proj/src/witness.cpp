#include "rkhs/witness.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "rkhs/error.hpp"
#include "rkhs/quadform.hpp"

namespace rkhs {

namespace {

constexpr std::int64_t kMaxThreshold = std::int64_t{1} << 40;
constexpr std::int64_t kBruteForceLimit = 4096;
constexpr std::int64_t kEmpiricalSamples = 64;

/// Smallest ell >= 0 such that x_{ell+1} is inside the tail beyond `threshold`.
std::int64_t first_ell_in_tail(const SequenceSpec& seq, double threshold) {
    const bool positive = seq.direction() == Direction::Positive;
    const auto inside = [&](std::int64_t ell) { return positive ? seq(ell + 1) >= threshold : seq(ell + 1) <= threshold; };
    if (inside(0)) return 0;
    std::int64_t hi = 1;
    while (!inside(hi)) {
        if (hi > (std::int64_t{1} << 40)) throw PreconditionError("sequence " + seq.name() + " never enters the declared tail");
        hi *= 2;
    }
    std::int64_t lo = hi / 2;  // !inside(lo)
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        (inside(mid) ? hi : lo) = mid;
    }
    return hi;
}

std::optional<AlphaChoice> declared_alpha(const CandidateFunction& f, const SequenceSpec& seq) {
    if (f.integer_points() && seq.integer_valued()) {
        return AlphaChoice{f.integer_points()->alpha, f.integer_points()->sign, AlphaProvenance::Declared, 0};
    }
    if (const auto& tail = f.tail(seq.direction())) {
        return AlphaChoice{tail->alpha, tail->sign, AlphaProvenance::Declared, first_ell_in_tail(seq, tail->threshold)};
    }
    return std::nullopt;
}

FormEstimate dense_form(const Kernel& k, const CandidateFunction& f, double c, std::span<const double> points,
                        unsigned bits) {
    const GramMatrix g = assemble_gram(deflate(k, f, c), points, bits);
    const std::vector<double> ones(points.size(), 1.0);
    FormEstimate out;
    out.value = quadratic_form(g, ones);
    out.omitted_bound = BigFloat(0.0, bits);
    CompensatedSum magnitude(bits);
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) magnitude.add(abs(g(i, j)));
    }
    out.magnitude = magnitude.value();
    out.evaluation = FormEvaluation::Dense;
    return out;
}

/// Terms below phi(0) 2^-(bits+8) / N^2 are dropped; their total stays below
/// 2 phi(0) 2^-(bits+8).
BigFloat band_cutoff(const RadialProfile& phi, std::size_t n, unsigned bits) {
    const BigFloat at_zero = phi(BigFloat(0.0, bits));
    const BigFloat count(static_cast<double>(n), bits);
    return at_zero * BigFloat::power_of_two(-static_cast<long>(bits) - 8, bits) / (count * count);
}

FormEstimate banded_form(const Kernel& k, const CandidateFunction& f, double c, std::span<const double> points,
                         unsigned bits, std::int64_t band_limit) {
    const RadialProfile& phi = *k.profile();
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    std::vector<BigFloat> nodes;
    nodes.reserve(n);
    for (const double x : sorted) nodes.emplace_back(x, bits);

    const BigFloat cutoff = band_cutoff(phi, n, bits);
    const BigFloat diagonal = phi(BigFloat(0.0, bits)) * static_cast<double>(n);
    CompensatedSum off(bits);
    CompensatedSum omitted(bits);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const BigFloat d = nodes[j] - nodes[i];
            const BigFloat term = phi(d * d);
            if (term < cutoff || static_cast<std::int64_t>(j - i) > band_limit) {
                // Every later term in this row is no larger than `term`.
                omitted.add(2.0 * static_cast<double>(n - j) * term);
                break;
            }
            off.add(2.0 * term);
        }
    }
    CompensatedSum f_sum(bits);
    CompensatedSum f_abs(bits);
    for (const auto& x : nodes) {
        const BigFloat v = f(x);
        f_sum.add(v);
        f_abs.add(abs(v));
    }
    const BigFloat s = f_sum.value();

    FormEstimate out;
    out.value = diagonal + off.value() - BigFloat(c, bits) * BigFloat(c, bits) * s * s;
    out.omitted_bound = omitted.value();
    const BigFloat fa = f_abs.value();
    out.magnitude = diagonal + off.value() + out.omitted_bound + BigFloat(c, bits) * BigFloat(c, bits) * fa * fa;
    out.evaluation = FormEvaluation::Banded;
    return out;
}

/// The value is provably negative: even with every omitted term added and the
/// rounding margin allowed for, it stays below zero.
bool provably_negative(const FormEstimate& e, unsigned bits) {
    const BigFloat margin = 8.0 * BigFloat::epsilon(bits) * e.magnitude;
    return e.value + e.omitted_bound < -margin;
}

bool hypothesis_holds(const CandidateFunction& f, std::span<const double> points, const AlphaChoice& choice) {
    return std::all_of(points.begin(), points.end(),
                       [&](double x) { return choice.sign * f(x) >= choice.alpha; });
}

}  // namespace

std::int64_t n_threshold(double C_K, double c, double alpha) {
    if (!std::isfinite(C_K)) throw PreconditionError("kernel unbounded; the non-membership criterion needs a bounded kernel");
    if (!(C_K > 0.0)) throw PreconditionError("n_threshold needs C_K > 0");
    if (!(c > 0.0) || !(alpha > 0.0)) throw PreconditionError("n_threshold needs c > 0 and alpha > 0");
    const unsigned bits = kDefaultPrecisionBits;
    const BigFloat ca = BigFloat(c, bits) * BigFloat(alpha, bits);
    const BigFloat q = 2.0 * BigFloat(C_K, bits) / (ca * ca);
    if (!(q < static_cast<double>(kMaxThreshold))) throw PreconditionError("threshold 2 C_K / (c alpha)^2 is too large");
    return static_cast<std::int64_t>(floor(q).to_double()) + 1;
}

std::int64_t find_ell(const Kernel& k, const SequenceSpec& seq, std::int64_t N, const BigFloat& bound,
                      std::int64_t ell_max, std::int64_t ell_min, unsigned precision_bits) {
    if (N < 2) throw PreconditionError("find_ell needs N >= 2");
    if (!(bound > 0.0)) throw PreconditionError("find_ell needs a positive bound");
    if (!k.monotone_radial() && N > kBruteForceLimit) {
        throw PreconditionError("find_ell over " + std::to_string(N) + " points needs a monotone radial kernel");
    }
    std::vector<std::int64_t> schedule{ell_min};
    for (const std::int64_t ell : ell_schedule(ell_max, true)) {
        if (ell > ell_min) schedule.push_back(ell);
    }
    for (const std::int64_t ell : schedule) {
        if (ell > ell_max) break;
        const std::vector<double> points = seq.window(ell, N);
        if (max_offdiagonal(k, points, precision_bits) <= bound) return ell;
    }
    throw DecayNotMet("decay condition not met at this horizon (ell_max = " + std::to_string(ell_max) + ")");
}

AlphaChoice resolve_alpha(const CandidateFunction& f, const SequenceSpec& seq) {
    if (auto declared = declared_alpha(f, seq)) return *declared;
    if (const auto sample = tail_lower_bound(f, seq, 1, kEmpiricalSamples)) {
        return AlphaChoice{sample->alpha, sample->sign, AlphaProvenance::Empirical, 0};
    }
    throw PreconditionError("no uniform tail bound for " + f.id() + " along " + seq.name());
}

AlphaChoice classify_alpha(const CandidateFunction& f, const SequenceSpec& seq, double alpha) {
    if (auto declared = declared_alpha(f, seq); declared && declared->alpha >= alpha) {
        declared->alpha = alpha;
        return *declared;
    }
    AlphaChoice choice{alpha, 1, AlphaProvenance::Empirical, 0};
    if (const auto sample = tail_lower_bound(f, seq, 1, 2)) choice.sign = sample->sign;
    return choice;
}

FormEstimate deflated_form_ones(const Kernel& k, const CandidateFunction& f, double c, std::span<const double> points,
                                unsigned precision_bits, std::int64_t band_limit) {
    if (static_cast<std::int64_t>(points.size()) <= kDenseLimit) return dense_form(k, f, c, points, precision_bits);
    if (!k.monotone_radial()) {
        throw PreconditionError("witness of " + std::to_string(points.size()) +
                                " points needs a nonnegative nonincreasing radial profile for banded evaluation");
    }
    return banded_form(k, f, c, points, precision_bits, band_limit);
}

WitnessCertificate build_witness(const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq, double c,
                                 double alpha, std::int64_t ell_max, const WitnessOptions& options) {
    if (!(c > 0.0)) throw PreconditionError("build_witness needs c > 0");
    if (!(alpha > 0.0)) throw PreconditionError("build_witness needs alpha > 0");
    if (options.precision_bits < 128) throw PreconditionError("witness precision must be at least 128 bits");
    const unsigned bits = options.precision_bits;
    const std::int64_t n_star = n_threshold(k.diag_sup(), c, alpha);
    const AlphaChoice choice = classify_alpha(f, seq, alpha);

    const BigFloat ca = BigFloat(c, bits) * BigFloat(alpha, bits);
    const BigFloat bound = ca * ca / 2.0;

    std::int64_t n = n_star;
    for (int doubling = 0; doubling <= options.max_doublings; ++doubling, n *= 2) {
        const std::int64_t ell = find_ell(k, seq, n, bound, ell_max, choice.ell_min, bits);
        const std::vector<double> points = seq.window(ell, n);
        if (options.enforce_tail_hypothesis && choice.provenance == AlphaProvenance::Empirical &&
            !hypothesis_holds(f, points, choice)) {
            throw PreconditionError("alpha = " + std::to_string(alpha) + " not attained by " + f.id() +
                                    " on the witness points");
        }
        const FormEstimate r = deflated_form_ones(k, f, c, points, bits, options.band_limit);
        if (!provably_negative(r, bits)) continue;

        WitnessCertificate cert;
        cert.kernel_id = k.id();
        cert.function_id = f.id();
        cert.sequence_id = seq.name();
        cert.c = c;
        cert.alpha = alpha;
        cert.alpha_provenance = choice.provenance;
        cert.C_K = k.diag_sup();
        cert.N = n;
        cert.ell = ell;
        cert.doublings = doubling;
        cert.coefficients.assign(points.size(), 1.0);
        cert.points = points;
        cert.r_value = r.value;
        cert.truncation_bound = r.omitted_bound;
        cert.evaluation = r.evaluation;
        cert.band_limit = options.band_limit;
        cert.precision_bits = bits;
        return cert;
    }
    throw NumericalError("r not negative at cap (N = " + std::to_string(n / 2) +
                         "); alpha or the decay of the kernel may be mis-declared");
}

std::vector<double> default_c_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 8; ++k) grid.push_back(std::ldexp(1.0, -k));
    return grid;
}

SweepResult sweep_c(const Kernel& k, const CandidateFunction& f, const SequenceSpec& seq,
                    std::span<const double> c_grid, std::int64_t ell_max, const WitnessOptions& options,
                    std::optional<double> alpha, unsigned jobs) {
    if (c_grid.empty()) throw PreconditionError("sweep_c needs a nonempty c grid");
    for (const double c : c_grid) {
        if (!(c > 0.0)) throw PreconditionError("sweep_c needs positive c values");
    }
    SweepResult result;
    result.alpha = alpha ? classify_alpha(f, seq, *alpha) : resolve_alpha(f, seq);
    const double a = result.alpha.alpha;

    struct Outcome {
        std::optional<WitnessCertificate> cert;
        std::string failure;
    };
    const auto run_one = [&](double c) {
        Outcome out;
        try {
            out.cert = build_witness(k, f, seq, c, a, ell_max, options);
        } catch (const Error& e) {
            out.failure = e.what();
        }
        return out;
    };

    std::vector<Outcome> outcomes(c_grid.size());
    const std::size_t width = std::max(1u, jobs);
    for (std::size_t start = 0; start < c_grid.size(); start += width) {
        std::vector<std::future<Outcome>> wave;
        const std::size_t stop = std::min(c_grid.size(), start + width);
        for (std::size_t i = start; i + 1 < stop; ++i) wave.push_back(std::async(std::launch::async, run_one, c_grid[i]));
        outcomes[stop - 1] = run_one(c_grid[stop - 1]);
        for (std::size_t i = start; i + 1 < stop; ++i) outcomes[i] = wave[i - start].get();
    }

    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        const double c = c_grid[i];
        result.c_values.push_back(c);
        const std::int64_t n_star = n_threshold(k.diag_sup(), c, a);
        result.n_star.push_back(n_star);
        result.scaled_threshold.push_back(static_cast<double>(n_star) * c * c * a * a / (2.0 * k.diag_sup()));
        if (outcomes[i].cert) {
            result.certificates.push_back(std::move(*outcomes[i].cert));
        } else {
            result.failures.push_back({c, outcomes[i].failure});
        }
    }
    return result;
}

namespace {

/// Direct re-evaluation of sum_{i,j} a_i a_j (K(x_i, x_j) - c^2 f(x_i) f(x_j)).
FormEstimate direct_sum(const WitnessCertificate& cert, const Kernel& k, const CandidateFunction& f) {
    const unsigned bits = cert.precision_bits;
    const std::size_t n = cert.points.size();
    const BigFloat c(cert.c, bits);
    std::vector<BigFloat> x;
    std::vector<BigFloat> fx;
    for (const double p : cert.points) {
        x.emplace_back(p, bits);
        fx.push_back(f(x.back()));
    }
    CompensatedSum sum(bits);
    CompensatedSum magnitude(bits);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const BigFloat term =
                BigFloat(cert.coefficients[i], bits) * BigFloat(cert.coefficients[j], bits) * (k(x[i], x[j]) - c * c * fx[i] * fx[j]);
            sum.add(term);
            magnitude.add(abs(term));
        }
    }
    return {sum.value(), BigFloat(0.0, bits), magnitude.value(), FormEvaluation::Dense};
}

/// Banded re-evaluation walking each row outward from the diagonal in both directions.
FormEstimate banded_sum(const WitnessCertificate& cert, const Kernel& k, const CandidateFunction& f) {
    const unsigned bits = cert.precision_bits;
    const RadialProfile& phi = *k.profile();
    std::vector<double> sorted = cert.points;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const BigFloat cutoff = band_cutoff(phi, n, bits);

    CompensatedSum kernel_part(bits);
    CompensatedSum omitted(bits);
    CompensatedSum f_sum(bits);
    CompensatedSum f_abs(bits);
    for (std::size_t i = 0; i < n; ++i) {
        const BigFloat xi(sorted[i], bits);
        kernel_part.add(k(xi, xi));
        const BigFloat v = f(xi);
        f_sum.add(v);
        f_abs.add(abs(v));
        for (int side : {-1, 1}) {
            for (std::int64_t step = 1;; ++step) {
                const std::int64_t j = static_cast<std::int64_t>(i) + side * step;
                if (j < 0 || j >= static_cast<std::int64_t>(n)) break;
                const BigFloat term = k(xi, BigFloat(sorted[static_cast<std::size_t>(j)], bits));
                if (term < cutoff || step > cert.band_limit) {
                    const std::int64_t remaining = side > 0 ? static_cast<std::int64_t>(n) - j : j + 1;
                    omitted.add(term * static_cast<double>(remaining));
                    break;
                }
                kernel_part.add(term);
            }
        }
    }
    const BigFloat c(cert.c, bits);
    const BigFloat s = f_sum.value();
    const BigFloat fa = f_abs.value();
    FormEstimate out;
    out.value = kernel_part.value() - c * c * s * s;
    out.omitted_bound = omitted.value();
    out.magnitude = kernel_part.value() + out.omitted_bound + c * c * fa * fa;
    out.evaluation = FormEvaluation::Banded;
    return out;
}

}  // namespace

bool verify_certificate(const WitnessCertificate& cert, const Kernel& k, const CandidateFunction& f) {
    if (cert.kernel_id != k.id()) throw PreconditionError("certificate kernel '" + cert.kernel_id + "' does not match '" + k.id() + "'");
    if (cert.function_id != f.id()) {
        throw PreconditionError("certificate function '" + cert.function_id + "' does not match '" + f.id() + "'");
    }
    const unsigned bits = cert.precision_bits;
    if (bits < 128) return false;
    if (cert.N < 1 || cert.points.size() != static_cast<std::size_t>(cert.N) ||
        cert.coefficients.size() != cert.points.size()) {
        return false;
    }
    if (!(cert.c > 0.0) || !(cert.alpha > 0.0) || !std::isfinite(k.diag_sup()) || cert.C_K != k.diag_sup()) return false;

    // N > 2 C_K / (c alpha)^2, compared without division.
    const BigFloat ca = BigFloat(cert.c, bits) * BigFloat(cert.alpha, bits);
    if (!(BigFloat(static_cast<double>(cert.N), bits) * ca * ca > 2.0 * BigFloat(cert.C_K, bits))) return false;

    // Points must be the stated window of the stated sequence when it is resolvable.
    try {
        const SequenceSpec seq = sequence_from_id(cert.sequence_id);
        if (seq.window(cert.ell, cert.N) != cert.points) return false;
    } catch (const ConfigError&) {
    }

    FormEstimate fresh;
    if (cert.evaluation == FormEvaluation::Dense) {
        if (cert.N > kDenseLimit * 8) return false;
        fresh = direct_sum(cert, k, f);
    } else {
        if (!k.monotone_radial()) return false;
        if (!std::all_of(cert.coefficients.begin(), cert.coefficients.end(), [](double a) { return a == 1.0; })) {
            return false;
        }
        fresh = banded_sum(cert, k, f);
    }

    if (!(cert.r_value < 0.0)) return false;
    const BigFloat margin = 8.0 * BigFloat::epsilon(bits) * fresh.magnitude;
    if (!(fresh.value + fresh.omitted_bound < -margin)) return false;
    const BigFloat allowed =
        BigFloat::power_of_two(-100, bits) * abs(cert.r_value) + cert.truncation_bound + fresh.omitted_bound;
    return abs(fresh.value - cert.r_value) <= allowed;
}

std::string to_string(AlphaProvenance provenance) {
    return provenance == AlphaProvenance::Declared ? "declared" : "empirical";
}

std::string to_string(FormEvaluation evaluation) { return evaluation == FormEvaluation::Dense ? "dense" : "banded"; }

}  // namespace rkhs
