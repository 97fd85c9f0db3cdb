#include "rkhs/sequences.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

std::int64_t triangular_number(std::int64_t n) { return n * (n + 1) / 2; }

std::string shortest(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, result.ptr);
}

}  // namespace

SequenceSpec triangular_sequence(Direction direction) {
    return SequenceSpec(direction == Direction::Positive ? "triangular+" : "triangular-", SequenceKind::Triangular,
                        direction, true);
}

SequenceSpec arithmetic_sequence(double step) {
    if (step == 0.0 || !std::isfinite(step)) throw PreconditionError("arithmetic sequence needs a finite nonzero step");
    SequenceSpec seq("arithmetic:" + shortest(step), SequenceKind::Arithmetic,
                     step > 0 ? Direction::Positive : Direction::Negative, false);
    seq.step_ = step;
    return seq;
}

SequenceSpec custom_sequence(std::string_view expression) {
    Expression expr = Expression::parse(expression, "n");
    const double far = expr(1000.0);
    SequenceSpec seq("custom:" + std::string(expression), SequenceKind::Custom,
                     far < 0 ? Direction::Negative : Direction::Positive, false);
    seq.expr_ = std::move(expr);
    return seq;
}

SequenceSpec sequence_from_id(std::string_view id) {
    if (id == "triangular+") return triangular_sequence(Direction::Positive);
    if (id == "triangular-") return triangular_sequence(Direction::Negative);
    if (id.starts_with("arithmetic:")) {
        return arithmetic_sequence(parse_real(id.substr(11)));
    }
    if (id.starts_with("custom:")) return custom_sequence(id.substr(7));
    throw ConfigError("unknown sequence identifier '" + std::string(id) + "'");
}

bool SequenceSpec::integer_valued() const {
    if (kind_ == SequenceKind::Triangular) return true;
    if (kind_ == SequenceKind::Arithmetic) return std::trunc(step_) == step_;
    return false;
}

std::optional<std::int64_t> SequenceSpec::exact(std::int64_t n) const {
    if (kind_ != SequenceKind::Triangular) return std::nullopt;
    const std::int64_t t = triangular_number(n);
    return direction_ == Direction::Positive ? t : -t;
}

double SequenceSpec::operator()(std::int64_t n) const {
    if (n < 1) throw PreconditionError("sequence index must be >= 1, got " + std::to_string(n));
    switch (kind_) {
        case SequenceKind::Triangular: return static_cast<double>(*exact(n));
        case SequenceKind::Arithmetic: return static_cast<double>(n) * step_;
        case SequenceKind::Custom: return (*expr_)(static_cast<double>(n));
    }
    return 0.0;
}

std::vector<double> SequenceSpec::window(std::int64_t ell, std::int64_t count) const {
    std::vector<double> points;
    points.reserve(static_cast<std::size_t>(count));
    for (std::int64_t n = 1; n <= count; ++n) points.push_back((*this)(ell + n));
    return points;
}

bool is_strictly_monotone(const SequenceSpec& seq, std::int64_t count) {
    for (std::int64_t n = 1; n < count; ++n) {
        const double a = seq(n);
        const double b = seq(n + 1);
        if (seq.direction() == Direction::Positive ? !(b > a) : !(b < a)) return false;
    }
    return true;
}

std::int64_t gap_lower_bound(const SequenceSpec& seq, std::int64_t n, std::int64_t m, std::int64_t ell) {
    if (seq.kind() != SequenceKind::Triangular) throw PreconditionError("no closed-form gap for sequence " + seq.name());
    if (n == m) throw PreconditionError("gap_lower_bound needs n != m");
    if (n < 1 || m < 1 || ell < 0) throw PreconditionError("gap_lower_bound needs n, m >= 1 and ell >= 0");
    const std::int64_t gap = std::abs(*seq.exact(ell + n) - *seq.exact(ell + m));
    if (gap < ell) throw std::logic_error("triangular gap below ell");
    return gap;
}

std::vector<std::int64_t> ell_schedule(std::int64_t ell_max, bool include_zero) {
    std::vector<std::int64_t> out;
    if (include_zero) out.push_back(0);
    std::int64_t ell = 1;
    for (; ell <= ell_max; ell *= 2) out.push_back(ell);
    if (ell_max >= 1 && out.back() != ell_max) out.push_back(ell_max);
    return out;
}

BigFloat max_offdiagonal(const Kernel& k, std::span<const double> points, unsigned precision_bits) {
    BigFloat best(0.0, precision_bits);
    if (points.size() < 2) return best;
    if (k.monotone_radial()) {
        std::vector<double> sorted(points.begin(), points.end());
        std::sort(sorted.begin(), sorted.end());
        BigFloat min_gap = BigFloat::infinity(1, precision_bits);
        for (std::size_t i = 1; i < sorted.size(); ++i) {
            min_gap = min(min_gap, BigFloat(sorted[i], precision_bits) - BigFloat(sorted[i - 1], precision_bits));
        }
        return (*k.profile())(min_gap * min_gap);
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            best = max(best, abs(k.eval(points[i], points[j], precision_bits)));
        }
    }
    return best;
}

std::optional<SignObstruction> sign_obstruction_check(std::span<const int> signs) {
    if (signs.size() < 3) throw PreconditionError("sign obstruction needs at least 3 signs");
    for (const int s : signs) {
        if (s != 1 && s != -1) throw PreconditionError("signs must be +1 or -1");
    }
    SignObstruction out;
    out.triple = {1, 2, 3};
    if (signs[0] == signs[1]) {
        out.agreeing = {1, 2};
    } else if (signs[0] == signs[2]) {
        out.agreeing = {1, 3};
    } else {
        out.agreeing = {2, 3};
    }
    return out;
}

DecayReport verify_decay(const Kernel& k, const SequenceSpec& seq, std::int64_t window_N, std::int64_t ell_max,
                         const BigFloat& threshold, unsigned precision_bits) {
    if (window_N < 2) throw PreconditionError("verify_decay needs window_N >= 2");
    if (ell_max < 1) throw PreconditionError("verify_decay needs ell_max >= 1");

    DecayReport report;
    report.window = window_N;
    report.threshold = threshold;
    report.ell_values = ell_schedule(ell_max);

    bool out_of_range = false;
    for (const std::int64_t ell : report.ell_values) {
        const std::vector<double> points = seq.window(ell, window_N);
        BigFloat value = max_offdiagonal(k, points, precision_bits);
        if (!value.is_finite() || value > std::numeric_limits<double>::max()) out_of_range = true;
        report.max_offdiag.push_back(std::move(value));
    }

    const auto& trace = report.max_offdiag;
    const std::size_t half = trace.size() / 2;
    bool nonincreasing = true;
    bool growing = trace.size() - half >= 2;
    for (std::size_t i = half; i + 1 < trace.size(); ++i) {
        if (trace[i + 1] > trace[i]) nonincreasing = false;
        if (!(trace[i + 1] > trace[i])) growing = false;
    }

    if (out_of_range || growing) {
        report.reason = "divergent";
    } else if (!(trace.back() <= threshold)) {
        report.reason = "threshold not reached";
    } else if (!nonincreasing) {
        report.reason = "trace not monotone";
    } else {
        report.passed = true;
    }

    if (report.passed && seq.kind() == SequenceKind::Triangular && k.profile() && k.profile()->decays_to_zero) {
        report.evidence = Evidence::Proved;
    }

    if (!k.translation_invariant() && window_N >= 3) {
        std::vector<int> signs;
        for (const double x : seq.window(report.ell_values.back(), window_N)) signs.push_back(x < 0 ? -1 : 1);
        report.sign_obstruction = sign_obstruction_check(signs);
    }
    return report;
}

std::string to_string(Direction direction) { return direction == Direction::Positive ? "+inf" : "-inf"; }

std::string to_string(Evidence evidence) { return evidence == Evidence::Proved ? "proved" : "empirical"; }

}  // namespace rkhs
