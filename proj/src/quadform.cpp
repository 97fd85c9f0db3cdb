#include "rkhs/quadform.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

std::string shortest(double v) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof buffer, v);
    return std::string(buffer, result.ptr);
}

struct FormValue {
    BigFloat value;
    BigFloat magnitude;  // sum of |a_n a_m g_nm|
};

FormValue evaluate_form(const GramMatrix& g, std::span<const BigFloat> a) {
    const unsigned bits = g.precision_bits();
    CompensatedSum sum(bits);
    CompensatedSum magnitude(bits);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (a[n].is_zero()) continue;
        for (std::size_t m = 0; m < g.size(); ++m) {
            const BigFloat term = a[n] * a[m] * g(n, m);
            sum.add(term);
            magnitude.add(abs(term));
        }
    }
    return {sum.value(), magnitude.value()};
}

void normalize_max(std::vector<BigFloat>& a) {
    BigFloat scale(0.0, a.empty() ? kDefaultPrecisionBits : a.front().precision());
    for (const auto& v : a) scale = max(scale, abs(v));
    if (scale.is_zero()) return;
    for (auto& v : a) v /= scale;
}

}  // namespace

void CompensatedSum::add(const BigFloat& term) {
    const BigFloat t = sum_ + term;
    if (abs(sum_) >= abs(term)) {
        carry_ += (sum_ - t) + term;
    } else {
        carry_ += (term - t) + sum_;
    }
    sum_ = t;
}

GramMatrix::GramMatrix(std::string kernel_id, std::vector<double> points, unsigned precision_bits)
    : kernel_id_(std::move(kernel_id)),
      points_(std::move(points)),
      precision_bits_(precision_bits),
      n_(points_.size()),
      entries_(n_ * n_, BigFloat(0.0, precision_bits)) {}

GramMatrix GramMatrix::from_entries(std::vector<BigFloat> entries, std::size_t n, unsigned precision_bits,
                                    std::string kernel_id) {
    if (entries.size() != n * n) throw PreconditionError("Gram entries must form an n x n matrix");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (!(entries[i * n + j] == entries[j * n + i])) throw PreconditionError("Gram entries must be symmetric");
        }
    }
    GramMatrix g(std::move(kernel_id), std::vector<double>(n, 0.0), precision_bits);
    for (std::size_t i = 0; i < n * n; ++i) g.entries_[i] = entries[i].with_precision(precision_bits);
    return g;
}

void GramMatrix::set(std::size_t i, std::size_t j, const BigFloat& value) {
    entries_[i * n_ + j] = value;
    entries_[j * n_ + i] = value;
}

DeflatedKernel::DeflatedKernel(Kernel base, CandidateFunction f, double c)
    : base_(std::move(base)), f_(std::move(f)), c_(c) {}

std::string DeflatedKernel::id() const { return base_.id() + " - c^2 f f [f=" + f_.id() + ", c=" + shortest(c_) + "]"; }

double DeflatedKernel::operator()(double x, double y) const { return base_(x, y) - c_ * c_ * f_(x) * f_(y); }

BigFloat DeflatedKernel::operator()(const BigFloat& x, const BigFloat& y) const {
    const BigFloat c(c_, std::max(x.precision(), y.precision()));
    return base_(x, y) - c * c * f_(x) * f_(y);
}

DeflatedKernel deflate(const Kernel& k, const CandidateFunction& f, double c) {
    if (!(c > 0.0)) throw PreconditionError("deflation constant c must be positive");
    return DeflatedKernel(k, f, c);
}

GramMatrix assemble_gram(std::string kernel_id, const BivariateFn& eval, std::span<const double> points,
                         unsigned precision_bits) {
    if (precision_bits < 53) throw PreconditionError("precision_bits must be >= 53");
    std::vector<double> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw PreconditionError("coincident nodes in Gram assembly");
    }
    GramMatrix g(std::move(kernel_id), std::vector<double>(points.begin(), points.end()), precision_bits);
    std::vector<BigFloat> nodes;
    nodes.reserve(points.size());
    for (const double x : points) nodes.emplace_back(x, precision_bits);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) g.set(i, j, eval(nodes[i], nodes[j]).with_precision(precision_bits));
    }
    return g;
}

GramMatrix assemble_gram(const Kernel& k, std::span<const double> points, unsigned precision_bits) {
    return assemble_gram(
        k.id(), [&k](const BigFloat& x, const BigFloat& y) { return k(x, y); }, points, precision_bits);
}

GramMatrix assemble_gram(const DeflatedKernel& r, std::span<const double> points, unsigned precision_bits) {
    return assemble_gram(
        r.id(), [&r](const BigFloat& x, const BigFloat& y) { return r(x, y); }, points, precision_bits);
}

PivotedLdlt::PivotedLdlt(const GramMatrix& g, const BigFloat& tol)
    : n_(g.size()), perm_(n_), min_pivot_(BigFloat::infinity(1, g.precision_bits())) {
    work_.reserve(n_ * n_);
    for (std::size_t i = 0; i < n_; ++i) {
        perm_[i] = i;
        for (std::size_t j = 0; j < n_; ++j) work_.push_back(g(i, j));
    }
    if (n_ == 0) min_pivot_ = BigFloat(0.0, g.precision_bits());

    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t hi = k;
        std::size_t lo = k;
        for (std::size_t i = k + 1; i < n_; ++i) {
            if (at(i, i) > at(hi, hi)) hi = i;
            if (at(i, i) < at(lo, lo)) lo = i;
        }
        if (at(lo, lo) < -tol || !(at(hi, hi) > tol)) {
            min_pivot_ = min(min_pivot_, at(lo, lo));
            rank_ = k;
            return;
        }
        if (hi != k) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(at(k, j), at(hi, j));
            for (std::size_t i = 0; i < n_; ++i) std::swap(at(i, k), at(i, hi));
            std::swap(perm_[k], perm_[hi]);
        }
        const BigFloat d = at(k, k);
        min_pivot_ = min(min_pivot_, d);
        d_.push_back(d);
        for (std::size_t j = k + 1; j < n_; ++j) {
            const BigFloat ljk = at(j, k) / d;
            for (std::size_t i = j; i < n_; ++i) {
                at(i, j) -= at(i, k) * ljk;
                at(j, i) = at(i, j);
            }
        }
        for (std::size_t i = k + 1; i < n_; ++i) at(i, k) /= d;
    }
    rank_ = n_;
}

const BigFloat& PivotedLdlt::schur(std::size_t i, std::size_t j) const { return at(rank_ + i, rank_ + j); }

std::vector<BigFloat> PivotedLdlt::lift(std::span<const BigFloat> z) const {
    if (z.size() != n_ - rank_) throw PreconditionError("lift: vector does not match the Schur block");
    const unsigned bits = min_pivot_.precision();
    std::vector<BigFloat> a(n_, BigFloat(0.0, bits));
    for (std::size_t i = rank_; i < n_; ++i) a[i] = z[i - rank_];
    for (std::size_t j = rank_; j-- > 0;) {
        BigFloat acc(0.0, bits);
        for (std::size_t i = j + 1; i < n_; ++i) acc += at(i, j) * a[i];
        a[j] = -acc;
    }
    std::vector<BigFloat> out(n_, BigFloat(0.0, bits));
    for (std::size_t k = 0; k < n_; ++k) out[perm_[k]] = a[k];
    return out;
}

std::vector<BigFloat> PivotedLdlt::solve(std::span<const BigFloat> v) const {
    if (!complete()) throw NumericalError("solve on an incomplete factorization");
    if (v.size() != n_) throw PreconditionError("solve: dimension mismatch");
    std::vector<BigFloat> y;
    y.reserve(n_);
    for (std::size_t k = 0; k < n_; ++k) y.push_back(v[perm_[k]]);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = 0; j < i; ++j) y[i] -= at(i, j) * y[j];
    }
    for (std::size_t i = 0; i < n_; ++i) y[i] /= d_[i];
    for (std::size_t i = n_; i-- > 0;) {
        for (std::size_t j = i + 1; j < n_; ++j) y[i] -= at(j, i) * y[j];
    }
    std::vector<BigFloat> w(n_, BigFloat(0.0, min_pivot_.precision()));
    for (std::size_t k = 0; k < n_; ++k) w[perm_[k]] = y[k];
    return w;
}

BigFloat psd_tolerance(const GramMatrix& g) {
    const unsigned bits = g.precision_bits();
    BigFloat top(0.0, bits);
    for (std::size_t i = 0; i < g.size(); ++i) top = max(top, g(i, i));
    return BigFloat::epsilon(bits) * static_cast<double>(g.size()) * top;
}

PsdVerdict psd_check(const GramMatrix& g) {
    const unsigned bits = g.precision_bits();
    PsdVerdict verdict;
    verdict.tolerance = psd_tolerance(g);
    const BigFloat& tau = verdict.tolerance;
    const PivotedLdlt ldlt(g, tau);
    verdict.min_pivot = ldlt.min_pivot();

    const std::size_t n = g.size();
    std::vector<std::vector<BigFloat>> candidates;
    const BigFloat zero(0.0, bits);
    const auto unit_pair = [&](std::size_t size, std::size_t i, std::size_t j, int sign_ij) {
        std::vector<BigFloat> z(size, zero);
        z[i] = BigFloat(1.0, bits);
        z[j] = BigFloat(sign_ij < 0 ? 1.0 : -1.0, bits);
        return z;
    };

    // Indefinite 2x2 principal minors give the most readable witnesses.
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    BigFloat worst = -tau;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const BigFloat value = g(i, i) + g(j, j) - 2.0 * abs(g(i, j));
            if (value < worst) {
                worst = value;
                pair = {i, j};
            }
        }
    }
    if (pair) candidates.push_back(unit_pair(n, pair->first, pair->second, g(pair->first, pair->second).sign()));

    const std::size_t rest = n - ldlt.rank();
    if (rest > 0) {
        std::size_t lo = 0;
        for (std::size_t i = 1; i < rest; ++i) {
            if (ldlt.schur(i, i) < ldlt.schur(lo, lo)) lo = i;
        }
        if (ldlt.schur(lo, lo) < -tau) {
            std::vector<BigFloat> z(rest, zero);
            z[lo] = BigFloat(1.0, bits);
            candidates.push_back(ldlt.lift(z));
        }
        // Negligible diagonal with a sizeable off-diagonal entry is indefinite too.
        std::optional<std::pair<std::size_t, std::size_t>> off;
        BigFloat largest = tau;
        for (std::size_t i = 0; i < rest; ++i) {
            for (std::size_t j = i + 1; j < rest; ++j) {
                if (abs(ldlt.schur(i, j)) > largest) {
                    largest = abs(ldlt.schur(i, j));
                    off = {i, j};
                }
            }
        }
        if (off) candidates.push_back(ldlt.lift(unit_pair(rest, off->first, off->second, ldlt.schur(off->first, off->second).sign())));
    }

    const BigFloat eps = BigFloat::epsilon(bits);
    for (auto& a : candidates) {
        normalize_max(a);
        const FormValue form = evaluate_form(g, a);
        const BigFloat margin = max(tau, 4.0 * eps * form.magnitude);
        if (form.value < -margin) {
            verdict.is_psd = false;
            verdict.witness = std::move(a);
            verdict.witness_value = form.value;
            return verdict;
        }
    }
    verdict.unconfirmed_negative_pivot = verdict.min_pivot < -tau;
    return verdict;
}

BigFloat quadratic_form(const GramMatrix& g, std::span<const BigFloat> a) {
    if (a.size() != g.size()) throw PreconditionError("quadratic_form: coefficient vector does not match matrix size");
    return evaluate_form(g, a).value;
}

BigFloat quadratic_form(const GramMatrix& g, std::span<const double> a) {
    std::vector<BigFloat> lifted;
    lifted.reserve(a.size());
    for (const double v : a) lifted.emplace_back(v, g.precision_bits());
    return quadratic_form(g, lifted);
}

PsdVerdict schur_deflation_control(const Kernel& k, double x0, std::span<const double> points,
                                   unsigned precision_bits, double scale) {
    const BigFloat anchor(x0, precision_bits);
    const BigFloat k00 = k(anchor, anchor);
    if (!(k00 > 0.0)) throw PreconditionError("Schur control needs K(x0, x0) > 0");
    const BigFloat s2 = BigFloat(scale, precision_bits) * BigFloat(scale, precision_bits);
    const auto residual = [&](const BigFloat& x, const BigFloat& y) {
        return k(x, y) - s2 * k(x, anchor) * k(anchor, y) / k00;
    };
    const GramMatrix g = assemble_gram(k.id() + " | schur at " + shortest(x0), residual, points, precision_bits);
    return psd_check(g);
}

void write_gram_csv(const GramMatrix& g, std::ostream& out) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = 0; j < g.size(); ++j) out << (j ? "," : "") << g(i, j).to_string();
        out << '\n';
    }
}

}  // namespace rkhs
