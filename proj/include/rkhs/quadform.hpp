#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/functions.hpp"
#include "rkhs/kernels.hpp"

namespace rkhs {

using BivariateFn = std::function<BigFloat(const BigFloat&, const BigFloat&)>;

/// Symmetric matrix of kernel values on an ordered point list, stored in full.
class GramMatrix {
public:
    GramMatrix(std::string kernel_id, std::vector<double> points, unsigned precision_bits);

    /// Wraps explicit entries (row-major, n x n). Throws unless the matrix is square and exactly symmetric.
    static GramMatrix from_entries(std::vector<BigFloat> entries, std::size_t n, unsigned precision_bits,
                                   std::string kernel_id = "explicit");

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] const BigFloat& operator()(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    [[nodiscard]] const std::vector<double>& points() const { return points_; }
    [[nodiscard]] unsigned precision_bits() const { return precision_bits_; }
    [[nodiscard]] const std::string& kernel_id() const { return kernel_id_; }

    /// Sets entry (i, j) and its mirror.
    void set(std::size_t i, std::size_t j, const BigFloat& value);

private:
    std::string kernel_id_;
    std::vector<double> points_;
    unsigned precision_bits_;
    std::size_t n_;
    std::vector<BigFloat> entries_;
};

/// R(x, y) = K(x, y) - c^2 f(x) f(y). Not asserted to be positive semidefinite.
class DeflatedKernel {
public:
    DeflatedKernel(Kernel base, CandidateFunction f, double c);

    [[nodiscard]] const Kernel& base() const { return base_; }
    [[nodiscard]] const CandidateFunction& function() const { return f_; }
    [[nodiscard]] double c() const { return c_; }
    [[nodiscard]] std::string id() const;

    [[nodiscard]] double operator()(double x, double y) const;
    [[nodiscard]] BigFloat operator()(const BigFloat& x, const BigFloat& y) const;

private:
    Kernel base_;
    CandidateFunction f_;
    double c_;
};

/// Throws `PreconditionError` unless c > 0.
DeflatedKernel deflate(const Kernel& k, const CandidateFunction& f, double c);

/// Evaluates each unordered pair once. Throws `PreconditionError` on
/// coincident nodes or precision below 53 bits.
GramMatrix assemble_gram(std::string kernel_id, const BivariateFn& eval, std::span<const double> points,
                         unsigned precision_bits);
GramMatrix assemble_gram(const Kernel& k, std::span<const double> points,
                         unsigned precision_bits = kDefaultPrecisionBits);
GramMatrix assemble_gram(const DeflatedKernel& r, std::span<const double> points,
                         unsigned precision_bits = kDefaultPrecisionBits);

/// Diagonally pivoted LDL^T factorization, stopped early once the remaining
/// Schur complement is negligible (max diagonal <= tol) or a diagonal entry
/// drops below -tol.
class PivotedLdlt {
public:
    PivotedLdlt(const GramMatrix& g, const BigFloat& tol);

    [[nodiscard]] std::size_t size() const { return n_; }
    [[nodiscard]] std::size_t rank() const { return rank_; }
    [[nodiscard]] bool complete() const { return rank_ == n_; }
    /// Smallest pivot taken, or the smallest remaining diagonal if that is lower.
    [[nodiscard]] const BigFloat& min_pivot() const { return min_pivot_; }
    [[nodiscard]] const std::vector<BigFloat>& pivots() const { return d_; }

    /// Remaining (n - rank) x (n - rank) Schur complement, in pivot order.
    [[nodiscard]] const BigFloat& schur(std::size_t i, std::size_t j) const;
    /// Maps a vector z on the Schur block back to original coordinates a with a^T G a = z^T S z.
    [[nodiscard]] std::vector<BigFloat> lift(std::span<const BigFloat> z) const;
    /// Solves G w = v. Requires a complete factorization.
    [[nodiscard]] std::vector<BigFloat> solve(std::span<const BigFloat> v) const;

private:
    [[nodiscard]] BigFloat& at(std::size_t i, std::size_t j) { return work_[i * n_ + j]; }
    [[nodiscard]] const BigFloat& at(std::size_t i, std::size_t j) const { return work_[i * n_ + j]; }

    std::size_t n_;
    std::size_t rank_ = 0;
    std::vector<std::size_t> perm_;  // perm_[k] = original index at pivot position k
    std::vector<BigFloat> work_;     // strictly lower part holds L, trailing block holds S
    std::vector<BigFloat> d_;
    BigFloat min_pivot_;
};

struct PsdVerdict {
    bool is_psd = true;
    BigFloat min_pivot;
    BigFloat tolerance;
    std::optional<std::vector<BigFloat>> witness;  // a with a^T G a < -tolerance, scaled to max |a_i| = 1
    std::optional<BigFloat> witness_value;
    /// A pivot fell below -tolerance but no witness survived re-evaluation.
    bool unconfirmed_negative_pivot = false;
};

/// tau = eps * n * max(0, max_i g_ii) with eps = 2^(1 - precision_bits).
BigFloat psd_tolerance(const GramMatrix& g);

/// PSD up to tau. A negative verdict always carries a witness vector whose
/// quadratic form, re-evaluated by direct summation, is below -tau and beyond
/// its own rounding-error bound.
PsdVerdict psd_check(const GramMatrix& g);

/// sum_{n,m} a_n a_m g_nm with Neumaier-compensated summation at g's precision.
BigFloat quadratic_form(const GramMatrix& g, std::span<const BigFloat> a);
BigFloat quadratic_form(const GramMatrix& g, std::span<const double> a);

/// Builds R(x, y) = K(x, y) - s^2 K(x, x0) K(x0, y) / K(x0, x0) on `points` and
/// returns its PSD verdict. With s = 1 (the Schur complement) this must be PSD.
PsdVerdict schur_deflation_control(const Kernel& k, double x0, std::span<const double> points,
                                   unsigned precision_bits = kDefaultPrecisionBits, double scale = 1.0);

/// Row-major CSV of the full symmetric matrix, one row per line, round-trip digits.
void write_gram_csv(const GramMatrix& g, std::ostream& out);

/// Neumaier summation; `add` and `value` work at the precision of the first term.
class CompensatedSum {
public:
    explicit CompensatedSum(unsigned precision_bits) : sum_(0.0, precision_bits), carry_(0.0, precision_bits) {}
    void add(const BigFloat& term);
    [[nodiscard]] BigFloat value() const { return sum_ + carry_; }

private:
    BigFloat sum_;
    BigFloat carry_;
};

}  // namespace rkhs
