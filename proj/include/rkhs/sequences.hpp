#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rkhs/bigfloat.hpp"
#include "rkhs/expression.hpp"
#include "rkhs/kernels.hpp"

namespace rkhs {

enum class Direction { Positive, Negative };

enum class SequenceKind { Triangular, Arithmetic, Custom };

/// A point sequence (x_n), n = 1, 2, ..., heading to +inf or -inf.
class SequenceSpec {
public:
    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] SequenceKind kind() const { return kind_; }
    [[nodiscard]] Direction direction() const { return direction_; }
    /// Pairwise gaps within any fixed window grow without bound.
    [[nodiscard]] bool claimed_decay() const { return claimed_decay_; }
    /// Every x_n is an integer.
    [[nodiscard]] bool integer_valued() const;

    /// x_n for n >= 1.
    [[nodiscard]] double operator()(std::int64_t n) const;
    /// Exact x_n for the triangular family; empty otherwise.
    [[nodiscard]] std::optional<std::int64_t> exact(std::int64_t n) const;

    /// x_{ell+1}, ..., x_{ell+count}.
    [[nodiscard]] std::vector<double> window(std::int64_t ell, std::int64_t count) const;

    friend SequenceSpec triangular_sequence(Direction direction);
    friend SequenceSpec arithmetic_sequence(double step);
    friend SequenceSpec custom_sequence(std::string_view expression);

private:
    SequenceSpec(std::string name, SequenceKind kind, Direction direction, bool claimed_decay)
        : name_(std::move(name)), kind_(kind), direction_(direction), claimed_decay_(claimed_decay) {}

    std::string name_;
    SequenceKind kind_;
    Direction direction_;
    bool claimed_decay_;
    double step_ = 0.0;
    std::optional<Expression> expr_;
};

/// x_n = +-(1 + 2 + ... + n) = +-n(n+1)/2.
SequenceSpec triangular_sequence(Direction direction);
/// x_n = n * step. Gaps are constant, so it is the negative example for decay.
SequenceSpec arithmetic_sequence(double step);
/// x_n given by an expression in `n`. Monotonicity is not enforced; direction
/// is read off the sign of x_1000.
SequenceSpec custom_sequence(std::string_view expression);

/// "triangular+", "triangular-", "arithmetic:<step>", "custom:<expression in n>".
SequenceSpec sequence_from_id(std::string_view id);

/// True when x_1..x_count is strictly monotone in the sequence's direction.
bool is_strictly_monotone(const SequenceSpec& seq, std::int64_t count);

/// Exact |x_{ell+n} - x_{ell+m}| for a triangular sequence; checks it is >= ell.
std::int64_t gap_lower_bound(const SequenceSpec& seq, std::int64_t n, std::int64_t m, std::int64_t ell);

/// {1, 2, 4, ..., ell_max}, with ell_max appended when it is not a power of two.
/// With `include_zero` the schedule starts at 0.
std::vector<std::int64_t> ell_schedule(std::int64_t ell_max, bool include_zero = false);

/// max over 1 <= n < m <= N of |K(x_{ell+n}, x_{ell+m})|, computed from the
/// nearest pair alone when the kernel profile is monotone.
BigFloat max_offdiagonal(const Kernel& k, std::span<const double> points, unsigned precision_bits);

struct SignObstruction {
    std::array<std::size_t, 3> triple{};     // 1-based indices
    std::pair<std::size_t, std::size_t> agreeing;  // two indices of the triple with equal sign
};

/// Among any three signs two agree, so no three terms can be pairwise of
/// opposite sign. Returns the first triple (lexicographic) exhibiting this.
std::optional<SignObstruction> sign_obstruction_check(std::span<const int> signs);

enum class Evidence { Empirical, Proved };

struct DecayReport {
    std::int64_t window = 0;
    std::vector<std::int64_t> ell_values;
    std::vector<BigFloat> max_offdiag;
    BigFloat threshold;
    bool passed = false;
    std::string reason;  // empty when passed
    Evidence evidence = Evidence::Empirical;
    std::optional<SignObstruction> sign_obstruction;
};

/// Samples the pairwise-decay condition along `ell_schedule(ell_max)`. Passes
/// iff the last value is <= threshold and the trace does not increase over
/// the second half of the schedule. Values that leave the double range are
/// reported as "divergent".
DecayReport verify_decay(const Kernel& k, const SequenceSpec& seq, std::int64_t window_N, std::int64_t ell_max,
                         const BigFloat& threshold, unsigned precision_bits = kDefaultPrecisionBits);

std::string to_string(Direction direction);
std::string to_string(Evidence evidence);

}  // namespace rkhs
