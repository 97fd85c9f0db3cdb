#pragma once

#include <mpfr.h>

#include <compare>
#include <concepts>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace rkhs {

inline constexpr unsigned kDefaultPrecisionBits = 256;

using BigInt = boost::multiprecision::cpp_int;

/// Binary floating-point number with a per-value precision, backed by MPFR.
///
/// Arithmetic between two values produces a result at the larger of the two
/// precisions; mixing with a `double` uses the BigFloat operand's precision.
/// All operations round to nearest.
class BigFloat {
public:
    BigFloat() : BigFloat(0.0) {}
    explicit BigFloat(double value, unsigned precision_bits = kDefaultPrecisionBits);
    BigFloat(const BigFloat& other);
    BigFloat(BigFloat&& other) noexcept;
    BigFloat& operator=(const BigFloat& other);
    BigFloat& operator=(BigFloat&& other) noexcept;
    ~BigFloat();

    /// Parses a decimal (or "inf"/"-inf"/"nan") string, rounding to `precision_bits`.
    static BigFloat from_string(std::string_view text, unsigned precision_bits = kDefaultPrecisionBits);
    static BigFloat from_integer(const BigInt& value, unsigned precision_bits = kDefaultPrecisionBits);
    static BigFloat pi(unsigned precision_bits = kDefaultPrecisionBits);
    static BigFloat infinity(int sign = 1, unsigned precision_bits = kDefaultPrecisionBits);
    /// 2^(1 - precision_bits), the spacing of representable numbers just above 1.
    static BigFloat epsilon(unsigned precision_bits = kDefaultPrecisionBits);
    /// 2^exponent, exact.
    static BigFloat power_of_two(long exponent, unsigned precision_bits = kDefaultPrecisionBits);

    [[nodiscard]] unsigned precision() const { return static_cast<unsigned>(mpfr_get_prec(value_)); }
    [[nodiscard]] BigFloat with_precision(unsigned precision_bits) const;

    [[nodiscard]] double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
    /// Exact only when `is_integer()`; throws otherwise.
    [[nodiscard]] BigInt to_integer() const;

    /// Scientific notation with enough significant digits to round-trip at this precision.
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::string to_string(int significant_digits) const;

    [[nodiscard]] bool is_finite() const { return mpfr_number_p(value_) != 0; }
    [[nodiscard]] bool is_nan() const { return mpfr_nan_p(value_) != 0; }
    [[nodiscard]] bool is_zero() const { return mpfr_zero_p(value_) != 0; }
    [[nodiscard]] bool is_integer() const { return mpfr_integer_p(value_) != 0; }
    [[nodiscard]] int sign() const { return mpfr_sgn(value_); }

    BigFloat& operator+=(const BigFloat& rhs);
    BigFloat& operator-=(const BigFloat& rhs);
    BigFloat& operator*=(const BigFloat& rhs);
    BigFloat& operator/=(const BigFloat& rhs);
    BigFloat& operator+=(double rhs) { return *this += BigFloat(rhs, precision()); }
    BigFloat& operator-=(double rhs) { return *this -= BigFloat(rhs, precision()); }
    BigFloat& operator*=(double rhs) { return *this *= BigFloat(rhs, precision()); }
    BigFloat& operator/=(double rhs) { return *this /= BigFloat(rhs, precision()); }

    BigFloat operator-() const;

    friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
    friend BigFloat operator/(const BigFloat& a, const BigFloat& b);

    friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }
    friend std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b);
    friend bool operator==(const BigFloat& a, double b) { return mpfr_cmp_d(a.value_, b) == 0 && !a.is_nan(); }
    friend std::partial_ordering operator<=>(const BigFloat& a, double b);

    [[nodiscard]] mpfr_srcptr raw() const { return value_; }
    [[nodiscard]] mpfr_ptr raw() { return value_; }

private:
    struct Uninitialized {};
    BigFloat(Uninitialized, unsigned precision_bits);

    mpfr_t value_;
};

template <std::floating_point F>
BigFloat operator+(const BigFloat& a, F b) { return a + BigFloat(static_cast<double>(b), a.precision()); }
template <std::floating_point F>
BigFloat operator+(F a, const BigFloat& b) { return BigFloat(static_cast<double>(a), b.precision()) + b; }
template <std::floating_point F>
BigFloat operator-(const BigFloat& a, F b) { return a - BigFloat(static_cast<double>(b), a.precision()); }
template <std::floating_point F>
BigFloat operator-(F a, const BigFloat& b) { return BigFloat(static_cast<double>(a), b.precision()) - b; }
template <std::floating_point F>
BigFloat operator*(const BigFloat& a, F b) { return a * BigFloat(static_cast<double>(b), a.precision()); }
template <std::floating_point F>
BigFloat operator*(F a, const BigFloat& b) { return BigFloat(static_cast<double>(a), b.precision()) * b; }
template <std::floating_point F>
BigFloat operator/(const BigFloat& a, F b) { return a / BigFloat(static_cast<double>(b), a.precision()); }
template <std::floating_point F>
BigFloat operator/(F a, const BigFloat& b) { return BigFloat(static_cast<double>(a), b.precision()) / b; }

BigFloat exp(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat sqrt(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat abs(const BigFloat& x);
BigFloat pow(const BigFloat& x, long exponent);
/// Remainder of x / y with the sign of x; exact.
BigFloat fmod(const BigFloat& x, const BigFloat& y);
BigFloat floor(const BigFloat& x);
BigFloat max(const BigFloat& a, const BigFloat& b);
BigFloat min(const BigFloat& a, const BigFloat& b);

/// Number of significant decimal digits that round-trip a value of the given precision.
int round_trip_digits(unsigned precision_bits);

/// Lifts a double literal into the arithmetic type of `like`.
inline double lift(double value, double /*like*/) { return value; }
inline BigFloat lift(double value, const BigFloat& like) { return BigFloat(value, like.precision()); }

}  // namespace rkhs
