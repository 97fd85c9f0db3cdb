#include "rkhs/bigfloat.hpp"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "rkhs/error.hpp"

namespace rkhs {

namespace {

unsigned wider(const BigFloat& a, const BigFloat& b) { return std::max(a.precision(), b.precision()); }

template <typename Op>
BigFloat unary(const BigFloat& x, Op op) {
    BigFloat out(0.0, x.precision());
    op(out.raw(), x.raw(), MPFR_RNDN);
    return out;
}

}  // namespace

BigFloat::BigFloat(Uninitialized, unsigned precision_bits) { mpfr_init2(value_, precision_bits); }

BigFloat::BigFloat(double value, unsigned precision_bits) : BigFloat(Uninitialized{}, precision_bits) {
    mpfr_set_d(value_, value, MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& other) : BigFloat(Uninitialized{}, other.precision()) {
    mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept : BigFloat(Uninitialized{}, other.precision()) {
    mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
    if (this != &other) {
        mpfr_set_prec(value_, mpfr_get_prec(other.value_));
        mpfr_set(value_, other.value_, MPFR_RNDN);
    }
    return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
    if (this != &other) mpfr_swap(value_, other.value_);
    return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::from_string(std::string_view text, unsigned precision_bits) {
    BigFloat out(Uninitialized{}, precision_bits);
    const std::string owned(text);
    if (owned.empty() || mpfr_set_str(out.value_, owned.c_str(), 10, MPFR_RNDN) != 0) {
        throw PreconditionError("not a decimal number: '" + owned + "'");
    }
    return out;
}

BigFloat BigFloat::from_integer(const BigInt& value, unsigned precision_bits) {
    return from_string(value.str(), precision_bits);
}

BigFloat BigFloat::pi(unsigned precision_bits) {
    BigFloat out(Uninitialized{}, precision_bits);
    mpfr_const_pi(out.value_, MPFR_RNDN);
    return out;
}

BigFloat BigFloat::infinity(int sign, unsigned precision_bits) {
    BigFloat out(Uninitialized{}, precision_bits);
    mpfr_set_inf(out.value_, sign < 0 ? -1 : 1);
    return out;
}

BigFloat BigFloat::epsilon(unsigned precision_bits) {
    return power_of_two(1L - static_cast<long>(precision_bits), precision_bits);
}

BigFloat BigFloat::power_of_two(long exponent, unsigned precision_bits) {
    BigFloat out(1.0, precision_bits);
    mpfr_mul_2si(out.value_, out.value_, exponent, MPFR_RNDN);
    return out;
}

BigFloat BigFloat::with_precision(unsigned precision_bits) const {
    BigFloat out(Uninitialized{}, precision_bits);
    mpfr_set(out.value_, value_, MPFR_RNDN);
    return out;
}

BigInt BigFloat::to_integer() const {
    if (!is_integer()) throw PreconditionError("value is not an integer: " + to_string());
    mpz_t z;
    mpz_init(z);
    mpfr_get_z(z, value_, MPFR_RNDN);
    std::unique_ptr<char, void (*)(void*)> digits(mpz_get_str(nullptr, 10, z), std::free);
    mpz_clear(z);
    return BigInt(digits.get());
}

int round_trip_digits(unsigned precision_bits) {
    // 1 + ceil(p * log10(2)) digits always identify a p-bit binary value.
    return 1 + static_cast<int>(std::ceil(precision_bits * 0.30102999566398120));
}

std::string BigFloat::to_string() const { return to_string(round_trip_digits(precision())); }

std::string BigFloat::to_string(int significant_digits) const {
    if (is_nan()) return "nan";
    if (!is_finite()) return sign() < 0 ? "-inf" : "inf";
    char* buffer = nullptr;
    mpfr_asprintf(&buffer, "%.*Re", std::max(significant_digits, 1) - 1, value_);
    std::string out(buffer);
    mpfr_free_str(buffer);
    return out;
}

BigFloat& BigFloat::operator+=(const BigFloat& rhs) {
    if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
    mpfr_add(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator-=(const BigFloat& rhs) {
    if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
    mpfr_sub(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator*=(const BigFloat& rhs) {
    if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
    mpfr_mul(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat& BigFloat::operator/=(const BigFloat& rhs) {
    if (rhs.precision() > precision()) mpfr_prec_round(value_, rhs.precision(), MPFR_RNDN);
    mpfr_div(value_, value_, rhs.value_, MPFR_RNDN);
    return *this;
}

BigFloat BigFloat::operator-() const { return unary(*this, mpfr_neg); }

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
    BigFloat out(BigFloat::Uninitialized{}, wider(a, b));
    mpfr_add(out.value_, a.value_, b.value_, MPFR_RNDN);
    return out;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
    BigFloat out(BigFloat::Uninitialized{}, wider(a, b));
    mpfr_sub(out.value_, a.value_, b.value_, MPFR_RNDN);
    return out;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
    BigFloat out(BigFloat::Uninitialized{}, wider(a, b));
    mpfr_mul(out.value_, a.value_, b.value_, MPFR_RNDN);
    return out;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
    BigFloat out(BigFloat::Uninitialized{}, wider(a, b));
    mpfr_div(out.value_, a.value_, b.value_, MPFR_RNDN);
    return out;
}

std::partial_ordering operator<=>(const BigFloat& a, const BigFloat& b) {
    if (a.is_nan() || b.is_nan()) return std::partial_ordering::unordered;
    const int c = mpfr_cmp(a.value_, b.value_);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

std::partial_ordering operator<=>(const BigFloat& a, double b) {
    if (a.is_nan() || std::isnan(b)) return std::partial_ordering::unordered;
    const int c = mpfr_cmp_d(a.value_, b);
    return c < 0 ? std::partial_ordering::less
                 : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

BigFloat exp(const BigFloat& x) { return unary(x, mpfr_exp); }
BigFloat log(const BigFloat& x) { return unary(x, mpfr_log); }
BigFloat sqrt(const BigFloat& x) { return unary(x, mpfr_sqrt); }
BigFloat sin(const BigFloat& x) { return unary(x, mpfr_sin); }
BigFloat cos(const BigFloat& x) { return unary(x, mpfr_cos); }
BigFloat abs(const BigFloat& x) { return unary(x, mpfr_abs); }

BigFloat pow(const BigFloat& x, long exponent) {
    BigFloat out(0.0, x.precision());
    mpfr_pow_si(out.raw(), x.raw(), exponent, MPFR_RNDN);
    return out;
}

BigFloat fmod(const BigFloat& x, const BigFloat& y) {
    BigFloat out(0.0, std::max(x.precision(), y.precision()));
    mpfr_fmod(out.raw(), x.raw(), y.raw(), MPFR_RNDN);
    return out;
}

BigFloat floor(const BigFloat& x) {
    BigFloat out(0.0, x.precision());
    mpfr_floor(out.raw(), x.raw());
    return out;
}

BigFloat max(const BigFloat& a, const BigFloat& b) { return (b > a) ? b : a; }
BigFloat min(const BigFloat& a, const BigFloat& b) { return (b < a) ? b : a; }

}  // namespace rkhs
