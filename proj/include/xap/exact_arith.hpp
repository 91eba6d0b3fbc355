#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace xap {

using BigInt = mpz_class;

/* Raised when a value cannot be parsed from its text form. */
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/* Raised when an operation's mathematical precondition does not hold
 * (singular curve, off-curve point, zero difference, ...). */
class PreconditionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

BigInt gcd(const BigInt& a, const BigInt& b);

/* Throws PreconditionError if both arguments are zero. */
BigInt lcm(const BigInt& a, const BigInt& b);

BigInt isqrt(const BigInt& n);

/* Returns the root when n >= 0 is a perfect square. */
std::optional<BigInt> exact_sqrt(const BigInt& n);

/* log|n| for n != 0, computed from the exact bit length plus a 53-bit
 * mantissa so it never overflows a double. */
double log_abs(const BigInt& n);

std::size_t bit_length(const BigInt& n);

BigInt factorial(unsigned long n);

/* 1! * 2! * ... * n! */
BigInt superfactorial(unsigned long n);

BigInt parse_bigint(std::string_view text);

/*
 * Exact rational number, always reduced with a positive denominator.
 * Equality is structural on (num, den).
 */
class Rational {
public:
    Rational() = default;
    Rational(long n) : q_(n) {}
    Rational(const BigInt& n) : q_(n) {}
    Rational(const BigInt& num, const BigInt& den);

    static Rational from_mpq(mpq_class q);

    /* "p/q", "p", or a decimal such as "-0.125" (converted exactly). */
    static Rational parse(std::string_view text);

    /* Exact value of the shortest decimal string that round-trips d. */
    static Rational from_double_decimal(double d);

    BigInt num() const { return q_.get_num(); }
    BigInt den() const { return q_.get_den(); }
    const mpq_class& raw() const { return q_; }

    bool is_zero() const { return sgn(q_) == 0; }
    bool is_integer() const { return q_.get_den() == 1; }
    int sign() const { return sgn(q_); }

    double to_double() const;
    std::string to_string() const;

    Rational operator-() const { return from_mpq(-q_); }
    Rational abs() const { return from_mpq(sgn(q_) < 0 ? mpq_class(-q_) : q_); }
    Rational inverse() const;
    Rational pow(unsigned long e) const;

    friend Rational operator+(const Rational& a, const Rational& b) { return from_mpq(a.q_ + b.q_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return from_mpq(a.q_ - b.q_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return from_mpq(a.q_ * b.q_); }
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.q_ == b.q_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b)
    {
        int c = cmp(a.q_, b.q_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.to_string(); }

private:
    mpq_class q_;
};

/* h(p/q) = log max(|p|, |q|) on the reduced fraction; h(0) = 0. */
double log_height(const Rational& q);

/* For g >= 0, s >= 1 and 0 <= delta: is g <= s^delta?  Exact integer
 * comparison g^q <= s^p for delta = p/q. */
bool leq_rational_power(const BigInt& g, const BigInt& s, const Rational& delta);

/* Largest t >= 0 with t <= s^delta, i.e. floor(s^delta), computed exactly. */
BigInt floor_rational_power(const BigInt& s, const Rational& delta);

/* ceil of a rational */
BigInt ceil(const Rational& q);
BigInt floor(const Rational& q);

} // namespace xap
