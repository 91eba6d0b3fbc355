#pragma once

#include <string>
#include <string_view>

#include "xap/exact_arith.hpp"

namespace xap {

/*
 * y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 over Z.
 *
 *   b2 = a1^2 + 4a2          b4 = 2a4 + a1a3        b6 = a3^2 + 4a6
 *   b8 = a1^2 a6 + 4a2a6 - a1a3a4 + a2a3^2 - a4^2
 *   c4 = b2^2 - 24b4         c6 = -b2^3 + 36b2b4 - 216b6
 *   Delta = -b2^2 b8 - 8b4^3 - 27b6^2 + 9b2b4b6,   j = c4^3 / Delta
 */
struct GeneralWeierstrass {
    BigInt a1, a2, a3, a4, a6;

    BigInt b2() const;
    BigInt b4() const;
    BigInt b6() const;
    BigInt b8() const;
    BigInt c4() const;
    BigInt c6() const;
    BigInt discriminant() const;
    Rational j_invariant() const;

    /* "a1,a2,a3,a4,a6" */
    static GeneralWeierstrass parse(std::string_view text);
    std::string to_string() const;
};

/* y^2 = x^3 + Ax + B with A, B in Z and nonzero discriminant. */
class ShortWeierstrass {
public:
    /* Throws PreconditionError when -16(4A^3 + 27B^2) = 0. */
    ShortWeierstrass(BigInt a, BigInt b);

    /* "A,B" */
    static ShortWeierstrass parse(std::string_view text);

    const BigInt& a() const { return a_; }
    const BigInt& b() const { return b_; }

    BigInt discriminant() const;
    Rational j_invariant() const;

    /* X = max{|A|^3, B^2} */
    BigInt x_size() const;
    double log_x() const;

    /* x^3 + Ax + B */
    Rational rhs(const Rational& x) const;

    std::string to_string() const;

    friend bool operator==(const ShortWeierstrass&, const ShortWeierstrass&) = default;

private:
    BigInt a_, b_;
};

struct CurveInvariants {
    BigInt delta;
    Rational j;
    BigInt x_size;
    double log_x = 0;
    double h_delta = 0;
    double h_j = 0;

    // h(Delta) <= log X + 6.21, h(j) <= log X + 8.85, log X <= 2 max{h(j), h(Delta)} + 0.7
    double h_delta_upper = 0;
    double h_j_upper = 0;
    double log_x_upper = 0;

    // Bracket on M_E = max{h(j_E), h(Delta_E)} for the model this one was
    // reduced from: (log X - 43.71)/2 <= M_E <= log X + 8.85.
    double m_e_lower = 0;
    double m_e_upper = 0;
};

CurveInvariants invariants(const ShortWeierstrass& curve);

/* The 6-adic substitution x -> (x - 3b2)/36, y -> (y/108 - a1(x - 3b2)/36 - a3)/2,
 * which lands on y^2 = x^3 - 27c4 x - 54c6 with Delta = 6^12 Delta_E. */
ShortWeierstrass to_short_form(const GeneralWeierstrass& gw);

/* Image of an affine point of gw under the substitution above. */
std::pair<Rational, Rational> map_to_short_form(const GeneralWeierstrass& gw, const Rational& x, const Rational& y);

bool on_general_model(const GeneralWeierstrass& gw, const Rational& x, const Rational& y);

/* M_E = max{h(j), h(Delta)} computed on the given model.  This is the
 * paper-facing quantity only when gw is minimal. */
double m_e(const GeneralWeierstrass& gw);

enum class Minimality {
    certified,          // every p has v(Delta) < 12, v(c4) < 4 or v(c6) < 6
    not_minimal,        // some p > 3 has p^4 | c4 and p^12 | Delta
    possibly_reducible, // the valuation test fails only at p = 2 or 3
    unknown             // gcd(c4, c6) kept a cofactor we could not factor
};

/* Valuation test over the primes of gcd(c4, c6), found by trial division
 * up to 10^6.  For p > 3 the test is exact; at 2 and 3 failing it is only
 * necessary for non-minimality. */
Minimality minimality_status(const GeneralWeierstrass& gw);
std::string to_string(Minimality m);

/* (x, y) -> (xk^2, yk^3) maps onto y^2 = x^3 + k^4 A x + k^6 B. */
ShortWeierstrass rescale(const ShortWeierstrass& curve, const BigInt& k);

struct RescaledBounds {
    double log_k = 0;
    double log_x_prime = 0;  // 12 log k + log X
    // evaluated at a given M_E:
    //   log X' >= M_E + 12 log k - 8.85
    //   log X' <= 2 M_E + 12 log k + 43.71
    double log_x_prime_lower = 0;
    double log_x_prime_upper = 0;
    // bracket on M_E implied by log X'
    double m_e_lower = 0;
    double m_e_upper = 0;
};

RescaledBounds x_prime_bounds(const ShortWeierstrass& curve, const BigInt& k, double m_e);

} // namespace xap
