#include "xap/curve_model.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace xap {

namespace {

std::vector<std::string_view> split_commas(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto comma = text.find(',', start);
        parts.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return parts;
}

BigInt pow_ui(const BigInt& base, unsigned long e)
{
    BigInt r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

unsigned long valuation(const BigInt& n, const BigInt& p)
{
    if (sgn(n) == 0)
        return ~0UL;
    BigInt t = n;
    unsigned long v = 0;
    while (mpz_divisible_p(t.get_mpz_t(), p.get_mpz_t())) {
        mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t());
        ++v;
    }
    return v;
}

} // namespace

BigInt GeneralWeierstrass::b2() const { return a1 * a1 + 4 * a2; }
BigInt GeneralWeierstrass::b4() const { return 2 * a4 + a1 * a3; }
BigInt GeneralWeierstrass::b6() const { return a3 * a3 + 4 * a6; }
BigInt GeneralWeierstrass::b8() const
{
    return a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
}
BigInt GeneralWeierstrass::c4() const
{
    const BigInt b = b2();
    return b * b - 24 * b4();
}
BigInt GeneralWeierstrass::c6() const
{
    const BigInt b = b2();
    return -b * b * b + 36 * b * b4() - 216 * b6();
}
BigInt GeneralWeierstrass::discriminant() const
{
    const BigInt B2 = b2(), B4 = b4(), B6 = b6(), B8 = b8();
    return -B2 * B2 * B8 - 8 * B4 * B4 * B4 - 27 * B6 * B6 + 9 * B2 * B4 * B6;
}
Rational GeneralWeierstrass::j_invariant() const
{
    const BigInt d = discriminant();
    if (sgn(d) == 0)
        throw PreconditionError("singular model has no j-invariant");
    const BigInt c = c4();
    return Rational(BigInt(c * c * c), d);
}

GeneralWeierstrass GeneralWeierstrass::parse(std::string_view text)
{
    auto parts = split_commas(text);
    if (parts.size() != 5)
        throw ParseError("general model needs 'a1,a2,a3,a4,a6', got '" + std::string(text) + "'");
    return {parse_bigint(parts[0]), parse_bigint(parts[1]), parse_bigint(parts[2]),
            parse_bigint(parts[3]), parse_bigint(parts[4])};
}

std::string GeneralWeierstrass::to_string() const
{
    return a1.get_str() + "," + a2.get_str() + "," + a3.get_str() + "," + a4.get_str() + "," + a6.get_str();
}

ShortWeierstrass::ShortWeierstrass(BigInt a, BigInt b) : a_(std::move(a)), b_(std::move(b))
{
    if (sgn(discriminant()) == 0)
        throw PreconditionError("singular curve: 4A^3 + 27B^2 = 0");
}

ShortWeierstrass ShortWeierstrass::parse(std::string_view text)
{
    auto parts = split_commas(text);
    if (parts.size() != 2)
        throw ParseError("short model needs 'A,B', got '" + std::string(text) + "'");
    return ShortWeierstrass(parse_bigint(parts[0]), parse_bigint(parts[1]));
}

BigInt ShortWeierstrass::discriminant() const
{
    return -16 * (4 * a_ * a_ * a_ + 27 * b_ * b_);
}

Rational ShortWeierstrass::j_invariant() const
{
    const BigInt a3 = 4 * a_ * a_ * a_;
    return Rational(BigInt(1728 * a3), BigInt(a3 + 27 * b_ * b_));
}

BigInt ShortWeierstrass::x_size() const
{
    BigInt a3 = pow_ui(a_, 3);
    if (a3 < 0)
        a3 = -a3;
    BigInt b2 = b_ * b_;
    return a3 > b2 ? a3 : b2;
}

double ShortWeierstrass::log_x() const
{
    return log_abs(x_size());
}

Rational ShortWeierstrass::rhs(const Rational& x) const
{
    return (x * x + Rational(a_)) * x + Rational(b_);
}

std::string ShortWeierstrass::to_string() const
{
    return a_.get_str() + "," + b_.get_str();
}

CurveInvariants invariants(const ShortWeierstrass& curve)
{
    CurveInvariants inv;
    inv.delta = curve.discriminant();
    inv.j = curve.j_invariant();
    inv.x_size = curve.x_size();
    inv.log_x = curve.log_x();
    inv.h_delta = log_abs(inv.delta);
    inv.h_j = log_height(inv.j);
    inv.h_delta_upper = inv.log_x + 6.21;
    inv.h_j_upper = inv.log_x + 8.85;
    inv.log_x_upper = 2 * std::max(inv.h_j, inv.h_delta) + 0.7;
    inv.m_e_upper = inv.log_x + 8.85;
    inv.m_e_lower = (inv.log_x - 43.71) / 2;
    return inv;
}

ShortWeierstrass to_short_form(const GeneralWeierstrass& gw)
{
    if (sgn(gw.discriminant()) == 0)
        throw PreconditionError("singular model " + gw.to_string());
    return ShortWeierstrass(-27 * gw.c4(), -54 * gw.c6());
}

std::pair<Rational, Rational> map_to_short_form(const GeneralWeierstrass& gw, const Rational& x, const Rational& y)
{
    // inverse of x -> (x - 3b2)/36, y -> (y/108 - a1 (x - 3b2)/36 - a3)/2
    const Rational X = Rational(36) * x + Rational(BigInt(3 * gw.b2()));
    const Rational Y = Rational(108) * (Rational(2) * y + Rational(gw.a1) * x + Rational(gw.a3));
    return {X, Y};
}

bool on_general_model(const GeneralWeierstrass& gw, const Rational& x, const Rational& y)
{
    const Rational lhs = y * y + Rational(gw.a1) * x * y + Rational(gw.a3) * y;
    const Rational rhs = ((x + Rational(gw.a2)) * x + Rational(gw.a4)) * x + Rational(gw.a6);
    return lhs == rhs;
}

double m_e(const GeneralWeierstrass& gw)
{
    const BigInt d = gw.discriminant();
    if (sgn(d) == 0)
        throw PreconditionError("singular model " + gw.to_string());
    return std::max(log_height(gw.j_invariant()), log_abs(d));
}

Minimality minimality_status(const GeneralWeierstrass& gw)
{
    const BigInt c4 = gw.c4(), c6 = gw.c6(), d = gw.discriminant();
    if (sgn(d) == 0)
        throw PreconditionError("singular model " + gw.to_string());
    BigInt rest = gcd(c4, c6);

    bool possibly = false;
    auto test_prime = [&](const BigInt& p) {
        if (valuation(c4, p) >= 4 && valuation(c6, p) >= 6 && valuation(d, p) >= 12) {
            if (p > 3)
                return true;
            possibly = true;
        }
        return false;
    };

    constexpr unsigned long trial_limit = 1000000;
    for (unsigned long p = 2; p <= trial_limit && rest > 1; p += (p == 2 ? 1 : 2)) {
        if (BigInt(p) * p > rest)
            break;
        if (mpz_divisible_ui_p(rest.get_mpz_t(), p) == 0)
            continue;
        while (mpz_divisible_ui_p(rest.get_mpz_t(), p) != 0)
            mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
        if (test_prime(BigInt(p)))
            return Minimality::not_minimal;
    }
    if (rest > 1) {
        if (mpz_probab_prime_p(rest.get_mpz_t(), 40) == 0)
            return Minimality::unknown;
        if (test_prime(rest))
            return Minimality::not_minimal;
    }
    return possibly ? Minimality::possibly_reducible : Minimality::certified;
}

std::string to_string(Minimality m)
{
    switch (m) {
    case Minimality::certified: return "certified";
    case Minimality::not_minimal: return "not_minimal";
    case Minimality::possibly_reducible: return "possibly_reducible";
    case Minimality::unknown: return "unknown";
    }
    return "unknown";
}

ShortWeierstrass rescale(const ShortWeierstrass& curve, const BigInt& k)
{
    if (k < 1)
        throw PreconditionError("rescaling factor must be >= 1");
    return ShortWeierstrass(curve.a() * pow_ui(k, 4), curve.b() * pow_ui(k, 6));
}

RescaledBounds x_prime_bounds(const ShortWeierstrass& curve, const BigInt& k, double m_e)
{
    if (k < 1)
        throw PreconditionError("rescaling factor must be >= 1");
    RescaledBounds r;
    r.log_k = log_abs(k);
    r.log_x_prime = 12 * r.log_k + curve.log_x();
    r.log_x_prime_lower = m_e + 12 * r.log_k - 8.85;
    r.log_x_prime_upper = 2 * m_e + 12 * r.log_k + 43.71;
    r.m_e_upper = r.log_x_prime - 12 * r.log_k + 8.85;
    r.m_e_lower = (r.log_x_prime - 12 * r.log_k - 43.71) / 2;
    return r;
}

} // namespace xap
