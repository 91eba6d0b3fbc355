#include "xap/exact_arith.hpp"

#include <cctype>

#include <array>
#include <charconv>
#include <cmath>

namespace xap {

BigInt gcd(const BigInt& a, const BigInt& b)
{
    BigInt g;
    mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return g;
}

BigInt lcm(const BigInt& a, const BigInt& b)
{
    if (sgn(a) == 0 && sgn(b) == 0)
        throw PreconditionError("lcm(0, 0) is undefined");
    BigInt l;
    mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return l;
}

BigInt isqrt(const BigInt& n)
{
    if (sgn(n) < 0)
        throw PreconditionError("isqrt of a negative integer");
    BigInt r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

std::optional<BigInt> exact_sqrt(const BigInt& n)
{
    if (sgn(n) < 0 || !mpz_perfect_square_p(n.get_mpz_t()))
        return std::nullopt;
    return isqrt(n);
}

double log_abs(const BigInt& n)
{
    if (sgn(n) == 0)
        throw PreconditionError("log of zero");
    long exp = 0;
    double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * std::log(2.0);
}

std::size_t bit_length(const BigInt& n)
{
    if (sgn(n) == 0)
        return 0;
    return mpz_sizeinbase(n.get_mpz_t(), 2);
}

BigInt factorial(unsigned long n)
{
    BigInt f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return f;
}

BigInt superfactorial(unsigned long n)
{
    BigInt prod = 1, f = 1;
    for (unsigned long j = 1; j <= n; ++j) {
        f *= j;
        prod *= f;
    }
    return prod;
}

namespace {

bool all_digits(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (c < '0' || c > '9')
            return false;
    return true;
}

BigInt digits_to_bigint(std::string_view digits)
{
    BigInt r;
    r.set_str(std::string(digits), 10);
    return r;
}

// [-]digits[.digits][e[+-]digits]
Rational parse_decimal(std::string_view text)
{
    std::string_view s = text;
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    long exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view es = s.substr(e + 1);
        s = s.substr(0, e);
        bool eneg = false;
        if (!es.empty() && (es.front() == '-' || es.front() == '+')) {
            eneg = es.front() == '-';
            es.remove_prefix(1);
        }
        if (!all_digits(es) || es.size() > 6)
            throw ParseError("malformed exponent in '" + std::string(text) + "'");
        exp10 = std::stol(std::string(es));
        if (eneg)
            exp10 = -exp10;
    }
    std::string_view ip = s, fp;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        ip = s.substr(0, dot);
        fp = s.substr(dot + 1);
    }
    if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
        throw ParseError("malformed number '" + std::string(text) + "'");
    BigInt num = digits_to_bigint(std::string(ip) + std::string(fp));
    exp10 -= static_cast<long>(fp.size());
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational r = exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
    return neg ? -r : r;
}

std::string_view trim(std::string_view s)
{
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

} // namespace

BigInt parse_bigint(std::string_view text)
{
    text = trim(text);
    std::string_view s = text;
    bool neg = false;
    if (!s.empty() && s.front() == '-') {
        neg = true;
        s.remove_prefix(1);
    }
    if (!all_digits(s))
        throw ParseError("malformed integer '" + std::string(text) + "'");
    BigInt r = digits_to_bigint(s);
    return neg ? BigInt(-r) : r;
}

Rational::Rational(const BigInt& num, const BigInt& den)
{
    if (sgn(den) == 0)
        throw PreconditionError("zero denominator");
    q_ = mpq_class(num, den);
    q_.canonicalize();
}

Rational Rational::from_mpq(mpq_class q)
{
    q.canonicalize();
    Rational r;
    r.q_ = std::move(q);
    return r;
}

Rational Rational::parse(std::string_view text)
{
    text = trim(text);
    auto slash = text.find('/');
    if (slash == std::string_view::npos) {
        if (text.find_first_of(".eE") != std::string_view::npos)
            return parse_decimal(text);
        return Rational(parse_bigint(text));
    }
    BigInt n = parse_bigint(text.substr(0, slash));
    std::string_view ds = trim(text.substr(slash + 1));
    if (!all_digits(ds))
        throw ParseError("malformed denominator in '" + std::string(text) + "'");
    BigInt d = digits_to_bigint(ds);
    if (sgn(d) == 0)
        throw ParseError("zero denominator in '" + std::string(text) + "'");
    return Rational(n, d);
}

Rational Rational::from_double_decimal(double d)
{
    if (!std::isfinite(d))
        throw PreconditionError("non-finite value has no rational form");
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), d);
    return parse_decimal(std::string_view(buf.data(), static_cast<std::size_t>(res.ptr - buf.data())));
}

double Rational::to_double() const
{
    if (is_zero())
        return 0.0;
    // ratio of two large values via log-free mantissa/exponent split
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, q_.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, q_.get_den_mpz_t());
    return std::ldexp(mn / md, static_cast<int>(en - ed));
}

std::string Rational::to_string() const
{
    if (is_integer())
        return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational Rational::inverse() const
{
    if (is_zero())
        throw PreconditionError("inverse of zero");
    return from_mpq(1 / q_);
}

Rational Rational::pow(unsigned long e) const
{
    BigInt n, d;
    mpz_pow_ui(n.get_mpz_t(), q_.get_num_mpz_t(), e);
    mpz_pow_ui(d.get_mpz_t(), q_.get_den_mpz_t(), e);
    return Rational(n, d);
}

Rational operator/(const Rational& a, const Rational& b)
{
    if (b.is_zero())
        throw PreconditionError("division by zero");
    return Rational::from_mpq(a.q_ / b.q_);
}

double log_height(const Rational& q)
{
    if (q.is_zero())
        return 0.0;
    BigInt n = q.num();
    if (n < 0)
        n = -n;
    const BigInt d = q.den();
    return log_abs(n > d ? n : d);
}

BigInt floor_rational_power(const BigInt& s, const Rational& delta)
{
    if (sgn(s) < 1)
        throw PreconditionError("base must be positive");
    if (delta.sign() < 0)
        throw PreconditionError("exponent must be nonnegative");
    const BigInt p = delta.num(), q = delta.den();
    if (!p.fits_ulong_p() || !q.fits_ulong_p() || q > 1000000)
        throw PreconditionError("exponent denominator too large for exact comparison");
    BigInt sp, root;
    mpz_pow_ui(sp.get_mpz_t(), s.get_mpz_t(), p.get_ui());
    mpz_root(root.get_mpz_t(), sp.get_mpz_t(), q.get_ui());
    return root;
}

bool leq_rational_power(const BigInt& g, const BigInt& s, const Rational& delta)
{
    return g <= floor_rational_power(s, delta);
}

BigInt floor(const Rational& q)
{
    BigInt r;
    mpz_fdiv_q(r.get_mpz_t(), q.raw().get_num_mpz_t(), q.raw().get_den_mpz_t());
    return r;
}

BigInt ceil(const Rational& q)
{
    BigInt r;
    mpz_cdiv_q(r.get_mpz_t(), q.raw().get_num_mpz_t(), q.raw().get_den_mpz_t());
    return r;
}

} // namespace xap
