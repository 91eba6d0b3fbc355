#include "xap/points.hpp"

#include <cmath>
#include <numeric>
#include <thread>

namespace xap {

const Rational& Point::x() const
{
    if (!affine_)
        throw PreconditionError("point at infinity has no x-coordinate");
    return x_;
}

const Rational& Point::y() const
{
    if (!affine_)
        throw PreconditionError("point at infinity has no y-coordinate");
    return y_;
}

Point Point::parse(std::string_view text)
{
    if (text == "O" || text == "o" || text == "inf")
        return Point();
    auto comma = text.find(',');
    if (comma == std::string_view::npos || text.find(',', comma + 1) != std::string_view::npos)
        throw ParseError("point needs 'x,y' or 'O', got '" + std::string(text) + "'");
    return Point(Rational::parse(text.substr(0, comma)), Rational::parse(text.substr(comma + 1)));
}

std::string Point::to_string() const
{
    if (!affine_)
        return "O";
    return x_.to_string() + "," + y_.to_string();
}

bool on_curve(const ShortWeierstrass& curve, const Point& p)
{
    if (p.is_infinity())
        return true;
    return p.y() * p.y() == curve.rhs(p.x());
}

namespace {

void require_on_curve(const ShortWeierstrass& curve, const Point& p)
{
    if (!on_curve(curve, p))
        throw PreconditionError("point " + p.to_string() + " is not on y^2 = x^3 + (" + curve.a().get_str()
                                + ")x + (" + curve.b().get_str() + ")");
}

Point add_unchecked(const ShortWeierstrass& curve, const Point& p, const Point& q)
{
    if (p.is_infinity())
        return q;
    if (q.is_infinity())
        return p;
    Rational lambda;
    if (p.x() == q.x()) {
        if (p.y() != q.y() || p.y().is_zero())
            return Point();
        const Rational& x = p.x();
        lambda = (Rational(3) * x * x + Rational(curve.a())) / (Rational(2) * p.y());
    } else {
        lambda = (q.y() - p.y()) / (q.x() - p.x());
    }
    Rational x3 = lambda * lambda - p.x() - q.x();
    Rational y3 = lambda * (p.x() - x3) - p.y();
    return Point(std::move(x3), std::move(y3));
}

} // namespace

Point add(const ShortWeierstrass& curve, const Point& p, const Point& q)
{
    require_on_curve(curve, p);
    require_on_curve(curve, q);
    return add_unchecked(curve, p, q);
}

Point sub(const ShortWeierstrass& curve, const Point& p, const Point& q)
{
    return add(curve, p, -q);
}

Point dbl(const ShortWeierstrass& curve, const Point& p)
{
    require_on_curve(curve, p);
    return add_unchecked(curve, p, p);
}

Point mul(const ShortWeierstrass& curve, long n, const Point& p)
{
    require_on_curve(curve, p);
    Point base = n < 0 ? -p : p;
    unsigned long k = n < 0 ? 0UL - static_cast<unsigned long>(n) : static_cast<unsigned long>(n);
    Point acc;
    while (k != 0) {
        if (k & 1UL)
            acc = add_unchecked(curve, acc, base);
        k >>= 1;
        if (k != 0)
            base = add_unchecked(curve, base, base);
    }
    return acc;
}

std::optional<Rational> double_x(const ShortWeierstrass& curve, const Rational& x)
{
    const Rational a(curve.a()), b(curve.b());
    const Rational x2 = x * x;
    const Rational den = Rational(4) * curve.rhs(x);
    if (den.is_zero())
        return std::nullopt;
    const Rational num = x2 * x2 - Rational(2) * a * x2 - Rational(8) * b * x + a * a;
    return num / den;
}

Rational x_of_sum_formula(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s)
{
    if (p.is_infinity() || q.is_infinity())
        throw PreconditionError("x(P+Q) identity needs affine points");
    if (s < 1)
        throw PreconditionError("common denominator s must be positive");
    if (p.x() == q.x())
        throw PreconditionError("x(P+Q) identity needs x(P) != x(Q)");
    const Rational sx1 = Rational(s) * p.x(), sx2 = Rational(s) * q.x();
    if (!sx1.is_integer() || !sx2.is_integer())
        throw PreconditionError("s * x(P) and s * x(Q) must be integers");
    const BigInt x1 = sx1.num(), x2 = sx2.num();
    const BigInt s2 = s * s, s3 = s2 * s;
    const BigInt poly = (x1 * x2 + s2 * curve.a()) * (x1 + x2) + 2 * s3 * curve.b();
    const Rational num = Rational(poly) - Rational(BigInt(2 * s3)) * p.y() * q.y();
    const BigInt diff = x1 - x2;
    return num / Rational(BigInt(s * diff * diff));
}

std::optional<int> torsion_order(const ShortWeierstrass& curve, const Point& p)
{
    require_on_curve(curve, p);
    Point acc = p;
    for (int n = 1; n <= 12; ++n) {
        if (acc.is_infinity())
            return n;
        // torsion points on an integral short model have integral coordinates
        if (!acc.x().is_integer() || !acc.y().is_integer())
            return std::nullopt;
        acc = add_unchecked(curve, acc, p);
    }
    return std::nullopt;
}

bool is_torsion(const ShortWeierstrass& curve, const Point& p)
{
    return torsion_order(curve, p).has_value();
}

XZDecomposition decompose(const Point& p)
{
    if (p.is_infinity())
        throw PreconditionError("point at infinity has no x = m/e^2 form");
    const BigInt den = p.x().den();
    auto e = exact_sqrt(den);
    if (!e)
        throw PreconditionError("x-denominator " + den.get_str() + " is not a square: point is off an integral model");
    return {p.x().num(), *e};
}

BigInt height_cap(double log_h)
{
    if (!(log_h >= 0))
        throw PreconditionError("height bound must be nonnegative");
    if (log_h > 700)
        throw PreconditionError("height bound too large to enumerate");
    BigInt h = BigInt(std::floor(std::exp(log_h)));
    if (h < 1)
        h = 1;
    const double slack = 1e-12 * std::max(1.0, log_h);
    while (log_abs(BigInt(h + 1)) <= log_h + slack)
        ++h;
    while (h > 1 && log_abs(h) > log_h + slack)
        --h;
    return h;
}

namespace {

struct ScanSlice {
    unsigned long e = 0;
    long m_last = 0;  // inclusive upper m for this e
};

void scan_e(const ShortWeierstrass& curve, unsigned long e, long m_lo, long m_hi, std::vector<Point>& out)
{
    const BigInt E(e);
    const BigInt e2 = E * E, e3 = e2 * E;
    const BigInt Ae4 = curve.a() * e2 * e2;
    const BigInt Be6 = curve.b() * e3 * e3;
    BigInt m, f, n;
    for (long mi = m_lo; mi <= m_hi; ++mi) {
        if (std::gcd(static_cast<unsigned long>(mi < 0 ? -mi : mi), e) != 1)
            continue;
        m = mi;
        f = m * m * m + Ae4 * m + Be6;
        if (sgn(f) < 0 || !mpz_perfect_square_p(f.get_mpz_t()))
            continue;
        mpz_sqrt(n.get_mpz_t(), f.get_mpz_t());
        const Rational x(m, e2);
        out.emplace_back(x, Rational(n, e3));
        if (sgn(n) != 0)
            out.emplace_back(x, Rational(BigInt(-n), e3));
    }
}

} // namespace

Enumeration enumerate_points(const ShortWeierstrass& curve, double log_h, const EnumerateOptions& opts)
{
    Enumeration result;
    result.height_bound = height_cap(log_h);
    if (!result.height_bound.fits_slong_p() || result.height_bound > BigInt(1L << 40))
        throw PreconditionError("height bound too large to enumerate");
    const long H = result.height_bound.get_si();
    const unsigned long e_max = isqrt(result.height_bound).get_ui();
    const std::size_t per_e = static_cast<std::size_t>(2 * H + 1);

    // Budget cut is decided before scanning so the output is independent of threading.
    std::vector<ScanSlice> slices;
    std::size_t used = 0;
    for (unsigned long e = 1; e <= e_max; ++e) {
        if (opts.budget != 0 && used + per_e > opts.budget) {
            const std::size_t left = opts.budget - used;
            if (left > 0)
                slices.push_back({e, -H + static_cast<long>(left) - 1});
            used += left;
            result.truncated = true;
            break;
        }
        slices.push_back({e, H});
        used += per_e;
    }
    result.candidates = used;

    std::vector<std::vector<Point>> per_slice(slices.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(slices.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < slices.size(); ++i)
            scan_e(curve, slices[i].e, -H, slices[i].m_last, per_slice[i]);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < slices.size(); i += workers)
                    scan_e(curve, slices[i].e, -H, slices[i].m_last, per_slice[i]);
            });
        }
        for (auto& t : pool)
            t.join();
    }
    for (auto& v : per_slice)
        for (auto& p : v)
            result.points.push_back(std::move(p));
    return result;
}

} // namespace xap
