#include "xap/heights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xap {

double weil_height(const Point& p)
{
    if (p.is_infinity())
        throw PreconditionError("Weil height of the point at infinity is not defined here");
    return log_height(p.x());
}

std::pair<double, double> height_difference_bounds(double log_x)
{
    return {-(5.0 / 12.0) * log_x - 5.2, (1.0 / 3.0) * log_x + 4.65};
}

std::pair<double, double> height_difference_bounds(const CurveInvariants& inv)
{
    return height_difference_bounds(inv.log_x);
}

double height_error_constant(double log_x)
{
    auto [lo, hi] = height_difference_bounds(log_x);
    return std::max(-lo, hi);
}

namespace {

std::size_t size_bits(const Rational& q)
{
    return bit_length(q.num()) + bit_length(q.den());
}

} // namespace

HeightEstimate canonical_height(const ShortWeierstrass& curve, const Point& p, double tol, std::size_t budget_bits)
{
    if (!(tol > 0))
        throw PreconditionError("tolerance must be positive");
    if (!on_curve(curve, p))
        throw PreconditionError("point " + p.to_string() + " is not on the curve");
    HeightEstimate est;
    if (p.is_infinity())
        return est;

    const double c = height_error_constant(curve.log_x());
    int n = 0;
    double scale = 1.0;
    while (c / scale > tol) {
        ++n;
        scale *= 4.0;
    }

    Rational x = p.x();
    double pow4 = 1.0;
    est.value = log_height(x);
    est.error_bound = c;
    for (int k = 1; k <= n; ++k) {
        auto next = double_x(curve, x);
        if (!next) {
            // 2^k P = O, so P is torsion and hhat(P) = 0 exactly.
            return {0.0, 0.0, k};
        }
        if (size_bits(*next) > budget_bits) {
            throw HeightBudgetExceeded("canonical height: coordinates of 2^" + std::to_string(k)
                                           + "P exceed the " + std::to_string(budget_bits) + "-bit budget",
                                       est);
        }
        x = std::move(*next);
        pow4 *= 4.0;
        est.value = log_height(x) / pow4;
        est.error_bound = c / pow4;
        est.doublings = k;
    }
    return est;
}

namespace {

HeightEstimate hhat_or_zero(const ShortWeierstrass& curve, const Point& p, double tol, std::size_t budget)
{
    if (p.is_infinity())
        return {};
    return canonical_height(curve, p, tol, budget);
}

struct Interval {
    double lo, hi;
};

/* enclosure of num / (2 sqrt(a b)) for num, a, b known to within their radii */
Interval quotient_enclosure(double num, double en, double a, double ea, double b, double eb)
{
    const double dlo2 = (a - ea) * (b - eb);
    if (a - ea <= 0 || b - eb <= 0 || dlo2 <= 0)
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const double dlo = 2 * std::sqrt(dlo2);
    const double dhi = 2 * std::sqrt((a + ea) * (b + eb));
    const double nlo = num - en, nhi = num + en;
    const double c[4] = {nlo / dlo, nlo / dhi, nhi / dlo, nhi / dhi};
    return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
}

} // namespace

PairingEstimate pairing(const ShortWeierstrass& curve, const Point& p, const Point& q, double tol, std::size_t budget)
{
    const Point sum = add(curve, p, q);
    const double t = tol / 3;
    const HeightEstimate hs = hhat_or_zero(curve, sum, t, budget);
    const HeightEstimate hp = hhat_or_zero(curve, p, t, budget);
    const HeightEstimate hq = hhat_or_zero(curve, q, t, budget);
    return {hs.value - hp.value - hq.value, hs.error_bound + hp.error_bound + hq.error_bound};
}

CosAngle cos_angle(const ShortWeierstrass& curve, const Point& p, const Point& q, double tol, std::size_t budget)
{
    if (is_torsion(curve, p) || is_torsion(curve, q))
        throw PreconditionError("angle is defined only between non-torsion points");
    const double t = tol / 3;
    CosAngle r;
    r.hp = canonical_height(curve, p, t, budget);
    r.hq = canonical_height(curve, q, t, budget);
    r.hsum = hhat_or_zero(curve, add(curve, p, q), t, budget);
    r.hdiff = hhat_or_zero(curve, sub(curve, p, q), t, budget);

    const double den = 2 * std::sqrt(r.hp.value * r.hq.value);
    const double num = r.hsum.value - r.hp.value - r.hq.value;
    const double alt_num = r.hp.value + r.hq.value - r.hdiff.value;
    r.value = num / den;
    r.alt_value = alt_num / den;

    const Interval main = quotient_enclosure(num, r.hsum.error_bound + r.hp.error_bound + r.hq.error_bound,
                                             r.hp.value, r.hp.error_bound, r.hq.value, r.hq.error_bound);
    const Interval alt = quotient_enclosure(alt_num, r.hdiff.error_bound + r.hp.error_bound + r.hq.error_bound,
                                            r.hp.value, r.hp.error_bound, r.hq.value, r.hq.error_bound);
    r.error_bound = std::max(main.hi - r.value, r.value - main.lo);
    r.alt_error_bound = std::max(alt.hi - r.alt_value, r.alt_value - alt.lo);
    r.forms_agree = std::fabs(r.value - r.alt_value) <= r.error_bound + r.alt_error_bound;
    return r;
}

} // namespace xap
