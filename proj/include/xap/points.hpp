#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xap/curve_model.hpp"
#include "xap/exact_arith.hpp"

namespace xap {

/* A point of E(Q): either the point at infinity or an affine pair.  Points
 * do not know their curve; operations take the curve explicitly. */
class Point {
public:
    Point() = default;  // infinity
    Point(Rational x, Rational y) : affine_(true), x_(std::move(x)), y_(std::move(y)) {}

    static Point infinity() { return Point(); }

    /* "x,y" with rational components, or "O". */
    static Point parse(std::string_view text);
    std::string to_string() const;

    bool is_infinity() const { return !affine_; }
    const Rational& x() const;
    const Rational& y() const;

    Point operator-() const { return affine_ ? Point(x_, -y_) : Point(); }

    friend bool operator==(const Point&, const Point&) = default;

private:
    bool affine_ = false;
    Rational x_, y_;
};

bool on_curve(const ShortWeierstrass& curve, const Point& p);

/* Chord-and-tangent addition; throws PreconditionError for off-curve input. */
Point add(const ShortWeierstrass& curve, const Point& p, const Point& q);
Point sub(const ShortWeierstrass& curve, const Point& p, const Point& q);
Point dbl(const ShortWeierstrass& curve, const Point& p);
Point mul(const ShortWeierstrass& curve, long n, const Point& p);

/* x(2P) from x(P) alone; nullopt when 2P = O.  No on-curve check. */
std::optional<Rational> double_x(const ShortWeierstrass& curve, const Rational& x);

/*
 * x(P+Q) via the common-denominator identity
 *
 *   x(P+Q) = ((x1 x2 + s^2 A)(x1 + x2) + 2 s^3 B - 2 s^3 y(P) y(Q)) / (s (x1 - x2)^2)
 *
 * with x(P) = x1/s, x(Q) = x2/s.
 */
Rational x_of_sum_formula(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s);

/* Order in 1..12 if the point is torsion (Mazur bound), otherwise nullopt. */
std::optional<int> torsion_order(const ShortWeierstrass& curve, const Point& p);
bool is_torsion(const ShortWeierstrass& curve, const Point& p);

/* x = m / e^2 with gcd(m, e) = 1, e >= 1. */
struct XZDecomposition {
    BigInt m, e;
    Rational x() const { return Rational(m, BigInt(e * e)); }
};

XZDecomposition decompose(const Point& p);

struct EnumerateOptions {
    /* Maximum number of (m, e) candidates examined; 0 means no limit. */
    std::size_t budget = 0;
    /* Worker threads for the e-range; results are merged in e order. */
    unsigned threads = 1;
};

struct Enumeration {
    std::vector<Point> points;
    BigInt height_bound;  // H: the scan covers max(|m|, e^2) <= H
    std::size_t candidates = 0;
    bool truncated = false;
};

/* Largest integer H >= 1 with log H <= log_h (up to 1e-12 relative slack). */
BigInt height_cap(double log_h);

/*
 * All affine points with h(P) <= log_h, ordered by e, then m, then y
 * descending.  Each candidate x = m/e^2 is tested by asking whether
 * m^3 + A m e^4 + B e^6 is a perfect square n^2; the points are
 * (m/e^2, +-n/e^3).
 */
Enumeration enumerate_points(const ShortWeierstrass& curve, double log_h, const EnumerateOptions& opts = {});

} // namespace xap
