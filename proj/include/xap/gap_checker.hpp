#pragma once

#include <string>
#include <vector>

#include "xap/curve_model.hpp"
#include "xap/heights.hpp"
#include "xap/points.hpp"

namespace xap {

struct GapParams {
    Rational delta;      // in [0, 1], exact so gcd <= s^delta is an integer test
    double gamma = 1;    // > 0
    double m = 1;        // > 0
    double alpha = 1.5;  // > 1

    /* Throws PreconditionError when a field is out of range. */
    void validate() const;
    double delta_value() const { return delta.to_double(); }
};

struct Condition {
    std::string name;
    bool met = false;
    std::string detail;
};

struct Verdict {
    bool preconditions_met = false;
    std::vector<Condition> conditions;
    double lhs = 0;
    double rhs = 0;
    double margin = 0;  // rhs - lhs
    double slack = 0;   // tolerated negative margin
    bool holds = false; // preconditions_met && margin >= -slack
    // set when the statement only claims the bound for sufficiently large X
    bool asymptotic = false;
    bool below_large_x_threshold = false;
    std::string citation;
};

inline constexpr double default_large_x_threshold = 20.0;

struct GapOptions {
    double tol = default_height_tolerance;
    std::size_t budget_bits = default_height_budget_bits;
    double large_x_threshold = default_large_x_threshold;
};

/* Right-hand sides of the three cos-angle gap bounds. */
double gap_small_s_rhs(const GapParams& params);
double gap_large_s_rhs(const GapParams& params);  // rejects 2(1 - delta) - gamma <= 0
double gap2_large_s_rhs(const GapParams& params); // rejects 2(1 - delta) - gamma <= 0

/* h(P+Q) <= h(P) + 2h(Q) + 3 delta h(s) + 2.9
 * for X^(1/6) <= x(P) < x(Q), x(P) = x1/s, x(Q) = x2/s, gcd(xi, s) <= s^delta. */
Verdict check_sum_height(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                         const Rational& delta);

/* cos(P,Q) <= sqrt(alpha)/2 + 3 delta / (2 M gamma) + 1/M, under the sum-height
 * hypotheses plus h(s) <= log X / gamma, hhat(P), hhat(Q) > M log X and
 * height ratio <= alpha. */
Verdict check_gap_small_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                          const GapParams& params, const GapOptions& opts = {});

/* cos(P,Q) <= sqrt(alpha)/2 + 3 delta / (2(1 - delta) - gamma) + 1/M with h(s) > log X / gamma. */
Verdict check_gap_large_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                          const GapParams& params, const GapOptions& opts = {});

/* h(P+Q) <= 3 h(s) + (1/2) log X + 3.9 for |x(P)|, |x(Q)| <= 2 X^(1/6), x1 != x2. */
Verdict check_sum_height_small_x(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s);

/* cos(P,Q) <= (1 + 2 delta) / (2(1 - delta) - gamma) + 1/M for small-x points
 * with gcd(xi, s) <= s^delta, h(s) > log X / gamma, hhat > M log X. */
Verdict check_gap2_large_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                           const GapParams& params, const GapOptions& opts = {});

} // namespace xap
