#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "xap/curve_model.hpp"
#include "xap/exact_arith.hpp"
#include "xap/points.hpp"

namespace xap {

/*
 * A rational arithmetic progression r_1 < r_2 < ... < r_N written as
 *
 *   r_1 = b/a, d = v/u,  gcd(a, b) = gcd(u, v) = 1,  a, u >= 1,
 *   s = lcm(a, u),  r_i = x_i / s  with x_i integral.
 *
 * Decreasing input is stored increasing with `reversed` set.
 */
class APSequence {
public:
    /* N >= 1 terms start, start + diff, ...; diff != 0. */
    static APSequence make(const Rational& start, const Rational& diff, std::size_t n);

    /* At least two terms with a constant nonzero difference. */
    static APSequence from_terms(const std::vector<Rational>& terms);

    /* "start=<p/q> diff=<p/q> len=<N>" */
    static APSequence parse(std::string_view text);
    std::string to_string() const;

    const BigInt& a() const { return a_; }
    const BigInt& b() const { return b_; }
    const BigInt& u() const { return u_; }
    const BigInt& v() const { return v_; }
    const BigInt& s() const { return s_; }
    std::size_t size() const { return x_.size(); }
    bool reversed() const { return reversed_; }

    /* integer numerators over s, increasing */
    const std::vector<BigInt>& numerators() const { return x_; }

    Rational start() const { return Rational(b_, a_); }
    Rational diff() const { return Rational(v_, u_); }
    Rational term(std::size_t i) const;  // 1-based
    std::vector<Rational> terms() const;
    std::vector<Rational> terms_in_input_order() const;

private:
    BigInt a_, b_, u_, v_, s_;
    std::vector<BigInt> x_;
    bool reversed_ = false;
};

/* Throws PreconditionError unless 0 < delta < 1. */
void require_open_delta(const Rational& delta);

/* ceil(1/delta) */
unsigned long lemma_window_half(const Rational& delta);

/* prod_{j=1}^{2m-1} j! */
BigInt lemma_threshold(unsigned long m);

/* 1-based indices i with gcd(x_i, s) <= s^delta, compared exactly. */
std::vector<std::size_t> good_terms(const APSequence& ap, const Rational& delta);

struct LemmaReport {
    Rational delta;
    unsigned long m = 0;
    BigInt threshold;
    bool s_meets_threshold = false;
    std::size_t n = 0;
    std::size_t good_count = 0;
    std::size_t floor_bound = 0;  // floor(N / 2m)
    std::vector<std::size_t> good_indices;
    // every block r_{2mk+1..2mk+2m} contains a good term
    bool every_block_has_good = false;
    bool bound_holds = false;     // good_count >= floor_bound; asserted only when s meets the threshold
};

LemmaReport main_lemma_report(const APSequence& ap, const Rational& delta);

struct DivisibilityReport {
    bool ok = true;
    std::size_t window = 0;
    std::size_t windows_checked = 0;
    std::size_t pairs_checked = 0;
    std::string first_failure;
};

/*
 * With g_i = gcd(x_i, s), for every window of min(2m, N) consecutive terms
 * checks gcd(g_i, g_j) | (j - i) for all i < j and
 * g_1 ... g_j | (1! 2! ... (j-1)!) lcm(g_1, ..., g_j) for every prefix.
 */
DivisibilityReport window_divisibility_check(const APSequence& ap, const Rational& delta);

struct CurveAPCheck {
    bool ok = false;
    std::vector<Point> points;                 // lifted with y >= 0
    std::optional<std::size_t> failure_index;  // 1-based
};

/* Is each r_i^3 + A r_i + B a rational square? */
CurveAPCheck verify_ap_on_curve(const ShortWeierstrass& curve, const APSequence& ap);

/* Lift a single x to a point with y >= 0, if it is on the curve. */
std::optional<Point> lift_x(const ShortWeierstrass& curve, const Rational& x);

struct LongestAP {
    std::size_t length = 0;
    Rational start;                   // meaningful when length >= 1
    std::optional<APSequence> ap;     // present when length >= 2
};

/* Longest AP inside the set of x-coordinates; ties prefer the smallest
 * difference, then the smallest first term. */
LongestAP longest_x_ap(const std::vector<Point>& points);
LongestAP longest_ap_in(std::vector<Rational> xs);

struct NxProbe {
    LongestAP best;
    std::size_t corpus_size = 0;
    bool truncated = false;
};

NxProbe nx_lower_bound(const ShortWeierstrass& curve, double log_h, const EnumerateOptions& opts = {});

/* ---- exhaustive sweep of the counting lemma ---- */

struct SweepRange {
    long max_a = 60;
    long max_u = 60;
    long max_b = 30;  // |b| <= max_b
    long max_v = 30;  // 1 <= |v| <= max_v
    std::size_t max_len = 40;
};

struct SweepDeltaResult {
    Rational delta;
    unsigned long m = 0;
    std::uint64_t sequences = 0;          // (a, b, u, v, N) tuples
    std::uint64_t meeting_threshold = 0;
    std::uint64_t bound_violations = 0;
    std::uint64_t divisibility_violations = 0;
    std::string first_violation;
};

struct SweepResult {
    SweepRange range;
    std::uint64_t progressions = 0;  // (a, b, u, v) tuples, each swept over N = 1..max_len
    std::vector<SweepDeltaResult> per_delta;
};

/* Machine-integer sweep over the grid; each (a, b, u, v) is materialized
 * once at max_len and every prefix N is checked.  Threads split the a-range
 * and counts are summed in a fixed order. */
SweepResult lemma_sweep(const SweepRange& range, const std::vector<Rational>& deltas, unsigned threads = 1);

} // namespace xap
