#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xap/exact_arith.hpp"

namespace xap {

/*
 * Conditional bound assembly.  Everything here is plain arithmetic on
 * constants; the only curve-independent unknowns (Lang's c_L and the
 * implied constants hidden in "<<") come from LangConfig.
 */

struct LangConfig {
    double c_l = 0;         // required, > 0
    double kl_slack = 0.001;
    // multiplicative implied constants keyed by ledger name (c1, c2, ...); default 1
    std::map<std::string, double> overrides;
    // constant for the bounded-denominator regime, c * base^r; unset by default
    std::optional<double> bounded_denominator_c;
    std::optional<double> bounded_denominator_base;

    void validate() const;
    double override_for(const std::string& key) const;
};

/* (1+sin t)/(2 sin t) log((1+sin t)/(2 sin t)) - (1-sin t)/(2 sin t) log((1-sin t)/(2 sin t))
 * for 0 < theta <= pi/2 (0 at pi/2, with t log t -> 0). */
double kl_rate(double theta);

/* exp(kl_rate(theta) + slack): A(r, theta) << base^r */
double kl_base(double theta, double slack);

/* Largest k for which k unit vectors can have all pairwise inner products
 * <= -1/2.  From 0 <= |sum v_i|^2 <= k - k(k-1)/2 this is 3. */
int obtuse_code_bound();

/* k - k(k-1)/2 as an exact rational: the largest admissible |sum v_i|^2. */
Rational obtuse_norm_certificate(int k);

/* Three unit vectors in the plane with pairwise inner product -1/2. */
std::array<std::array<double, 2>, 3> obtuse_witness();

/* floor(sqrt(9M / c_L)) + 1, evaluated on the shortest decimal forms of M
 * and c_L so exact squares land exactly. */
BigInt counting_constant(double m, const LangConfig& cfg);

struct LedgerEntry {
    std::string key;
    double value = 0;
    std::string note;
};

struct BoundLedger {
    std::string kind;  // "small_points", "integral", "rational"
    int rank = 0;
    std::vector<LedgerEntry> entries;
    std::vector<std::string> flags;

    void put(std::string key, double value, std::string note);
    double get(const std::string& key) const;
    bool has(const std::string& key) const;
};

struct BoundResult {
    double bound = 0;
    BoundLedger ledger;
};

/* |{P : hhat(P) <= M log X}| <= 16 * 3 * A^r */
BoundResult small_points_bound(int rank, double m, const LangConfig& cfg);

/* N <= 8 c3 A3^r for integral points in x-progression */
BoundResult integral_ap_bound(int rank, const LangConfig& cfg);

/* N <= max{320 c6 A6^r, 240 c9 A9^r} once s >= prod_{j=1}^{19} j! */
BoundResult rational_ap_bound(int rank, const LangConfig& cfg);

/* Recompute the headline bound from ledger entries alone. */
double replay_bound(const BoundLedger& ledger);

/* prod_{j=1}^{19} j!: below it the bounded-denominator argument applies. */
BigInt rational_s_threshold();

} // namespace xap
