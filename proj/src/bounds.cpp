#include "xap/bounds.hpp"

#include <cmath>
#include <numbers>

#include "xap/gap_checker.hpp"

namespace xap {

void LangConfig::validate() const
{
    if (!(c_l > 0))
        throw PreconditionError("Lang constant c_L must be positive");
    if (!(kl_slack >= 0))
        throw PreconditionError("kl_slack must be nonnegative");
    for (const auto& [k, v] : overrides)
        if (!(v > 0))
            throw PreconditionError("override '" + k + "' must be positive");
    if (bounded_denominator_c && !(*bounded_denominator_c > 0))
        throw PreconditionError("bounded-denominator constant must be positive");
    if (bounded_denominator_base && !(*bounded_denominator_base >= 1))
        throw PreconditionError("bounded-denominator base must be >= 1");
}

double LangConfig::override_for(const std::string& key) const
{
    auto it = overrides.find(key);
    return it == overrides.end() ? 1.0 : it->second;
}

namespace {

double t_log_t(double t)
{
    return t == 0 ? 0.0 : t * std::log(t);
}

double scaled_power(double factor, double c, double base, int rank)
{
    return factor * c * std::pow(base, rank);
}

void require_rank(int rank)
{
    if (rank < 0)
        throw PreconditionError("rank must be nonnegative");
}

/* smallest integer m with c A^r < m; then m <= 2 c A^r because c A^r >= 1 */
double pick_m(double c, double base, int rank)
{
    return std::floor(c * std::pow(base, rank)) + 1;
}

} // namespace

double kl_rate(double theta)
{
    if (!(theta > 0) || theta > std::numbers::pi / 2)
        throw PreconditionError("kl_rate needs 0 < theta <= pi/2");
    const double s = std::sin(theta);
    const double plus = (1 + s) / (2 * s);
    const double minus = (1 - s) / (2 * s);
    return t_log_t(plus) - t_log_t(minus);
}

double kl_base(double theta, double slack)
{
    if (!(slack >= 0))
        throw PreconditionError("slack must be nonnegative");
    return std::exp(kl_rate(theta) + slack);
}

int obtuse_code_bound()
{
    int k = 1;
    while (obtuse_norm_certificate(k + 1) >= Rational(0))
        ++k;
    return k;
}

Rational obtuse_norm_certificate(int k)
{
    // |sum v_i|^2 = k + 2 sum_{i<j} <v_i, v_j> <= k + 2 * C(k,2) * (-1/2)
    return Rational(k) - Rational(static_cast<long>(k) * (k - 1), BigInt(2));
}

std::array<std::array<double, 2>, 3> obtuse_witness()
{
    std::array<std::array<double, 2>, 3> v{};
    for (int i = 0; i < 3; ++i) {
        const double t = 2 * std::numbers::pi * i / 3;
        v[i] = {std::cos(t), std::sin(t)};
    }
    return v;
}

BigInt counting_constant(double m, const LangConfig& cfg)
{
    if (!(m > 0))
        throw PreconditionError("M must be positive");
    cfg.validate();
    const Rational q = Rational(9) * Rational::from_double_decimal(m) / Rational::from_double_decimal(cfg.c_l);
    return isqrt(floor(q)) + 1;
}

void BoundLedger::put(std::string key, double value, std::string note)
{
    entries.push_back({std::move(key), value, std::move(note)});
}

double BoundLedger::get(const std::string& key) const
{
    for (const auto& e : entries)
        if (e.key == key)
            return e.value;
    throw PreconditionError("ledger has no entry '" + key + "'");
}

bool BoundLedger::has(const std::string& key) const
{
    for (const auto& e : entries)
        if (e.key == key)
            return true;
    return false;
}

BigInt rational_s_threshold()
{
    return superfactorial(19);
}

BoundResult small_points_bound(int rank, double m, const LangConfig& cfg)
{
    require_rank(rank);
    cfg.validate();
    BoundResult r;
    BoundLedger& l = r.ledger;
    l.kind = "small_points";
    l.rank = rank;
    const double a = counting_constant(m, cfg).get_d();
    l.put("M", m, "points with hhat(P) <= M log X");
    l.put("c_L", cfg.c_l, "Lang constant: hhat(P) >= c_L M_E");
    l.put("A", a, "floor(sqrt(9M/c_L)) + 1");
    l.put("torsion", 16, "|E(Q)_tors| <= 16");
    l.put("obtuse", obtuse_code_bound(), "unit vectors with pairwise cos <= -1/2");
    const double c = 16.0 * obtuse_code_bound() * cfg.override_for("c");
    l.put("c", c, "torsion * obtuse * override(c)");
    r.bound = scaled_power(1.0, c, a, rank);
    l.put("bound", r.bound, "c * A^r");
    return r;
}

BoundResult integral_ap_bound(int rank, const LangConfig& cfg)
{
    require_rank(rank);
    cfg.validate();
    BoundResult r;
    BoundLedger& l = r.ledger;
    l.kind = "integral";
    l.rank = rank;

    const double a1 = counting_constant(12, cfg).get_d();
    const double c1 = 16.0 * obtuse_code_bound() * cfg.override_for("c1");
    l.put("A1", a1, "counting constant at M = 12: floor(sqrt(108/c_L)) + 1");
    l.put("c1", c1, "16 * 3 * override(c1)");

    const double cos0 = 0.68;
    const GapParams p0{Rational(0), 1.0, 10.0, 1.32};
    l.put("cos_theta0", cos0, "angle threshold for points in one block");
    l.put("gap_rhs_theta0", gap_small_s_rhs(p0), "sqrt(1.32)/2 + 0 + 1/10 (delta=0, gamma=1, M=10, alpha=1.32)");
    const double a2 = kl_base(std::acos(cos0), cfg.kl_slack);
    const double c2 = cfg.override_for("c2");
    l.put("A2", a2, "exp(kl_rate(arccos 0.68) + slack)");
    l.put("c2", c2, "implied constant of the spherical-code bound");

    const double c3 = std::max({1.0, c1, c2});
    const double a3 = std::max(a1, a2);
    l.put("c3", c3, "max{1, c1, c2}");
    l.put("A3", a3, "max{A1, A2}");
    l.put("m", pick_m(c3, a3, rank), "least integer with c3 A3^r < m <= 2 c3 A3^r");
    r.bound = scaled_power(8.0, c3, a3, rank);
    l.put("bound", r.bound, "N <= 4m <= 8 c3 A3^r");
    return r;
}

BoundResult rational_ap_bound(int rank, const LangConfig& cfg)
{
    require_rank(rank);
    cfg.validate();
    BoundResult r;
    BoundLedger& l = r.ledger;
    l.kind = "rational";
    l.rank = rank;

    const BigInt thr = rational_s_threshold();
    l.put("log10_s_threshold", log_abs(thr) / std::log(10.0), "s >= prod_{j=1}^{19} j! = " + thr.get_str());
    l.put("delta", 0.1, "good terms: gcd(x_i, s) <= s^0.1, at least floor(N/20) of them");

    // h(s) <= 10 log X
    const double a4 = counting_constant(22, cfg).get_d();
    const double c4 = 16.0 * obtuse_code_bound() * cfg.override_for("c4");
    l.put("A4", a4, "counting constant at M = 22");
    l.put("c4", c4, "16 * 3 * override(c4)");
    const double cos1 = 0.86;
    l.put("cos_theta1", cos1, "small-s angle threshold");
    l.put("gap_rhs_theta1", gap_small_s_rhs(GapParams{Rational(1, 10), 0.1, 10.0, 1.47}),
          "sqrt(1.47)/2 + 0.3/2 + 1/10 (delta=0.1, gamma=0.1, M=10, alpha=1.47)");
    const double a5 = kl_base(std::acos(cos1), cfg.kl_slack);
    const double c5 = cfg.override_for("c5");
    l.put("A5", a5, "exp(kl_rate(arccos 0.86) + slack)");
    l.put("c5", c5, "implied constant of the spherical-code bound");
    const double c6 = std::max({1.0, c4, c5});
    const double a6 = std::max(a4, a5);
    l.put("c6", c6, "max{1, c4, c5}");
    l.put("A6", a6, "max{A4, A5}");
    l.put("m_small_s", pick_m(c6, a6, rank), "least integer with c6 A6^r < m");
    const double small_s = scaled_power(320.0, c6, a6, rank);
    l.put("bound_small_s", small_s, "N <= 160m <= 320 c6 A6^r");

    // h(s) > 10 log X
    const double cos2 = 0.84, cos3 = 0.92;
    l.put("cos_theta2", cos2, "small-x angle threshold");
    l.put("gap_rhs_theta2", gap2_large_s_rhs(GapParams{Rational(1, 10), 0.1, 8.0, 1.53}),
          "1.2/1.7 + 1/8 (delta=0.1, gamma=0.1, M=8)");
    l.put("cos_theta3", cos3, "large-s angle threshold");
    l.put("gap_rhs_theta3", gap_large_s_rhs(GapParams{Rational(1, 10), 0.1, 8.0, 1.53}),
          "sqrt(1.53)/2 + 0.3/1.7 + 1/8 (delta=0.1, gamma=0.1, M=8, alpha=1.53)");
    const double a7 = kl_base(std::acos(cos2), cfg.kl_slack);
    const double a8 = kl_base(std::acos(cos3), cfg.kl_slack);
    const double c7 = cfg.override_for("c7"), c8 = cfg.override_for("c8");
    l.put("A7", a7, "exp(kl_rate(arccos 0.84) + slack)");
    l.put("c7", c7, "implied constant of the spherical-code bound");
    l.put("A8", a8, "exp(kl_rate(arccos 0.92) + slack)");
    l.put("c8", c8, "implied constant of the spherical-code bound");
    const double c9 = std::max({1.0, c7, c8});
    const double a9 = std::max(a7, a8);
    l.put("c9", c9, "max{1, c7, c8}");
    l.put("A9", a9, "max{A7, A8}");
    l.put("m_large_s", pick_m(c9, a9, rank), "least integer with c9 A9^r < m");
    const double large_s = scaled_power(240.0, c9, a9, rank);
    l.put("bound_large_s", large_s, "N <= 120m <= 240 c9 A9^r");

    r.bound = std::max(small_s, large_s);
    if (cfg.bounded_denominator_c && cfg.bounded_denominator_base) {
        l.put("c_bounded", *cfg.bounded_denominator_c, "configured constant for s < prod_{j<=19} j!");
        l.put("A_bounded", *cfg.bounded_denominator_base, "configured base for s < prod_{j<=19} j!");
        const double bd = scaled_power(1.0, *cfg.bounded_denominator_c, *cfg.bounded_denominator_base, rank);
        l.put("bound_bounded_denominator", bd, "c_bounded * A_bounded^r");
        r.bound = std::max(r.bound, bd);
        l.flags.push_back("bounded_denominator_configured");
    } else {
        l.flags.push_back("bounded_denominator_unset: bound covers s >= prod_{j=1}^{19} j! only");
    }
    l.put("bound", r.bound, "max over the configured branches");
    return r;
}

double replay_bound(const BoundLedger& l)
{
    if (l.kind == "small_points")
        return scaled_power(1.0, l.get("c"), l.get("A"), l.rank);
    if (l.kind == "integral")
        return scaled_power(8.0, std::max({1.0, l.get("c1"), l.get("c2")}), std::max(l.get("A1"), l.get("A2")), l.rank);
    if (l.kind == "rational") {
        const double c6 = std::max({1.0, l.get("c4"), l.get("c5")});
        const double a6 = std::max(l.get("A4"), l.get("A5"));
        const double c9 = std::max({1.0, l.get("c7"), l.get("c8")});
        const double a9 = std::max(l.get("A7"), l.get("A8"));
        double b = std::max(scaled_power(320.0, c6, a6, l.rank), scaled_power(240.0, c9, a9, l.rank));
        if (l.has("c_bounded"))
            b = std::max(b, scaled_power(1.0, l.get("c_bounded"), l.get("A_bounded"), l.rank));
        return b;
    }
    throw PreconditionError("unknown ledger kind '" + l.kind + "'");
}

} // namespace xap
