#include "xap/gap_checker.hpp"

#include <cmath>
#include <optional>

namespace xap {

void GapParams::validate() const
{
    if (delta < Rational(0) || delta > Rational(1))
        throw PreconditionError("delta must lie in [0, 1]");
    if (!(gamma > 0))
        throw PreconditionError("gamma must be positive");
    if (!(m > 0))
        throw PreconditionError("M must be positive");
    if (!(alpha > 1))
        throw PreconditionError("alpha must exceed 1");
}

namespace {

double large_s_denominator(const GapParams& params)
{
    const double d = 2 * (1 - params.delta_value()) - params.gamma;
    if (!(d > 0))
        throw PreconditionError("invalid parameters: 2(1 - delta) - gamma must be positive");
    return d;
}

void finish(Verdict& v)
{
    v.preconditions_met = true;
    for (const auto& c : v.conditions)
        v.preconditions_met = v.preconditions_met && c.met;
    v.margin = v.rhs - v.lhs;
    v.holds = v.preconditions_met && v.margin >= -v.slack;
}

/* Shared bookkeeping for one pair (P, Q) with common denominator s. */
struct PairContext {
    const ShortWeierstrass& curve;
    const Point& p;
    const Point& q;
    const BigInt& s;
    Verdict& v;

    PairContext(const ShortWeierstrass& c, const Point& p_, const Point& q_, const BigInt& s_, Verdict& v_)
        : curve(c), p(p_), q(q_), s(s_), v(v_)
    {
    }

    bool affine = false;
    bool valid_s = false;
    bool integral = false;
    BigInt x1, x2;

    void add(std::string name, bool met, std::string detail = {})
    {
        v.conditions.push_back({std::move(name), met, std::move(detail)});
    }

    void basics()
    {
        affine = !p.is_infinity() && !q.is_infinity();
        add("P, Q affine", affine);
        add("P, Q on curve", on_curve(curve, p) && on_curve(curve, q));
        valid_s = s >= 1;
        add("s >= 1", valid_s, "s = " + s.get_str());
        if (affine && valid_s) {
            const Rational sx1 = Rational(s) * p.x(), sx2 = Rational(s) * q.x();
            integral = sx1.is_integer() && sx2.is_integer();
            add("s x(P), s x(Q) integral", integral);
            if (integral) {
                x1 = sx1.num();
                x2 = sx2.num();
            }
        } else {
            add("s x(P), s x(Q) integral", false);
        }
    }

    void gcd_conditions(const Rational& delta)
    {
        if (!integral) {
            add("gcd(x1, s) <= s^delta", false);
            add("gcd(x2, s) <= s^delta", false);
            return;
        }
        const BigInt cap = floor_rational_power(s, delta);
        const BigInt g1 = gcd(x1, s), g2 = gcd(x2, s);
        add("gcd(x1, s) <= s^delta", g1 <= cap,
            "gcd = " + g1.get_str() + ", floor(s^delta) = " + cap.get_str());
        add("gcd(x2, s) <= s^delta", g2 <= cap,
            "gcd = " + g2.get_str() + ", floor(s^delta) = " + cap.get_str());
    }

    /* X^(1/6) <= x(P) < x(Q), compared exactly as x(P) >= 0 and x(P)^6 >= X */
    void large_x_ordering()
    {
        const Rational X(curve.x_size());
        const bool lower = affine && p.x().sign() >= 0 && p.x().pow(6) >= X;
        add("x(P) >= X^(1/6)", lower);
        add("x(P) < x(Q)", affine && p.x() < q.x());
    }

    /* |x(P)|, |x(Q)| <= 2 X^(1/6), i.e. x^6 <= 64 X */
    void small_x_box()
    {
        const Rational cap = Rational(64) * Rational(curve.x_size());
        add("|x(P)| <= 2 X^(1/6)", affine && p.x().pow(6) <= cap);
        add("|x(Q)| <= 2 X^(1/6)", affine && q.x().pow(6) <= cap);
        add("x1 != x2", affine && p.x() != q.x());
    }

    bool sum_is_affine() const
    {
        return affine && on_curve(curve, p) && on_curve(curve, q) && p.x() != q.x();
    }
};

double log_s(const BigInt& s)
{
    return s >= 1 ? log_abs(s) : 0.0;
}

struct AngleInputs {
    std::optional<CosAngle> cos;
    double hp = 0, hq = 0;
};

/* hhat(P), hhat(Q) > M log X, optional ratio bound, then the angle itself. */
AngleInputs angle_conditions(PairContext& ctx, const GapParams& params, const GapOptions& opts, bool with_ratio)
{
    AngleInputs in;
    const double log_x = ctx.curve.log_x();
    const bool usable = ctx.sum_is_affine();
    const bool non_torsion = usable && !is_torsion(ctx.curve, ctx.p) && !is_torsion(ctx.curve, ctx.q);
    ctx.add("P, Q non-torsion", non_torsion);
    if (non_torsion) {
        in.cos = cos_angle(ctx.curve, ctx.p, ctx.q, opts.tol, opts.budget_bits);
        in.hp = in.cos->hp.value;
        in.hq = in.cos->hq.value;
    }
    const double floor_h = params.m * log_x;
    ctx.add("hhat(P) > M log X", non_torsion && in.hp > floor_h,
            "hhat(P) = " + std::to_string(in.hp) + ", M log X = " + std::to_string(floor_h));
    ctx.add("hhat(Q) > M log X", non_torsion && in.hq > floor_h,
            "hhat(Q) = " + std::to_string(in.hq) + ", M log X = " + std::to_string(floor_h));
    if (with_ratio) {
        const double ratio = non_torsion ? std::max(in.hp / in.hq, in.hq / in.hp) : 0.0;
        ctx.add("max hhat ratio <= alpha", non_torsion && ratio <= params.alpha,
                "ratio = " + std::to_string(ratio));
    }
    return in;
}

void angle_verdict(Verdict& v, const AngleInputs& in, double rhs, const GapOptions& opts, double log_x)
{
    v.rhs = rhs;
    v.lhs = in.cos ? in.cos->value : 0.0;
    v.slack = 3 * opts.tol;
    v.asymptotic = true;
    v.below_large_x_threshold = log_x < opts.large_x_threshold;
    finish(v);
    if (!in.cos)
        v.holds = false;
}

} // namespace

double gap_small_s_rhs(const GapParams& params)
{
    params.validate();
    return std::sqrt(params.alpha) / 2 + 3 * params.delta_value() / (2 * params.m * params.gamma) + 1 / params.m;
}

double gap_large_s_rhs(const GapParams& params)
{
    params.validate();
    return std::sqrt(params.alpha) / 2 + 3 * params.delta_value() / large_s_denominator(params) + 1 / params.m;
}

double gap2_large_s_rhs(const GapParams& params)
{
    params.validate();
    return (1 + 2 * params.delta_value()) / large_s_denominator(params) + 1 / params.m;
}

Verdict check_sum_height(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                         const Rational& delta)
{
    if (delta < Rational(0) || delta > Rational(1))
        throw PreconditionError("delta must lie in [0, 1]");
    Verdict v;
    v.citation = "h(P+Q) <= h(P) + 2h(Q) + 3*delta*h(s) + 2.9  [X^(1/6) <= x(P) < x(Q), gcd(x_i,s) <= s^delta]";
    PairContext ctx(curve, p, q, s, v);
    ctx.basics();
    ctx.large_x_ordering();
    ctx.gcd_conditions(delta);
    if (ctx.sum_is_affine()) {
        v.lhs = weil_height(add(curve, p, q));
        v.rhs = weil_height(p) + 2 * weil_height(q) + 3 * delta.to_double() * log_s(s) + 2.9;
    }
    v.slack = 1e-9;
    finish(v);
    return v;
}

Verdict check_gap_small_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                          const GapParams& params, const GapOptions& opts)
{
    const double rhs = gap_small_s_rhs(params);
    Verdict v;
    v.citation = "cos(P,Q) <= sqrt(alpha)/2 + 3*delta/(2*M*gamma) + 1/M  [h(s) <= log X/gamma, hhat > M log X, ratio <= alpha]";
    PairContext ctx(curve, p, q, s, v);
    ctx.basics();
    ctx.large_x_ordering();
    ctx.gcd_conditions(params.delta);
    const double log_x = curve.log_x();
    ctx.add("h(s) <= log X / gamma", ctx.valid_s && log_s(s) <= log_x / params.gamma);
    const AngleInputs in = angle_conditions(ctx, params, opts, true);
    angle_verdict(v, in, rhs, opts, log_x);
    return v;
}

Verdict check_gap_large_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                          const GapParams& params, const GapOptions& opts)
{
    const double rhs = gap_large_s_rhs(params);
    Verdict v;
    v.citation = "cos(P,Q) <= sqrt(alpha)/2 + 3*delta/(2(1-delta) - gamma) + 1/M  [h(s) > log X/gamma, hhat > M log X, ratio <= alpha]";
    PairContext ctx(curve, p, q, s, v);
    ctx.basics();
    ctx.large_x_ordering();
    ctx.gcd_conditions(params.delta);
    const double log_x = curve.log_x();
    ctx.add("h(s) > log X / gamma", ctx.valid_s && log_s(s) > log_x / params.gamma);
    const AngleInputs in = angle_conditions(ctx, params, opts, true);
    angle_verdict(v, in, rhs, opts, log_x);
    return v;
}

Verdict check_sum_height_small_x(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s)
{
    Verdict v;
    v.citation = "h(P+Q) <= 3h(s) + (1/2) log X + 3.9  [|x(P)|, |x(Q)| <= 2 X^(1/6), x1 != x2]";
    PairContext ctx(curve, p, q, s, v);
    ctx.basics();
    ctx.small_x_box();
    if (ctx.sum_is_affine()) {
        v.lhs = weil_height(add(curve, p, q));
        v.rhs = 3 * log_s(s) + 0.5 * curve.log_x() + 3.9;
    }
    v.slack = 1e-9;
    finish(v);
    return v;
}

Verdict check_gap2_large_s(const ShortWeierstrass& curve, const Point& p, const Point& q, const BigInt& s,
                           const GapParams& params, const GapOptions& opts)
{
    const double rhs = gap2_large_s_rhs(params);
    Verdict v;
    v.citation = "cos(P,Q) <= (1 + 2*delta)/(2(1-delta) - gamma) + 1/M  [|x| <= 2 X^(1/6), h(s) > log X/gamma, hhat > M log X]";
    PairContext ctx(curve, p, q, s, v);
    ctx.basics();
    ctx.small_x_box();
    ctx.gcd_conditions(params.delta);
    const double log_x = curve.log_x();
    ctx.add("h(s) > log X / gamma", ctx.valid_s && log_s(s) > log_x / params.gamma);
    const AngleInputs in = angle_conditions(ctx, params, opts, false);
    angle_verdict(v, in, rhs, opts, log_x);
    return v;
}

} // namespace xap
