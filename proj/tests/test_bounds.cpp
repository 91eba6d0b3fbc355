#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "xap/bounds.hpp"

using namespace xap;

namespace {

/* the rate rewritten as ((1+s)log(1+s) - (1-s)log(1-s) - 2s log 2s) / 2s in long double */
long double rate_oracle(long double theta)
{
    const long double s = std::sin(theta);
    const long double minus = s < 1 ? (1 - s) * std::log1p(-s) : 0.0L;
    return ((1 + s) * std::log1p(s) - minus - 2 * s * std::log(2 * s)) / (2 * s);
}

LangConfig cfg_with(double c_l)
{
    LangConfig c;
    c.c_l = c_l;
    return c;
}

std::uint64_t u64_isqrt(std::uint64_t n)
{
    std::uint64_t r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n)
        --r;
    while ((r + 1) * (r + 1) <= n)
        ++r;
    return r;
}

} // namespace

TEST(KlRate, MatchesIndependentForm)
{
    EXPECT_EQ(kl_rate(std::numbers::pi / 2), 0.0);
    EXPECT_NEAR(kl_rate(std::numbers::pi / 3), 0.2782, 1e-4);
    for (int i = 1; i < 100; ++i) {
        const double t = std::numbers::pi / 2 * i / 100;
        EXPECT_NEAR(kl_rate(t), static_cast<double>(rate_oracle(t)), 1e-12) << t;
    }
}

TEST(KlRate, PositiveAndDecreasing)
{
    double prev = kl_rate(1e-3);
    for (int i = 2; i < 200; ++i) {
        const double t = std::numbers::pi / 2 * i / 200;
        const double r = kl_rate(t);
        EXPECT_GT(r, 0.0);
        EXPECT_LT(r, prev);
        prev = r;
    }
    EXPECT_THROW(kl_rate(0.0), PreconditionError);
    EXPECT_THROW(kl_rate(2.0), PreconditionError);
}

TEST(KlBase, Values)
{
    EXPECT_NEAR(kl_base(std::numbers::pi / 3, 0.001), 1.322, 0.002);
    EXPECT_EQ(kl_base(std::numbers::pi / 2, 0.0), 1.0);
    EXPECT_NEAR(kl_base(std::acos(0.68), 0.001), 1.663, 1e-3);
    EXPECT_NEAR(kl_base(std::acos(0.86), 0.001), 2.543, 1e-3);
    EXPECT_NEAR(kl_base(std::acos(0.92), 0.001), 3.379, 1e-3);
    EXPECT_NEAR(kl_base(std::acos(0.84), 0.001), 2.375, 1e-3);
    EXPECT_THROW(kl_base(1.0, -0.1), PreconditionError);
}

TEST(ObtuseCodes, TightAtThree)
{
    EXPECT_EQ(obtuse_code_bound(), 3);
    EXPECT_EQ(obtuse_norm_certificate(3), Rational(0));
    EXPECT_LT(obtuse_norm_certificate(4), Rational(0));
    const auto w = obtuse_witness();
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_NEAR(w[i][0] * w[i][0] + w[i][1] * w[i][1], 1.0, 1e-12);
        for (std::size_t j = i + 1; j < 3; ++j)
            EXPECT_NEAR(w[i][0] * w[j][0] + w[i][1] * w[j][1], -0.5, 1e-12);
    }
}

TEST(CountingConstant, Examples)
{
    EXPECT_EQ(counting_constant(12, cfg_with(12)), 4);
    EXPECT_EQ(counting_constant(10, cfg_with(0.9)), 11);
    EXPECT_EQ(counting_constant(22, cfg_with(1)), 15);
    EXPECT_THROW(counting_constant(0, cfg_with(1)), PreconditionError);
    EXPECT_THROW(counting_constant(1, cfg_with(0)), PreconditionError);
}

TEST(CountingConstant, MatchesIntegerOracle)
{
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::uint64_t> hundredths(1, 100000);
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t mi = hundredths(rng), ci = hundredths(rng);
        const double m = static_cast<double>(mi) / 100, c = static_cast<double>(ci) / 100;
        const std::uint64_t want = u64_isqrt(9 * mi / ci) + 1;
        EXPECT_EQ(counting_constant(m, cfg_with(c)), static_cast<unsigned long>(want)) << m << " " << c;
    }
}

TEST(SmallPoints, Examples)
{
    EXPECT_EQ(small_points_bound(0, 12, cfg_with(12)).bound, 48.0);
    EXPECT_EQ(small_points_bound(2, 12, cfg_with(12)).bound, 768.0);
}

TEST(IntegralBound, Structure)
{
    const BoundResult r0 = integral_ap_bound(0, cfg_with(12));
    EXPECT_EQ(r0.bound, 8 * r0.ledger.get("c3"));
    EXPECT_EQ(r0.ledger.get("A1"), 4.0);
    EXPECT_NEAR(r0.ledger.get("A2"), 1.663, 1e-3);
    EXPECT_EQ(r0.ledger.get("A3"), 4.0);
    EXPECT_LT(r0.ledger.get("gap_rhs_theta0"), r0.ledger.get("cos_theta0"));
    const BoundResult r3 = integral_ap_bound(3, cfg_with(12));
    EXPECT_EQ(r3.bound, 8 * 48 * 64.0);
    const double m = r3.ledger.get("m");
    EXPECT_LT(48 * 64.0, m);
    EXPECT_LE(m, 2 * 48 * 64.0);
}

TEST(RationalBound, Structure)
{
    const BoundResult r0 = rational_ap_bound(0, cfg_with(1));
    EXPECT_EQ(r0.bound, std::max(320 * r0.ledger.get("c6"), 240 * r0.ledger.get("c9")));
    ASSERT_EQ(r0.ledger.flags.size(), 1u);
    EXPECT_NE(r0.ledger.flags[0].find("bounded_denominator_unset"), std::string::npos);
    EXPECT_NEAR(r0.ledger.get("A9"), 3.379, 1e-3);
    EXPECT_NEAR(r0.ledger.get("A5"), 2.543, 1e-3);
    EXPECT_NEAR(r0.ledger.get("A7"), 2.375, 1e-3);
    EXPECT_LE(r0.ledger.get("gap_rhs_theta1"), r0.ledger.get("cos_theta1"));
    EXPECT_LT(r0.ledger.get("gap_rhs_theta2"), r0.ledger.get("cos_theta2"));
    EXPECT_LE(r0.ledger.get("gap_rhs_theta3"), r0.ledger.get("cos_theta3") + 1e-4);
    EXPECT_EQ(rational_s_threshold(), superfactorial(19));

    LangConfig cfg = cfg_with(1);
    cfg.bounded_denominator_c = 1e9;
    cfg.bounded_denominator_base = 2;
    const BoundResult bd = rational_ap_bound(1, cfg);
    EXPECT_EQ(bd.bound, 2e9);
    EXPECT_EQ(bd.ledger.flags[0], "bounded_denominator_configured");
}

TEST(Bounds, ReplayIsExact)
{
    for (int r = 0; r <= 10; ++r)
        for (double c_l : {12.0, 1.0, 0.37}) {
            LangConfig cfg = cfg_with(c_l);
            cfg.overrides["c2"] = 3.5;
            cfg.overrides["c8"] = 1.25;
            for (const BoundResult& b : {integral_ap_bound(r, cfg), rational_ap_bound(r, cfg),
                                          small_points_bound(r, 7.5, cfg)}) {
                EXPECT_EQ(replay_bound(b.ledger), b.bound) << b.ledger.kind << " r=" << r;
                EXPECT_EQ(b.ledger.get("bound"), b.bound);
            }
        }
}

TEST(Bounds, MonotoneInRankAntitoneInLangConstant)
{
    for (int r = 0; r < 10; ++r)
        for (double c_l : {0.5, 2.0, 12.0}) {
            EXPECT_LE(integral_ap_bound(r, cfg_with(c_l)).bound, integral_ap_bound(r + 1, cfg_with(c_l)).bound);
            EXPECT_LE(rational_ap_bound(r, cfg_with(c_l)).bound, rational_ap_bound(r + 1, cfg_with(c_l)).bound);
            EXPECT_GE(integral_ap_bound(r, cfg_with(c_l)).bound, integral_ap_bound(r, cfg_with(c_l * 2)).bound);
            EXPECT_GE(rational_ap_bound(r, cfg_with(c_l)).bound, rational_ap_bound(r, cfg_with(c_l * 2)).bound);
        }
}

TEST(Bounds, OverridesScaleConstants)
{
    LangConfig cfg = cfg_with(12);
    cfg.overrides["c1"] = 2;
    EXPECT_EQ(integral_ap_bound(0, cfg).ledger.get("c1"), 96.0);
    cfg.overrides["c1"] = -1;
    EXPECT_THROW(integral_ap_bound(0, cfg), PreconditionError);
    EXPECT_THROW(integral_ap_bound(-1, cfg_with(1)), PreconditionError);
    EXPECT_THROW(BoundLedger{}.get("missing"), PreconditionError);
}
