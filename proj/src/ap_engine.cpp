#include "xap/ap_engine.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <thread>

namespace xap {

Rational APSequence::term(std::size_t i) const
{
    if (i < 1 || i > x_.size())
        throw PreconditionError("term index out of range");
    return Rational(x_[i - 1], s_);
}

std::vector<Rational> APSequence::terms() const
{
    std::vector<Rational> out;
    out.reserve(x_.size());
    for (const auto& x : x_)
        out.emplace_back(x, s_);
    return out;
}

std::vector<Rational> APSequence::terms_in_input_order() const
{
    auto out = terms();
    if (reversed_)
        std::reverse(out.begin(), out.end());
    return out;
}

APSequence APSequence::make(const Rational& start, const Rational& diff, std::size_t n)
{
    if (n < 1)
        throw PreconditionError("progression needs at least one term");
    if (diff.is_zero())
        throw PreconditionError("progression difference must be nonzero");
    APSequence ap;
    Rational first = start, d = diff;
    if (d.sign() < 0) {
        first = start + d * Rational(static_cast<long>(n - 1));
        d = -d;
        ap.reversed_ = true;
    }
    ap.a_ = first.den();
    ap.b_ = first.num();
    ap.u_ = d.den();
    ap.v_ = d.num();
    ap.s_ = lcm(ap.a_, ap.u_);
    BigInt a_quot, u_quot;
    mpz_divexact(a_quot.get_mpz_t(), ap.s_.get_mpz_t(), ap.a_.get_mpz_t());
    mpz_divexact(u_quot.get_mpz_t(), ap.s_.get_mpz_t(), ap.u_.get_mpz_t());
    const BigInt x1 = ap.b_ * a_quot;
    const BigInt step = ap.v_ * u_quot;
    ap.x_.reserve(n);
    BigInt x = x1;
    for (std::size_t i = 0; i < n; ++i) {
        ap.x_.push_back(x);
        x += step;
    }
    return ap;
}

APSequence APSequence::from_terms(const std::vector<Rational>& terms)
{
    if (terms.size() < 2)
        throw PreconditionError("progression needs at least two terms");
    const Rational d = terms[1] - terms[0];
    if (d.is_zero())
        throw PreconditionError("progression difference must be nonzero");
    for (std::size_t i = 2; i < terms.size(); ++i)
        if (terms[i] - terms[i - 1] != d)
            throw PreconditionError("terms are not in arithmetic progression (index " + std::to_string(i + 1) + ")");
    return make(terms[0], d, terms.size());
}

APSequence APSequence::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string tok;
    std::optional<Rational> start, diff;
    std::optional<std::size_t> len;
    while (in >> tok) {
        auto eq = tok.find('=');
        if (eq == std::string::npos)
            throw ParseError("progression field '" + tok + "' lacks '='");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "start")
            start = Rational::parse(val);
        else if (key == "diff")
            diff = Rational::parse(val);
        else if (key == "len") {
            const BigInt n = parse_bigint(val);
            if (n < 1 || !n.fits_ulong_p())
                throw ParseError("progression length must be a positive integer");
            len = n.get_ui();
        } else
            throw ParseError("unknown progression field '" + key + "'");
    }
    if (!start || !diff || !len)
        throw ParseError("progression needs start=, diff= and len=");
    return make(*start, *diff, *len);
}

std::string APSequence::to_string() const
{
    auto ts = terms_in_input_order();
    const Rational d = ts.size() >= 2 ? ts[1] - ts[0] : (reversed_ ? -diff() : diff());
    return "start=" + ts.front().to_string() + " diff=" + d.to_string() + " len=" + std::to_string(ts.size());
}

void require_open_delta(const Rational& delta)
{
    if (delta <= Rational(0) || delta >= Rational(1))
        throw PreconditionError("delta must satisfy 0 < delta < 1");
}

unsigned long lemma_window_half(const Rational& delta)
{
    require_open_delta(delta);
    return ceil(delta.inverse()).get_ui();
}

BigInt lemma_threshold(unsigned long m)
{
    return superfactorial(2 * m - 1);
}

std::vector<std::size_t> good_terms(const APSequence& ap, const Rational& delta)
{
    require_open_delta(delta);
    const BigInt cap = floor_rational_power(ap.s(), delta);
    std::vector<std::size_t> out;
    const auto& xs = ap.numerators();
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (gcd(xs[i], ap.s()) <= cap)
            out.push_back(i + 1);
    return out;
}

LemmaReport main_lemma_report(const APSequence& ap, const Rational& delta)
{
    LemmaReport r;
    r.delta = delta;
    r.m = lemma_window_half(delta);
    r.threshold = lemma_threshold(r.m);
    r.s_meets_threshold = ap.s() >= r.threshold;
    r.n = ap.size();
    r.good_indices = good_terms(ap, delta);
    r.good_count = r.good_indices.size();
    const std::size_t block = 2 * r.m;
    r.floor_bound = r.n / block;

    std::vector<bool> good(r.n + 1, false);
    for (auto i : r.good_indices)
        good[i] = true;
    r.every_block_has_good = true;
    for (std::size_t k = 0; k + block <= r.n; k += block) {
        bool any = false;
        for (std::size_t i = k + 1; i <= k + block; ++i)
            any = any || good[i];
        r.every_block_has_good = r.every_block_has_good && any;
    }
    r.bound_holds = r.good_count >= r.floor_bound;
    return r;
}

DivisibilityReport window_divisibility_check(const APSequence& ap, const Rational& delta)
{
    const unsigned long m = lemma_window_half(delta);
    DivisibilityReport rep;
    const std::size_t n = ap.size();
    rep.window = std::min<std::size_t>(2 * m, n);
    std::vector<BigInt> g;
    g.reserve(n);
    for (const auto& x : ap.numerators())
        g.push_back(gcd(x, ap.s()));

    // F[j] = 1! 2! ... (j-1)!
    std::vector<BigInt> fprod(rep.window + 1, BigInt(1));
    for (std::size_t j = 2; j <= rep.window; ++j)
        fprod[j] = fprod[j - 1] * factorial(j - 1);

    auto fail = [&](std::string why) {
        if (rep.ok)
            rep.first_failure = std::move(why);
        rep.ok = false;
    };

    for (std::size_t k = 0; k + rep.window <= n; ++k) {
        ++rep.windows_checked;
        for (std::size_t i = 0; i < rep.window; ++i)
            for (std::size_t j = i + 1; j < rep.window; ++j) {
                ++rep.pairs_checked;
                const BigInt h = gcd(g[k + i], g[k + j]);
                if (!mpz_divisible_p(BigInt(static_cast<unsigned long>(j - i)).get_mpz_t(), h.get_mpz_t()))
                    fail("gcd(g_" + std::to_string(k + i + 1) + ", g_" + std::to_string(k + j + 1) + ") = "
                         + h.get_str() + " does not divide " + std::to_string(j - i));
            }
        BigInt prod = g[k], l = g[k];
        for (std::size_t j = 2; j <= rep.window; ++j) {
            const BigInt& gj = g[k + j - 1];
            prod *= gj;
            l = lcm(l, gj);
            if (BigInt(fprod[j] * l) % prod != 0)
                fail("prefix of length " + std::to_string(j) + " at window " + std::to_string(k + 1)
                     + ": product does not divide factorial product times lcm");
        }
    }
    return rep;
}

std::optional<Point> lift_x(const ShortWeierstrass& curve, const Rational& x)
{
    const Rational f = curve.rhs(x);
    auto n = exact_sqrt(f.num());
    if (!n)
        return std::nullopt;
    auto d = exact_sqrt(f.den());
    if (!d)
        return std::nullopt;
    return Point(x, Rational(*n, *d));
}

CurveAPCheck verify_ap_on_curve(const ShortWeierstrass& curve, const APSequence& ap)
{
    CurveAPCheck out;
    const auto ts = ap.terms_in_input_order();
    for (std::size_t i = 0; i < ts.size(); ++i) {
        auto p = lift_x(curve, ts[i]);
        if (!p) {
            out.failure_index = i + 1;
            return out;
        }
        out.points.push_back(std::move(*p));
    }
    out.ok = true;
    return out;
}

LongestAP longest_ap_in(std::vector<Rational> xs)
{
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    LongestAP best;
    const std::size_t n = xs.size();
    if (n == 0)
        return best;
    best.length = 1;
    best.start = xs.front();
    if (n == 1)
        return best;

    // len[j * n + k]: longest progression whose last two terms are xs[j] < xs[k]
    std::vector<std::uint32_t> len(n * n, 0);
    std::size_t best_len = 0;
    Rational best_diff, best_start;
    for (std::size_t k = 1; k < n; ++k) {
        for (std::size_t j = 0; j < k; ++j) {
            const Rational d = xs[k] - xs[j];
            const Rational prev = xs[j] - d;
            std::uint32_t l = 2;
            auto it = std::lower_bound(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(j), prev);
            if (it != xs.begin() + static_cast<std::ptrdiff_t>(j) && *it == prev)
                l = len[static_cast<std::size_t>(it - xs.begin()) * n + j] + 1;
            len[j * n + k] = l;
            if (l < best_len)
                continue;
            const Rational start = xs[k] - d * Rational(static_cast<long>(l - 1));
            if (l > best_len || d < best_diff || (d == best_diff && start < best_start)) {
                best_len = l;
                best_diff = d;
                best_start = start;
            }
        }
    }
    best.length = best_len;
    best.start = best_start;
    best.ap = APSequence::make(best_start, best_diff, best_len);
    return best;
}

LongestAP longest_x_ap(const std::vector<Point>& points)
{
    std::vector<Rational> xs;
    xs.reserve(points.size());
    for (const auto& p : points)
        if (!p.is_infinity())
            xs.push_back(p.x());
    return longest_ap_in(std::move(xs));
}

NxProbe nx_lower_bound(const ShortWeierstrass& curve, double log_h, const EnumerateOptions& opts)
{
    NxProbe probe;
    const Enumeration en = enumerate_points(curve, log_h, opts);
    probe.corpus_size = en.points.size();
    probe.truncated = en.truncated;
    probe.best = longest_x_ap(en.points);
    return probe;
}

/* ---- sweep ---- */

namespace {

struct DeltaPlan {
    Rational delta;
    unsigned long m;
    std::int64_t threshold;  // saturates at INT64_MAX
    bool machine_window;     // prefix products fit in 64 bits
};

struct DeltaCounts {
    std::uint64_t sequences = 0, meeting = 0, bound_viol = 0, div_viol = 0;
    std::string first;
};

/* pairwise gcd(g_i, g_j) | (j - i), and the prefix condition in the
 * equivalent form prod_k gcd(lcm(g_1..g_k), g_{k+1}) | 1! ... (j-1)! */
bool machine_window_ok(const std::int64_t* g, std::size_t w)
{
    for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = i + 1; j < w; ++j)
            if (static_cast<std::int64_t>(j - i) % std::gcd(g[i], g[j]) != 0)
                return false;
    std::int64_t ratio = 1, l = g[0], fprod = 1, fact = 1;
    for (std::size_t j = 2; j <= w; ++j) {
        fact *= static_cast<std::int64_t>(j - 1);
        fprod *= fact;
        const std::int64_t h = std::gcd(l, g[j - 1]);
        ratio *= h;
        l = l / h * g[j - 1];
        if (fprod % ratio != 0)
            return false;
    }
    return true;
}

void sweep_a(long a, const SweepRange& range, const std::vector<DeltaPlan>& plans, std::vector<DeltaCounts>& counts,
             std::uint64_t& progressions)
{
    const std::size_t L = range.max_len;
    std::vector<std::int64_t> x(L), g(L);
    std::vector<BigInt> caps_big;
    std::vector<std::int64_t> caps(plans.size());
    for (long u = 1; u <= range.max_u; ++u) {
        const std::int64_t s = std::lcm<std::int64_t>(a, u);
        for (std::size_t k = 0; k < plans.size(); ++k)
            caps[k] = floor_rational_power(BigInt(static_cast<long>(s)), plans[k].delta).get_si();
        const std::int64_t a_quot = s / a, u_quot = s / u;
        for (long b = -range.max_b; b <= range.max_b; ++b) {
            if (std::gcd(a, b) != 1)
                continue;
            for (long v = -range.max_v; v <= range.max_v; ++v) {
                if (v == 0 || std::gcd(u, v) != 1)
                    continue;
                ++progressions;
                const std::int64_t step = v * u_quot;
                std::int64_t xi = b * a_quot;
                for (std::size_t i = 0; i < L; ++i, xi += step) {
                    x[i] = xi;
                    g[i] = std::gcd(xi, s);
                }
                for (std::size_t k = 0; k < plans.size(); ++k) {
                    const DeltaPlan& plan = plans[k];
                    DeltaCounts& c = counts[k];
                    const bool meets = s >= plan.threshold;
                    const std::size_t block = 2 * plan.m;
                    std::size_t good = 0;
                    for (std::size_t n = 1; n <= L; ++n) {
                        good += g[n - 1] <= caps[k] ? 1 : 0;
                        ++c.sequences;
                        if (!meets)
                            continue;
                        ++c.meeting;
                        if (good < n / block) {
                            if (c.bound_viol++ == 0)
                                c.first = "a=" + std::to_string(a) + " b=" + std::to_string(b) + " u="
                                          + std::to_string(u) + " v=" + std::to_string(v) + " N=" + std::to_string(n);
                        }
                    }
                    const std::size_t w = std::min(block, L);
                    bool ok = true;
                    if (plan.machine_window) {
                        for (std::size_t st = 0; st + w <= L && ok; ++st)
                            ok = machine_window_ok(g.data() + st, w);
                    } else {
                        const APSequence ap = APSequence::make(Rational(BigInt(b), BigInt(a)),
                                                               Rational(BigInt(v), BigInt(u)), L);
                        ok = window_divisibility_check(ap, plan.delta).ok;
                    }
                    if (!ok && c.div_viol++ == 0 && c.first.empty())
                        c.first = "divisibility: a=" + std::to_string(a) + " b=" + std::to_string(b)
                                  + " u=" + std::to_string(u) + " v=" + std::to_string(v);
                }
            }
        }
    }
}

} // namespace

SweepResult lemma_sweep(const SweepRange& range, const std::vector<Rational>& deltas, unsigned threads)
{
    if (range.max_a < 1 || range.max_u < 1 || range.max_b < 0 || range.max_v < 1 || range.max_len < 1)
        throw PreconditionError("sweep ranges must be positive");
    // keeps every x_i, s and window product inside 64 bits
    const BigInt s_max = BigInt(range.max_a) * range.max_u;
    const BigInt x_max = s_max * (BigInt(range.max_b) + BigInt(static_cast<unsigned long>(range.max_len)) * range.max_v);
    if (s_max > BigInt(1L << 31) || x_max > BigInt(1L << 62))
        throw PreconditionError("sweep range too large for the machine-integer sweep");

    std::vector<DeltaPlan> plans;
    for (const auto& d : deltas) {
        const unsigned long m = lemma_window_half(d);
        const BigInt thr = lemma_threshold(m);
        plans.push_back({d, m, thr.fits_slong_p() ? thr.get_si() : INT64_MAX, 2 * m <= 8});
    }

    SweepResult result;
    result.range = range;
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(range.max_a)));
    std::vector<std::vector<DeltaCounts>> per_a(static_cast<std::size_t>(range.max_a),
                                                std::vector<DeltaCounts>(plans.size()));
    std::vector<std::uint64_t> prog_a(static_cast<std::size_t>(range.max_a), 0);
    auto work = [&](unsigned w) {
        for (long a = 1 + static_cast<long>(w); a <= range.max_a; a += static_cast<long>(workers))
            sweep_a(a, range, plans, per_a[static_cast<std::size_t>(a - 1)], prog_a[static_cast<std::size_t>(a - 1)]);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(work, w);
        for (auto& t : pool)
            t.join();
    }

    for (std::size_t k = 0; k < plans.size(); ++k) {
        SweepDeltaResult r;
        r.delta = plans[k].delta;
        r.m = plans[k].m;
        for (std::size_t ai = 0; ai < per_a.size(); ++ai) {
            const DeltaCounts& c = per_a[ai][k];
            r.sequences += c.sequences;
            r.meeting_threshold += c.meeting;
            r.bound_violations += c.bound_viol;
            r.divisibility_violations += c.div_viol;
            if (r.first_violation.empty())
                r.first_violation = c.first;
        }
        result.per_delta.push_back(std::move(r));
    }
    for (auto p : prog_a)
        result.progressions += p;
    return result;
}

} // namespace xap
