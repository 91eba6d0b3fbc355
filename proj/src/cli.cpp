#include "xap/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "xap/ap_engine.hpp"
#include "xap/curve_model.hpp"
#include "xap/exact_arith.hpp"
#include "xap/gap_checker.hpp"
#include "xap/heights.hpp"
#include "xap/points.hpp"

namespace xap::cli {

namespace {

struct Report {
    std::string command;
    Json inputs = Json::object();
    Json result = Json::object();
    std::vector<std::string> citations;
    int code = 0;
};

/* every option value any leaf may bind; each leaf uses its own subset */
struct Inputs {
    std::string output = "json";
    std::string config;
    std::size_t budget = 0;
    unsigned threads = 1;
    std::string on_non_minimal = "warn";
    double tol = default_height_tolerance;
    std::size_t budget_bits = default_height_budget_bits;

    std::string curve, general, p, q, s, delta, point, k;
    std::optional<double> m_e;
    long n = 0;
    std::optional<double> log_h;
    std::string height;

    double gamma = 1, m = 1, alpha = 1.5;
    double large_x_threshold = default_large_x_threshold;

    std::string start, diff;
    std::size_t len = 0;
    std::vector<std::string> terms;

    SweepRange range;
    std::vector<std::string> deltas;

    std::optional<double> theta, cosine;
    double slack = 0.001;

    int rank = 0;
    std::optional<double> c_l, kl_slack;
    double count_m = 0;
    std::optional<int> count_rank;
};

std::string js(const Rational& r) { return r.to_string(); }
std::string js(const BigInt& n) { return n.get_str(); }

Json points_json(const std::vector<Point>& pts)
{
    Json a = Json::array();
    for (const auto& p : pts)
        a.push_back(p.to_string());
    return a;
}

Json ap_json(const APSequence& ap)
{
    Json terms = Json::array();
    for (const auto& t : ap.terms_in_input_order())
        terms.push_back(js(t));
    const auto in_order = ap.terms_in_input_order();
    return Json{{"start", js(in_order.front())},
                {"diff", js(in_order.size() > 1 ? in_order[1] - in_order[0] : ap.diff())},
                {"len", ap.size()},
                {"s", js(ap.s())},
                {"reversed", ap.reversed()},
                {"terms", terms}};
}

Json verdict_json(const Verdict& v)
{
    Json conds = Json::array();
    for (const auto& c : v.conditions) {
        Json e{{"name", c.name}, {"met", c.met}};
        if (!c.detail.empty())
            e["detail"] = c.detail;
        conds.push_back(e);
    }
    return Json{{"preconditions_met", v.preconditions_met},
                {"conditions", conds},
                {"lhs", v.lhs},
                {"rhs", v.rhs},
                {"margin", v.margin},
                {"slack", v.slack},
                {"holds", v.holds},
                {"asymptotic", v.asymptotic},
                {"below_large_x_threshold", v.below_large_x_threshold}};
}

Json height_json(const HeightEstimate& h)
{
    return Json{{"value", h.value}, {"error_bound", h.error_bound}, {"doublings", h.doublings}};
}

void flatten(const Json& j, const std::string& prefix, std::ostream& out)
{
    if (j.is_object()) {
        if (j.empty())
            out << prefix << " = {}\n";
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        if (j.empty())
            out << prefix << " = []\n";
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_string()) {
        out << prefix << " = " << j.get<std::string>() << "\n";
    } else {
        out << prefix << " = " << j.dump() << "\n";
    }
}

void emit(const Report& r, const std::string& format, std::ostream& out)
{
    Json j{{"command", r.command}, {"inputs", r.inputs}, {"result", r.result}, {"citations", r.citations}};
    if (format == "text")
        flatten(j, "", out);
    else
        out << j.dump(2) << "\n";
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ParseError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ShortWeierstrass curve_from(const Inputs& in, Report& r)
{
    ShortWeierstrass c = ShortWeierstrass::parse(in.curve);
    r.inputs["curve"] = c.to_string();
    return c;
}

Point point_from(const std::string& text, const char* key, Report& r)
{
    Point p = Point::parse(text);
    r.inputs[key] = p.to_string();
    return p;
}

BigInt s_from(const Inputs& in, Report& r)
{
    BigInt s = parse_bigint(in.s);
    r.inputs["s"] = js(s);
    return s;
}

Rational delta_from(const Inputs& in, Report& r)
{
    Rational d = Rational::parse(in.delta);
    r.inputs["delta"] = js(d);
    return d;
}

APSequence ap_from(const Inputs& in, Report& r)
{
    const bool by_terms = !in.terms.empty();
    const bool by_shape = !in.start.empty() || !in.diff.empty() || in.len != 0;
    if (by_terms == by_shape)
        throw ParseError("give either --term values or --start, --diff and --len");
    APSequence ap = [&] {
        if (by_terms) {
            std::vector<Rational> ts;
            for (const auto& t : in.terms)
                ts.push_back(Rational::parse(t));
            return APSequence::from_terms(ts);
        }
        if (in.start.empty() || in.diff.empty() || in.len == 0)
            throw ParseError("--start, --diff and --len go together");
        return APSequence::make(Rational::parse(in.start), Rational::parse(in.diff), in.len);
    }();
    r.inputs["ap"] = ap.to_string();
    return ap;
}

GapParams params_from(const Inputs& in, Report& r)
{
    GapParams p{Rational::parse(in.delta), in.gamma, in.m, in.alpha};
    r.inputs["delta"] = js(p.delta);
    r.inputs["gamma"] = p.gamma;
    r.inputs["M"] = p.m;
    r.inputs["alpha"] = p.alpha;
    return p;
}

GapOptions gap_options(const Inputs& in, Report& r)
{
    r.inputs["tol"] = in.tol;
    r.inputs["large_x_threshold"] = in.large_x_threshold;
    return GapOptions{in.tol, in.budget_bits, in.large_x_threshold};
}

double log_h_from(const Inputs& in, Report& r)
{
    if (in.log_h.has_value() == !in.height.empty())
        throw ParseError("give exactly one of --log-h and --height");
    double lh;
    if (in.log_h) {
        lh = *in.log_h;
    } else {
        const BigInt h = parse_bigint(in.height);
        if (h < 1)
            throw PreconditionError("--height must be >= 1");
        lh = log_abs(h);
        r.inputs["height"] = js(h);
    }
    r.inputs["log_h"] = lh;
    return lh;
}

double theta_from(const Inputs& in, Report& r)
{
    if (in.theta.has_value() == in.cosine.has_value())
        throw ParseError("give exactly one of --theta and --cos");
    double t;
    if (in.theta) {
        t = *in.theta;
    } else {
        if (!(*in.cosine >= 0 && *in.cosine < 1))
            throw PreconditionError("--cos must lie in [0, 1)");
        t = std::acos(*in.cosine);
        r.inputs["cos"] = *in.cosine;
    }
    r.inputs["theta"] = t;
    return t;
}

LangConfig config_from(const Inputs& in, Report& r)
{
    LangConfig cfg;
    if (!in.config.empty()) {
        Json j;
        try {
            j = Json::parse(read_file(in.config));
        } catch (const Json::exception& e) {
            throw ParseError("config '" + in.config + "': " + e.what());
        }
        cfg = lang_config_from_json(j);
        r.inputs["config"] = in.config;
    }
    if (in.c_l)
        cfg.c_l = *in.c_l;
    if (in.kl_slack)
        cfg.kl_slack = *in.kl_slack;
    if (!in.c_l && cfg.c_l == 0)
        throw ParseError("--c-l is required (or \"c_L\" in --config)");
    r.inputs["c_L"] = cfg.c_l;
    r.inputs["kl_slack"] = cfg.kl_slack;
    if (!cfg.overrides.empty()) {
        Json o = Json::object();
        for (const auto& [k, v] : cfg.overrides)
            o[k] = v;
        r.inputs["overrides"] = o;
    }
    cfg.validate();
    return cfg;
}

/* Applies --on-non-minimal to a minimality verdict. */
void minimality_policy(Minimality m, const Inputs& in, Report& r)
{
    r.result["minimality"] = to_string(m);
    if (m == Minimality::certified || in.on_non_minimal == "ignore")
        return;
    if (in.on_non_minimal == "error" && m == Minimality::not_minimal) {
        r.result["error"] = "model is not minimal";
        r.code = 2;
        return;
    }
    r.result["warning"] = "model minimality: " + to_string(m);
}

void curve_info(const Inputs& in, Report& r)
{
    if (in.curve.empty() == in.general.empty())
        throw ParseError("give exactly one of --curve and --general");
    std::optional<GeneralWeierstrass> gw;
    if (!in.general.empty()) {
        gw = GeneralWeierstrass::parse(in.general);
        r.inputs["general"] = gw->to_string();
    }
    const ShortWeierstrass c = gw ? to_short_form(*gw) : curve_from(in, r);
    const CurveInvariants inv = invariants(c);
    if (gw) {
        r.result["general"] = Json{{"b2", js(gw->b2())}, {"b4", js(gw->b4())}, {"b6", js(gw->b6())},
                                   {"b8", js(gw->b8())}, {"c4", js(gw->c4())}, {"c6", js(gw->c6())},
                                   {"discriminant", js(gw->discriminant())}, {"j", js(gw->j_invariant())},
                                   {"m_e", m_e(*gw)}};
    }
    r.result["curve"] = c.to_string();
    r.result["discriminant"] = js(inv.delta);
    r.result["j"] = js(inv.j);
    r.result["x_size"] = js(inv.x_size);
    r.result["log_x"] = inv.log_x;
    r.result["h_delta"] = inv.h_delta;
    r.result["h_j"] = inv.h_j;
    r.result["h_delta_upper"] = inv.h_delta_upper;
    r.result["h_j_upper"] = inv.h_j_upper;
    r.result["log_x_upper"] = inv.log_x_upper;
    r.result["m_e_lower"] = inv.m_e_lower;
    r.result["m_e_upper"] = inv.m_e_upper;
    minimality_policy(minimality_status(gw ? *gw : GeneralWeierstrass{0, 0, 0, c.a(), c.b()}), in, r);
    r.citations = {"X = max{|A|^3, B^2}", "Delta = -16(4A^3 + 27B^2), j = -1728 (4A)^3 / Delta",
                   "h(Delta) <= log X + 6.21, h(j) <= log X + 8.85, log X <= 2 M_E + 0.7"};
}

void curve_reduce(const Inputs& in, Report& r)
{
    const GeneralWeierstrass gw = GeneralWeierstrass::parse(in.general);
    r.inputs["general"] = gw.to_string();
    const ShortWeierstrass c = to_short_form(gw);
    r.result["curve"] = c.to_string();
    r.result["A"] = js(c.a());
    r.result["B"] = js(c.b());
    r.result["discriminant_ratio"] = js(Rational(c.discriminant()) / Rational(gw.discriminant()));
    if (!in.point.empty()) {
        const Point p = point_from(in.point, "point", r);
        if (p.is_infinity()) {
            r.result["point"] = "O";
        } else {
            if (!on_general_model(gw, p.x(), p.y()))
                throw PreconditionError("point " + p.to_string() + " is not on the general model");
            const auto [x, y] = map_to_short_form(gw, p.x(), p.y());
            r.result["point"] = Point(x, y).to_string();
        }
    }
    minimality_policy(minimality_status(gw), in, r);
    r.citations = {"A = -27 c4, B = -54 c6", "(x, y) -> (36x + 3 b2, 108(2y + a1 x + a3))"};
}

void curve_rescale(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const BigInt k = parse_bigint(in.k);
    r.inputs["k"] = js(k);
    const CurveInvariants inv = invariants(c);
    const double me = in.m_e ? *in.m_e : std::max(inv.h_j, inv.h_delta);
    r.inputs["m_e"] = me;
    const ShortWeierstrass rc = rescale(c, k);
    const RescaledBounds b = x_prime_bounds(c, k, me);
    r.result["curve"] = rc.to_string();
    r.result["log_k"] = b.log_k;
    r.result["log_x_prime"] = b.log_x_prime;
    r.result["log_x_prime_lower"] = b.log_x_prime_lower;
    r.result["log_x_prime_upper"] = b.log_x_prime_upper;
    r.result["m_e_lower"] = b.m_e_lower;
    r.result["m_e_upper"] = b.m_e_upper;
    r.citations = {"(A, B) -> (k^4 A, k^6 B)", "M_E + 12 log k - 8.85 <= log X' <= 2 M_E + 12 log k + 43.71"};
}

void point_add(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    r.result["sum"] = add(c, p, q).to_string();
    if (!in.s.empty()) {
        const BigInt s = s_from(in, r);
        r.result["x_of_sum_formula"] = js(x_of_sum_formula(c, p, q, s));
    }
    r.citations = {"chord-and-tangent law on y^2 = x^3 + Ax + B"};
}

void point_mul(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r);
    r.inputs["n"] = in.n;
    r.result["product"] = mul(c, in.n, p).to_string();
    r.citations = {"double-and-add"};
}

void point_torsion(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r);
    if (!on_curve(c, p))
        throw PreconditionError("point is not on the curve");
    const auto ord = torsion_order(c, p);
    r.result["is_torsion"] = ord.has_value();
    r.result["order"] = ord ? Json(*ord) : Json(nullptr);
    if (!p.is_infinity()) {
        const XZDecomposition d = decompose(p);
        r.result["m"] = js(d.m);
        r.result["e"] = js(d.e);
    }
    r.citations = {"torsion orders are at most 12; torsion points have integral coordinates"};
}

void point_enumerate(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const double lh = log_h_from(in, r);
    r.inputs["budget"] = in.budget;
    const Enumeration e = enumerate_points(c, lh, EnumerateOptions{in.budget, in.threads});
    r.result["height_bound"] = js(e.height_bound);
    r.result["candidates"] = e.candidates;
    r.result["truncated"] = e.truncated;
    r.result["count"] = e.points.size();
    r.result["points"] = points_json(e.points);
    r.citations = {"x = m/e^2 with gcd(m, e) = 1, max(|m|, e^2) <= H"};
}

void height_weil(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r);
    if (!on_curve(c, p))
        throw PreconditionError("point is not on the curve");
    r.result["value"] = weil_height(p);
    r.citations = {"h(P) = log max{|m|, |n|} for x(P) = m/n"};
}

void height_canonical(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r);
    r.inputs["tol"] = in.tol;
    const HeightEstimate h = canonical_height(c, p, in.tol, in.budget_bits);
    r.result = height_json(h);
    if (!p.is_infinity()) {
        const auto [lo, hi] = height_difference_bounds(c.log_x());
        r.result["weil"] = weil_height(p);
        r.result["difference_bounds"] = Json{lo, hi};
    }
    r.citations = {"hhat(P) = lim h(2^n P) / 4^n (not halved)",
                   "-(5/12) log X - 5.2 <= hhat(P) - h(P) <= (1/3) log X + 4.65"};
}

void angle(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    r.inputs["tol"] = in.tol;
    const CosAngle a = cos_angle(c, p, q, in.tol, in.budget_bits);
    const PairingEstimate pr = pairing(c, p, q, in.tol, in.budget_bits);
    r.result["cos"] = a.value;
    r.result["cos_error_bound"] = a.error_bound;
    r.result["cos_alt"] = a.alt_value;
    r.result["cos_alt_error_bound"] = a.alt_error_bound;
    r.result["forms_agree"] = a.forms_agree;
    r.result["pairing"] = Json{{"value", pr.value}, {"error_bound", pr.error_bound}};
    r.result["hhat_p"] = height_json(a.hp);
    r.result["hhat_q"] = height_json(a.hq);
    r.result["hhat_sum"] = height_json(a.hsum);
    r.result["hhat_diff"] = height_json(a.hdiff);
    r.citations = {"<P, Q> = (hhat(P+Q) - hhat(P) - hhat(Q)) / 2", "cos(P, Q) = <P, Q> / sqrt(hhat(P) hhat(Q))"};
}

void finish_verdict(const Verdict& v, Report& r)
{
    r.result = verdict_json(v);
    r.citations = {v.citation};
    if (!v.preconditions_met)
        r.code = 2;
}

void gap_sum(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    const BigInt s = s_from(in, r);
    finish_verdict(check_sum_height(c, p, q, s, delta_from(in, r)), r);
}

void gap_small_s(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    const BigInt s = s_from(in, r);
    const GapParams params = params_from(in, r);
    finish_verdict(check_gap_small_s(c, p, q, s, params, gap_options(in, r)), r);
}

void gap_large_s(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    const BigInt s = s_from(in, r);
    const GapParams params = params_from(in, r);
    finish_verdict(check_gap_large_s(c, p, q, s, params, gap_options(in, r)), r);
}

void gap_small_x(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    finish_verdict(check_sum_height_small_x(c, p, q, s_from(in, r)), r);
}

void gap_gap2(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const Point p = point_from(in.p, "p", r), q = point_from(in.q, "q", r);
    const BigInt s = s_from(in, r);
    const GapParams params = params_from(in, r);
    finish_verdict(check_gap2_large_s(c, p, q, s, params, gap_options(in, r)), r);
}

void ap_check(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const APSequence ap = ap_from(in, r);
    const CurveAPCheck chk = verify_ap_on_curve(c, ap);
    r.result["ok"] = chk.ok;
    r.result["ap"] = ap_json(ap);
    r.result["points"] = points_json(chk.points);
    r.result["failure_index"] = chk.failure_index ? Json(*chk.failure_index) : Json(nullptr);
    r.citations = {"r_i^3 + A r_i + B is a rational square for every term"};
}

Json longest_json(const LongestAP& l)
{
    Json j{{"length", l.length}};
    if (l.length >= 1)
        j["start"] = js(l.start);
    j["ap"] = l.ap ? ap_json(*l.ap) : Json(nullptr);
    return j;
}

void ap_search(const Inputs& in, Report& r)
{
    const ShortWeierstrass c = curve_from(in, r);
    const double lh = log_h_from(in, r);
    r.inputs["budget"] = in.budget;
    const NxProbe probe = nx_lower_bound(c, lh, EnumerateOptions{in.budget, in.threads});
    r.result = longest_json(probe.best);
    r.result["corpus_size"] = probe.corpus_size;
    r.result["truncated"] = probe.truncated;
    r.citations = {"N_x(E) >= length of the longest x-progression among points of height <= log H"};
}

void ap_longest(const Inputs& in, Report& r)
{
    std::vector<Rational> xs;
    Json echo = Json::array();
    for (const auto& t : in.terms) {
        xs.push_back(Rational::parse(t));
        echo.push_back(js(xs.back()));
    }
    r.inputs["x"] = echo;
    r.result = longest_json(longest_ap_in(xs));
    r.citations = {"longest arithmetic progression inside a finite set of rationals"};
}

void lemma_report(const Inputs& in, Report& r)
{
    const APSequence ap = ap_from(in, r);
    const Rational delta = delta_from(in, r);
    const LemmaReport lr = main_lemma_report(ap, delta);
    Json idx = Json::array();
    for (auto i : lr.good_indices)
        idx.push_back(i);
    r.result["s"] = js(ap.s());
    r.result["m"] = lr.m;
    r.result["threshold"] = js(lr.threshold);
    r.result["s_meets_threshold"] = lr.s_meets_threshold;
    r.result["n"] = lr.n;
    r.result["good_count"] = lr.good_count;
    r.result["bound"] = lr.floor_bound;
    r.result["good_indices"] = idx;
    r.result["every_block_has_good"] = lr.every_block_has_good;
    r.result["bound_holds"] = lr.bound_holds;
    if (!lr.s_meets_threshold)
        r.code = 2;
    r.citations = {"m = ceil(1/delta); s >= prod_{j=1}^{2m-1} j! implies #{i : gcd(x_i, s) <= s^delta} >= floor(N/2m)"};
}

void lemma_divisibility(const Inputs& in, Report& r)
{
    const APSequence ap = ap_from(in, r);
    const Rational delta = delta_from(in, r);
    const DivisibilityReport d = window_divisibility_check(ap, delta);
    r.result["ok"] = d.ok;
    r.result["window"] = d.window;
    r.result["windows_checked"] = d.windows_checked;
    r.result["pairs_checked"] = d.pairs_checked;
    r.result["first_failure"] = d.first_failure.empty() ? Json(nullptr) : Json(d.first_failure);
    r.citations = {"gcd(g_i, g_j) | (j - i)", "g_1 ... g_j | 1! 2! ... (j-1)! lcm(g_1, ..., g_j)"};
}

void lemma_sweep_cmd(const Inputs& in, Report& r)
{
    std::vector<Rational> ds;
    Json echo = Json::array();
    for (const auto& d : in.deltas) {
        ds.push_back(Rational::parse(d));
        echo.push_back(js(ds.back()));
    }
    r.inputs["max_a"] = in.range.max_a;
    r.inputs["max_u"] = in.range.max_u;
    r.inputs["max_b"] = in.range.max_b;
    r.inputs["max_v"] = in.range.max_v;
    r.inputs["max_len"] = in.range.max_len;
    r.inputs["deltas"] = echo;
    const SweepResult res = lemma_sweep(in.range, ds, in.threads);
    r.result["progressions"] = res.progressions;
    Json per = Json::array();
    bool clean = true;
    for (const auto& d : res.per_delta) {
        per.push_back(Json{{"delta", js(d.delta)},
                           {"m", d.m},
                           {"threshold", js(lemma_threshold(d.m))},
                           {"sequences", d.sequences},
                           {"meeting_threshold", d.meeting_threshold},
                           {"bound_violations", d.bound_violations},
                           {"divisibility_violations", d.divisibility_violations},
                           {"first_violation", d.first_violation.empty() ? Json(nullptr) : Json(d.first_violation)}});
        clean = clean && d.bound_violations == 0 && d.divisibility_violations == 0;
    }
    r.result["per_delta"] = per;
    r.result["clean"] = clean;
    r.citations = {"m = ceil(1/delta); s >= prod_{j=1}^{2m-1} j! implies #{good} >= floor(N/2m)",
                   "gcd(g_i, g_j) | (j - i)"};
}

void code_rate(const Inputs& in, Report& r)
{
    r.result["rate"] = kl_rate(theta_from(in, r));
    r.citations = {"A(r, theta) <= exp(r (kl_rate(theta) + o(1)))"};
}

void code_base(const Inputs& in, Report& r)
{
    const double t = theta_from(in, r);
    r.inputs["slack"] = in.slack;
    r.result["rate"] = kl_rate(t);
    r.result["base"] = kl_base(t, in.slack);
    r.citations = {"A(r, theta) << exp(kl_rate(theta) + slack)^r"};
}

void code_obtuse(const Inputs&, Report& r)
{
    Json cert = Json::array();
    for (int k = 1; k <= 4; ++k)
        cert.push_back(Json{{"k", k}, {"max_norm_squared", js(obtuse_norm_certificate(k))}});
    Json wit = Json::array();
    for (const auto& v : obtuse_witness())
        wit.push_back(Json{v[0], v[1]});
    r.result["bound"] = obtuse_code_bound();
    r.result["certificate"] = cert;
    r.result["witness"] = wit;
    r.citations = {"0 <= |v_1 + ... + v_k|^2 <= k - k(k-1)/2 when every <v_i, v_j> <= -1/2"};
}

void bound_ledger_report(const BoundResult& b, Report& r)
{
    r.result["bound"] = b.bound;
    r.result["ledger"] = ledger_to_json(b.ledger);
}

void bound_integral(const Inputs& in, Report& r)
{
    const LangConfig cfg = config_from(in, r);
    r.inputs["rank"] = in.rank;
    bound_ledger_report(integral_ap_bound(in.rank, cfg), r);
    r.citations = {"hhat(P) >= c_L M_E for non-torsion P", "A(r, theta) << exp(kl_rate(theta) + slack)^r",
                   "N <= 4m <= 8 c3 A3^r"};
}

void bound_rational(const Inputs& in, Report& r)
{
    const LangConfig cfg = config_from(in, r);
    r.inputs["rank"] = in.rank;
    bound_ledger_report(rational_ap_bound(in.rank, cfg), r);
    r.citations = {"hhat(P) >= c_L M_E for non-torsion P", "A(r, theta) << exp(kl_rate(theta) + slack)^r",
                   "N <= max{320 c6 A6^r, 240 c9 A9^r} for s >= prod_{j=1}^{19} j!"};
}

void bound_counting(const Inputs& in, Report& r)
{
    const LangConfig cfg = config_from(in, r);
    r.inputs["M"] = in.count_m;
    r.result["A"] = js(counting_constant(in.count_m, cfg));
    if (in.count_rank) {
        r.inputs["rank"] = *in.count_rank;
        const BoundResult b = small_points_bound(*in.count_rank, in.count_m, cfg);
        r.result["small_points"] = Json{{"bound", b.bound}, {"ledger", ledger_to_json(b.ledger)}};
    }
    r.citations = {"A = floor(sqrt(9M / c_L)) + 1", "#{P : hhat(P) <= M log X} <= 16 * 3 * A^r"};
}

using Handler = std::function<void(const Inputs&, Report&)>;

} // namespace

LangConfig lang_config_from_json(const Json& j)
{
    if (!j.is_object())
        throw ParseError("config must be a JSON object");
    LangConfig cfg;
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "c_L") {
                cfg.c_l = v.get<double>();
            } else if (k == "kl_slack") {
                cfg.kl_slack = v.get<double>();
            } else if (k == "overrides") {
                for (const auto& [ok, ov] : v.items())
                    cfg.overrides[ok] = ov.get<double>();
            } else if (k == "bounded_denominator") {
                cfg.bounded_denominator_c = v.at("c").get<double>();
                cfg.bounded_denominator_base = v.at("base").get<double>();
            } else {
                throw ParseError("unknown config key '" + k + "'");
            }
        }
    } catch (const Json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
    return cfg;
}

Json ledger_to_json(const BoundLedger& l)
{
    Json entries = Json::array();
    for (const auto& e : l.entries)
        entries.push_back(Json{{"key", e.key}, {"value", e.value}, {"note", e.note}});
    return Json{{"kind", l.kind}, {"rank", l.rank}, {"entries", entries}, {"flags", l.flags}};
}

BoundLedger ledger_from_json(const Json& j)
{
    BoundLedger l;
    try {
        l.kind = j.at("kind").get<std::string>();
        l.rank = j.at("rank").get<int>();
        for (const auto& e : j.at("entries"))
            l.put(e.at("key").get<std::string>(), e.at("value").get<double>(), e.value("note", ""));
        for (const auto& f : j.at("flags"))
            l.flags.push_back(f.get<std::string>());
    } catch (const Json::exception& e) {
        throw ParseError(std::string("ledger: ") + e.what());
    }
    return l;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Inputs in;
    in.deltas = {"7/20", "1/2", "3/5", "3/4"};
    std::vector<std::pair<CLI::App*, Handler>> leaves;

    CLI::App app{"Elliptic curve x-progressions: arithmetic, heights, gap principles and bounds", "xap"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--output", in.output, "json or text")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--config", in.config, "LangConfig JSON file");
    app.add_option("--budget", in.budget, "maximum enumeration candidates (0 = unlimited)");
    app.add_option("--threads", in.threads, "worker threads")->check(CLI::Range(1u, 256u));
    app.add_option("--on-non-minimal", in.on_non_minimal, "ignore, warn or error")
        ->check(CLI::IsMember({"ignore", "warn", "error"}));
    app.add_option("--tol", in.tol, "canonical height tolerance");
    app.add_option("--height-budget-bits", in.budget_bits, "coordinate size cap while doubling");

    auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& desc, Handler h) {
        CLI::App* sub = parent->add_subcommand(name, desc);
        leaves.emplace_back(sub, std::move(h));
        return sub;
    };
    auto curve_opt = [&](CLI::App* a) { a->add_option("--curve", in.curve, "A,B for y^2 = x^3 + Ax + B")->required(); };
    auto pq_opts = [&](CLI::App* a) {
        curve_opt(a);
        a->add_option("--p", in.p, "point x,y or O")->required();
        a->add_option("--q", in.q, "point x,y or O")->required();
    };
    auto s_opt = [&](CLI::App* a) { a->add_option("--s", in.s, "common denominator s >= 1")->required(); };
    auto delta_opt = [&](CLI::App* a) { a->add_option("--delta", in.delta, "p/q or decimal")->required(); };
    auto gap_opts = [&](CLI::App* a, bool with_alpha) {
        pq_opts(a);
        s_opt(a);
        delta_opt(a);
        a->add_option("--gamma", in.gamma, "gamma > 0")->required();
        a->add_option("--m", in.m, "M > 0")->required();
        if (with_alpha)
            a->add_option("--alpha", in.alpha, "alpha > 1")->required();
        a->add_option("--large-x-threshold", in.large_x_threshold, "log X below which results are flagged");
    };
    auto ap_opts = [&](CLI::App* a) {
        a->add_option("--start", in.start, "first term p/q");
        a->add_option("--diff", in.diff, "common difference p/q");
        a->add_option("--len", in.len, "number of terms");
        a->add_option("--term", in.terms, "explicit terms, repeated");
    };
    auto log_h_opts = [&](CLI::App* a) {
        a->add_option("--log-h", in.log_h, "log of the naive height bound");
        a->add_option("--height", in.height, "naive height bound H");
    };
    auto theta_opts = [&](CLI::App* a) {
        a->add_option("--theta", in.theta, "angle in radians, 0 < theta <= pi/2");
        a->add_option("--cos", in.cosine, "cos(theta) in [0, 1)");
    };
    auto lang_opts = [&](CLI::App* a) {
        a->add_option("--c-l", in.c_l, "Lang constant c_L > 0");
        a->add_option("--kl-slack", in.kl_slack, "slack added to kl_rate");
    };

    CLI::App* curve = app.add_subcommand("curve", "curve models and invariants");
    curve->require_subcommand(1);
    CLI::App* ci = leaf(curve, "info", "invariants of a model", curve_info);
    ci->add_option("--curve", in.curve, "A,B");
    ci->add_option("--general", in.general, "a1,a2,a3,a4,a6");
    CLI::App* cr = leaf(curve, "reduce", "general to short model", curve_reduce);
    cr->add_option("--general", in.general, "a1,a2,a3,a4,a6")->required();
    cr->add_option("--point", in.point, "point x,y on the general model");
    CLI::App* cs = leaf(curve, "rescale", "(A, B) -> (k^4 A, k^6 B)", curve_rescale);
    curve_opt(cs);
    cs->add_option("--k", in.k, "k >= 1")->required();
    cs->add_option("--m-e", in.m_e, "M_E used in the bounds (default from this model)");

    CLI::App* point = app.add_subcommand("point", "group law");
    point->require_subcommand(1);
    CLI::App* pa = leaf(point, "add", "P + Q", point_add);
    pq_opts(pa);
    pa->add_option("--s", in.s, "also evaluate the x(P+Q) formula with this s");
    CLI::App* pm = leaf(point, "mul", "nP", point_mul);
    curve_opt(pm);
    pm->add_option("--p", in.p, "point x,y or O")->required();
    pm->add_option("--n", in.n, "multiplier")->required();
    CLI::App* pt = leaf(point, "torsion", "torsion order", point_torsion);
    curve_opt(pt);
    pt->add_option("--p", in.p, "point x,y or O")->required();
    CLI::App* pe = leaf(point, "enumerate", "points of bounded naive height", point_enumerate);
    curve_opt(pe);
    log_h_opts(pe);

    CLI::App* height = app.add_subcommand("height", "heights");
    height->require_subcommand(1);
    CLI::App* hw = leaf(height, "weil", "naive height", height_weil);
    curve_opt(hw);
    hw->add_option("--p", in.p, "point x,y")->required();
    CLI::App* hc = leaf(height, "canonical", "canonical height", height_canonical);
    curve_opt(hc);
    hc->add_option("--p", in.p, "point x,y or O")->required();

    pq_opts(leaf(&app, "angle", "cosine of the angle between P and Q", angle));

    CLI::App* gap = app.add_subcommand("gap", "gap principle checks");
    gap->require_subcommand(1);
    CLI::App* gs = leaf(gap, "sum", "sum-height inequality", gap_sum);
    pq_opts(gs);
    s_opt(gs);
    delta_opt(gs);
    gap_opts(leaf(gap, "small-s", "angle gap for small s", gap_small_s), true);
    gap_opts(leaf(gap, "large-s", "angle gap for large s", gap_large_s), true);
    CLI::App* gx = leaf(gap, "small-x", "sum-height inequality for small x", gap_small_x);
    pq_opts(gx);
    s_opt(gx);
    gap_opts(leaf(gap, "gap2", "angle gap for small x and large s", gap_gap2), false);

    CLI::App* ap = app.add_subcommand("ap", "x-progressions on curves");
    ap->require_subcommand(1);
    CLI::App* ac = leaf(ap, "check", "lift a progression to the curve", ap_check);
    curve_opt(ac);
    ap_opts(ac);
    CLI::App* as = leaf(ap, "search", "longest x-progression among small points", ap_search);
    curve_opt(as);
    log_h_opts(as);
    CLI::App* al = leaf(ap, "longest", "longest progression inside a set", ap_longest);
    al->add_option("--x", in.terms, "rational values, repeated")->required();

    CLI::App* lemma = app.add_subcommand("lemma", "counting lemma on progressions");
    lemma->require_subcommand(1);
    CLI::App* lr = leaf(lemma, "report", "good terms of a progression", lemma_report);
    ap_opts(lr);
    delta_opt(lr);
    CLI::App* ld = leaf(lemma, "divisibility", "gcd chain over windows", lemma_divisibility);
    ap_opts(ld);
    delta_opt(ld);
    CLI::App* lw = leaf(lemma, "sweep", "exhaustive grid sweep", lemma_sweep_cmd);
    lw->add_option("--max-a", in.range.max_a, "a <= max_a");
    lw->add_option("--max-u", in.range.max_u, "u <= max_u");
    lw->add_option("--max-b", in.range.max_b, "|b| <= max_b");
    lw->add_option("--max-v", in.range.max_v, "1 <= |v| <= max_v");
    lw->add_option("--max-len", in.range.max_len, "N <= max_len");
    lw->add_option("--delta", in.deltas, "deltas, repeated");

    CLI::App* code = app.add_subcommand("code", "spherical codes");
    code->require_subcommand(1);
    theta_opts(leaf(code, "rate", "Kabatiansky-Levenshtein exponent", code_rate));
    CLI::App* cb = leaf(code, "base", "exp(rate + slack)", code_base);
    theta_opts(cb);
    cb->add_option("--slack", in.slack, "slack >= 0");
    leaf(code, "obtuse", "codes with pairwise cos <= -1/2", code_obtuse);

    CLI::App* bound = app.add_subcommand("bound", "conditional bounds");
    bound->require_subcommand(1);
    CLI::App* bi = leaf(bound, "integral", "integral x-progressions", bound_integral);
    lang_opts(bi);
    bi->add_option("--rank", in.rank, "Mordell-Weil rank")->required()->check(CLI::NonNegativeNumber);
    CLI::App* br = leaf(bound, "rational", "rational x-progressions", bound_rational);
    lang_opts(br);
    br->add_option("--rank", in.rank, "Mordell-Weil rank")->required()->check(CLI::NonNegativeNumber);
    CLI::App* bc = leaf(bound, "counting", "counting constant", bound_counting);
    lang_opts(bc);
    bc->add_option("--m", in.count_m, "M > 0")->required();
    bc->add_option("--rank", in.count_rank, "also bound the number of small points");

    std::vector<std::string> argv{"xap"};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<const char*> cargv;
    for (const auto& a : argv)
        cargv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    for (const auto& [sub, handler] : leaves) {
        if (!sub->parsed())
            continue;
        Report r;
        for (const CLI::App* a = sub; a != nullptr && a != &app; a = a->get_parent())
            r.command = r.command.empty() ? a->get_name() : a->get_name() + " " + r.command;
        try {
            handler(in, r);
        } catch (const ParseError& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        } catch (const HeightBudgetExceeded& e) {
            r.result = Json{{"error", e.what()}, {"best", height_json(e.best())}};
            r.code = 2;
        } catch (const PreconditionError& e) {
            r.result = Json{{"error", e.what()}};
            r.code = 2;
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        }
        emit(r, in.output, out);
        return r.code;
    }
    err << "error: no command given\n";
    return 1;
}

} // namespace xap::cli
