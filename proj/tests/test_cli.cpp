#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "xap/ap_engine.hpp"
#include "xap/cli.hpp"
#include "xap/points.hpp"

using namespace xap;
using xap::cli::Json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

Outcome run(std::vector<std::string> args)
{
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

double ledger_value(const Json& ledger, const std::string& key)
{
    for (const auto& e : ledger.at("entries"))
        if (e.at("key") == key)
            return e.at("value").get<double>();
    throw std::runtime_error("missing " + key);
}

} // namespace

TEST(Cli, CurveInfo)
{
    const Outcome o = run({"curve", "info", "--curve", "0,-2"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json j = o.json();
    EXPECT_EQ(j["command"], "curve info");
    EXPECT_EQ(j["result"]["discriminant"], "-1728");
    EXPECT_EQ(j["result"]["j"], "0");
    EXPECT_EQ(j["result"]["x_size"], "4");
    EXPECT_FALSE(j["citations"].empty());
}

TEST(Cli, LemmaReport)
{
    const Outcome o = run({"lemma", "report", "--start", "1/12", "--diff", "1/12", "--len", "8", "--delta", "3/5"});
    ASSERT_EQ(o.code, 0) << o.err;
    const Json r = o.json()["result"];
    EXPECT_EQ(r["good_count"], 7);
    EXPECT_EQ(r["bound"], 2);

    const Outcome dec = run({"lemma", "report", "--start", "1/12", "--diff", "1/12", "--len", "8", "--delta", "0.6"});
    EXPECT_EQ(dec.json()["inputs"]["delta"], "3/5");
    EXPECT_EQ(dec.json()["result"], r);

    const Outcome text = run({"--output", "text", "lemma", "report", "--start", "1/12", "--diff", "1/12", "--len", "8",
                              "--delta", "3/5"});
    EXPECT_NE(text.out.find("result.good_count = 7\n"), std::string::npos);
}

TEST(Cli, BoundIntegralLedgerReplays)
{
    const Outcome o = run({"bound", "integral", "--rank", "3", "--c-l", "12"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(ledger_value(o.json()["result"]["ledger"], "A3"), 4.0);
    for (int r = 0; r <= 10; ++r) {
        const Json j = run({"bound", "integral", "--rank", std::to_string(r), "--c-l", "12"}).json();
        const BoundLedger l = cli::ledger_from_json(j["result"]["ledger"]);
        EXPECT_EQ(replay_bound(l), j["result"]["bound"].get<double>()) << r;
    }
}

TEST(Cli, DeterministicBytes)
{
    const std::vector<std::string> args{"angle", "--curve", "0,17", "--p", "-2,3", "--q", "8,23"};
    const Outcome a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const std::vector<std::string> en{"--threads", "3", "point", "enumerate", "--curve", "-7,10", "--height", "300"};
    EXPECT_EQ(run(en).out, run({"point", "enumerate", "--curve", "-7,10", "--height", "300"}).out);
}

TEST(Cli, ThinAdapterRoundTrip)
{
    const ShortWeierstrass c(0, 17);
    const Point p = Point::parse("-2,3"), q = Point::parse("8,23");
    const Json j = run({"point", "add", "--curve", "0,17", "--p", "-2,3", "--q", "8,23"}).json();
    EXPECT_EQ(Point::parse(j["result"]["sum"].get<std::string>()), add(c, p, q));

    const Json m = run({"point", "mul", "--curve", "0,-2", "--p", "3,5", "--n", "2"}).json();
    EXPECT_EQ(m["result"]["product"], "129/100,-383/1000");

    const Json t = run({"point", "torsion", "--curve", "0,1", "--p", "2,3"}).json();
    EXPECT_EQ(t["result"]["order"], 6);

    const Json s = run({"ap", "search", "--curve", "-1,0", "--log-h", "0.6931471805599453"}).json();
    EXPECT_GE(s["result"]["length"].get<int>(), 3);

    const Json l = run({"ap", "longest", "--x", "0", "--x", "1", "--x", "3", "--x", "7"}).json();
    EXPECT_EQ(l["result"]["length"], 2);

    const Json chk = run({"ap", "check", "--curve", "0,-2", "--term", "3", "--term", "4"}).json();
    EXPECT_EQ(chk["result"]["ok"], false);
    EXPECT_EQ(chk["result"]["failure_index"], 2);

    const Json ob = run({"code", "obtuse"}).json();
    EXPECT_EQ(ob["result"]["bound"], 3);

    const Json cc = run({"bound", "counting", "--m", "10", "--c-l", "0.9"}).json();
    EXPECT_EQ(cc["result"]["A"], "11");
}

TEST(Cli, ExitCodes)
{
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"curve", "info", "--curve", "1;2"}).code, 1);
    EXPECT_EQ(run({"bound", "integral", "--rank", "2"}).code, 1);
    EXPECT_EQ(run({"--output", "xml", "code", "obtuse"}).code, 1);
    EXPECT_EQ(run({"--help"}).code, 0);

    const Outcome pre = run({"gap", "sum", "--curve", "0,-2", "--p", "3,5", "--q", "3,-5", "--s", "1", "--delta", "0"});
    EXPECT_EQ(pre.code, 2);
    EXPECT_EQ(pre.json()["result"]["preconditions_met"], false);

    const Outcome sing = run({"curve", "info", "--curve", "0,0"});
    EXPECT_EQ(sing.code, 2);
    EXPECT_TRUE(sing.json()["result"].contains("error"));

    const Outcome nm = run({"--on-non-minimal", "error", "curve", "info", "--general", "0,0,0,-625,0"});
    EXPECT_EQ(nm.code, 2);
    EXPECT_EQ(run({"--on-non-minimal", "warn", "curve", "info", "--general", "0,0,0,-625,0"}).code, 0);
}

TEST(Cli, BudgetTruncates)
{
    const Json j = run({"--budget", "50", "point", "enumerate", "--curve", "-7,10", "--height", "300"}).json();
    EXPECT_EQ(j["result"]["truncated"], true);
    EXPECT_LE(j["result"]["candidates"].get<int>(), 50);
}

TEST(Cli, ConfigFile)
{
    const auto path = std::filesystem::temp_directory_path() / "xap_cli_config_test.json";
    {
        std::ofstream f(path);
        f << R"({"c_L": 12, "kl_slack": 0.001, "overrides": {"c1": 2}})";
    }
    const Outcome o = run({"--config", path.string(), "bound", "integral", "--rank", "0"});
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(ledger_value(o.json()["result"]["ledger"], "c1"), 96.0);
    EXPECT_EQ(o.json()["result"]["bound"], 768.0);
    {
        std::ofstream f(path);
        f << R"({"c_L": 12, "bogus": 1})";
    }
    EXPECT_EQ(run({"--config", path.string(), "bound", "integral", "--rank", "0"}).code, 1);
    std::filesystem::remove(path);
}
