#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "superstar/cli.hpp"

using namespace superstar;

namespace {

struct Expressions : ::testing::Test {
  VariableTable t;
  Expressions() {
    t.add("l1", Parity::even, true);
    t.add("l2", Parity::even, true);
    t.add("x", Parity::even);
    t.add("t1", Parity::odd);
    t.add("t2", Parity::odd);
  }
  GradedPoly P(const std::string& s) const { return parse_expression(s, t); }
  std::string R(const std::string& s) const { return render(P(s), t); }
};

TEST_F(Expressions, Literals) {
  EXPECT_EQ(R("l1*l2"), "l1*l2");
  EXPECT_EQ(P("6/4"), GradedPoly(make_rational(3, 2)));
  EXPECT_EQ(P("-2/3*x + 2/3*x"), GradedPoly{});
  EXPECT_EQ(P("hbar^2"), GradedPoly::hbar() * GradedPoly::hbar());
}

TEST_F(Expressions, OddFactorsKeepWrittenOrder) {
  EXPECT_EQ(R("t2*t1"), "-t1*t2");
  EXPECT_TRUE(P("t1*x*t1").is_zero());
  EXPECT_EQ(P("t2*t1 + t1*t2"), GradedPoly{});
}

TEST_F(Expressions, PowersAndInverses) {
  const GradedPoly s = P("l1^2 + l2^2");
  EXPECT_EQ(P("(l1^2 + l2^2)^3"), s * s * s);
  EXPECT_EQ(P("l1^-2*l1^2"), GradedPoly(1));
  EXPECT_EQ(P("x/l1"), P("x*l1^-1"));
  EXPECT_EQ(P("x/(2*l1)"), P("1/2*x*l1^-1"));
}

TEST_F(Expressions, Errors) {
  EXPECT_THROW(P("x/x"), IllegalDivision);
  EXPECT_THROW(P("x^-1"), IllegalDivision);
  EXPECT_THROW(P("1/(l1 + l2)"), IllegalDivision);
  EXPECT_THROW(P("1/0"), IllegalDivision);
  try {
    P("x + q");
    ADD_FAILURE();
  } catch (const UnknownIdentifier& e) {
    EXPECT_EQ(e.position(), std::optional<std::size_t>(4));
  }
  try {
    P("l1 l2");
    ADD_FAILURE();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 3u);
  }
  for (const char* bad : {"", "x +", "(x", "x)", "x^", "x^y", "2x", "x**2", "x $ y"})
    EXPECT_THROW(P(bad), Error) << "'" << bad << "'";
}

// Rendering is an inverse of parsing on engine output.
TEST(RenderRoundTrip, EngineProducts) {
  std::mt19937_64 rng(5);
  for (const char* name : {"P3|4", "T1-cotangent", "L5|6", "WP[1,3]"}) {
    const ModelSpec m = builtin(name);
    const StarEngine e(m.bivector, m.order);
    const auto vars = m.variables();
    for (int i = 0; i < 40; ++i) {
      auto pick = [&] {
        GradedPoly p(make_rational(static_cast<long>(rng() % 7) - 3, 1 + rng() % 3));
        for (int k = 0; k < 2; ++k) p = p * GradedPoly::var(vars[rng() % vars.size()]);
        return p + GradedPoly::var(vars[rng() % vars.size()]);
      };
      const GradedPoly f = pick(), g = pick();
      if (!homogeneous_parity(f) || !homogeneous_parity(g)) continue;
      const GradedPoly p = star(e, f, g);
      ASSERT_EQ(parse_expression(render(p, m.table), m.table), p) << render(p, m.table);
    }
  }
}

struct CliResult {
  int code;
  std::string out, err;
};

CliResult cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> v;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

TEST(Cli, VerifyBuiltin) {
  const CliResult r = cli({"verify", "P3|4"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("comm z1 z2 = 2*hbar*l1*l2 : pass\n"), std::string::npos);
  EXPECT_NE(r.out.find("P3|4: "), std::string::npos);
  EXPECT_NE(r.out.find(" 0 failed"), std::string::npos);
}

TEST(Cli, VerifyFailureExitsOne) {
  const CliResult r = cli({"verify", "T1-cotangent", "--quiet"});
  EXPECT_EQ(r.code, 1);
  ASSERT_EQ(lines(r.out).size(), 1u);
  EXPECT_NE(r.out.find("associativity"), std::string::npos);
}

TEST(Cli, JsonAndHumanReportTheSameChecks) {
  const CliResult human = cli({"verify", "WP[2,2]"});
  const CliResult json = cli({"verify", "WP[2,2]", "--json"});
  ASSERT_EQ(human.code, json.code);
  const auto h = lines(human.out), j = lines(json.out);
  ASSERT_EQ(h.size(), j.size() + 1);  // human output ends with a summary line
  const VerificationReport report = verify_model(builtin("WP[2,2]"));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto rec = nlohmann::json::parse(j[i]);
    EXPECT_EQ(rec.at("check_id"), report.records[i].check_id);
    const std::string status = rec.at("status");
    EXPECT_EQ(h[i], human_line(report.records[i]));
    EXPECT_EQ(h[i].substr(h[i].rfind(" : ") + 3, status.size()), status);
    for (const char* key : {"category", "lhs", "rhs", "detail"}) EXPECT_TRUE(rec.contains(key));
  }
}

TEST(Cli, StarAndComm) {
  CliResult r = cli({"comm", "L5|6", "--a", "Y1", "--b", "Y2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0\n");
  r = cli({"comm", "L5|6", "--a", "X1", "--b", "Y1"});
  EXPECT_EQ(r.out, "hbar*l2*mu2\n");
  r = cli({"star", "P3|4", "--lhs", "z1", "--rhs", "z2"});
  EXPECT_EQ(r.out, "z1*z2 + hbar*l1*l2\n");
  r = cli({"star", "P3|4", "--lhs", "z1", "--rhs", "z2", "--json"});
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("operation"), "star");
  EXPECT_EQ(j.at("result"), "z1*z2 + hbar*l1*l2");
}

TEST(Cli, ModelFileArgument) {
  const CliResult r = cli({"comm", std::string(SUPERSTAR_MODELS_DIR) + "/wp_1_3.model", "--a", "xi2", "--b", "xi2"});
  EXPECT_EQ(r.code, 0) << r.err;
  const ModelSpec m = builtin("WP[1,3]");
  EXPECT_EQ(parse_expression(r.out.substr(0, r.out.size() - 1), m.table),
            parse_expression("hbar*(l1^2 + l2^2)^3", m.table));
}

TEST(Cli, CalabiYau) {
  EXPECT_EQ(cli({"cy", "--weighted", "1", "1", "1", "1", "--", "2", "2"}).out, "index 0, Calabi-Yau: yes\n");
  EXPECT_EQ(cli({"cy", "--weighted", "1", "1", "1", "1", "--", "1", "2"}).out, "index 1, Calabi-Yau: no\n");
  EXPECT_EQ(cli({"cy", "--projective", "3", "4"}).out, "index 0, Calabi-Yau: yes\n");
  EXPECT_EQ(cli({"cy", "--ambitwistor", "3"}).out, "index 0,0, Calabi-Yau: yes\n");
  EXPECT_EQ(cli({"cy", "--projective", "3", "2", "--json"}).out, "{\"index\":[2],\"calabi_yau\":false}\n");
}

TEST(Cli, ListAndExport) {
  const CliResult list = cli({"list-builtins"});
  EXPECT_EQ(lines(list.out), builtin_names());
  const CliResult exp = cli({"export", "WP[4,0]"});
  EXPECT_EQ(exp.code, 0);
  EXPECT_TRUE(parse_model_text(exp.out) == builtin("WP[4,0]"));
}

TEST(Cli, UsageAndInputErrorsExitTwo) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{}, {"frobnicate"}, {"verify"}, {"verify", "CP9"},
        {"comm", "P3|4", "--a", "z1", "--b", "q"}, {"star", "P3|4", "--lhs", "z1 z2", "--rhs", "1"},
        {"cy"}, {"cy", "--projective", "3", "4", "--ambitwistor", "3"}, {"verify", "P3|4", "--order", "0"}}) {
    const CliResult r = cli(args);
    EXPECT_EQ(r.code, 2) << (args.empty() ? "<none>" : args[0]);
    EXPECT_TRUE(r.out.empty());
    EXPECT_FALSE(r.err.empty());
  }
}

TEST(Cli, ReportsAreByteIdenticalAcrossRuns) {
  EXPECT_EQ(cli({"verify", "L5|6", "--json"}).out, cli({"verify", "L5|6", "--json"}).out);
}

}  // namespace
