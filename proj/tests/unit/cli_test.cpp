#include "commands.hpp"

#include <gtest/gtest.h>

namespace beamsym::cli {
namespace {

TEST(Cli, CheckSymmetriesPasses) {
  Options o;
  const auto r = check_symmetries(o);
  EXPECT_EQ(r.status, "pass");
  EXPECT_EQ(r.exit_code(), 0);
  EXPECT_EQ(r.checks.size(), 4u);
  EXPECT_EQ(r.data["finite_generators"], 4);
}

TEST(Cli, ReportSchema) {
  Options o;
  o.model = "rayleigh";
  auto r = commutators(o);
  r.wall_seconds = 0.5;
  const auto j = r.to_json();
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "inputs", "status", "checks", "data", "wall_seconds"}));
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("name"));
    EXPECT_TRUE(c["pass"].is_boolean());
  }
}

TEST(Cli, UsageErrors) {
  Options o;
  o.model = "plate";
  EXPECT_THROW(check_symmetries(o), UsageError);
  o.model = "eb";
  o.alpha = "one half";
  EXPECT_THROW(solve(o), UsageError);
  o.alpha.clear();
  o.model = "rayleigh";
  o.source = "power";
  EXPECT_THROW(check_symmetries(o), UsageError);
  EXPECT_THROW(reduce(Options{}, "eq99"), UsageError);
  EXPECT_THROW(painleve({}), UsageError);
  EXPECT_THROW(painleve({"unknown", "", 8}), UsageError);
}

TEST(Cli, ParseRational) {
  EXPECT_EQ(parse_rational("--beta", "1/2"), Rational(1, 2));
  EXPECT_EQ(parse_rational("--a", "-3"), Rational(-3));
  EXPECT_THROW(parse_rational("--a", "1/0"), UsageError);
}

TEST(Cli, DegenerateRegimeFails) {
  Options o;
  o.model = "rayleigh";
  o.alpha = "1";
  o.beta = "1";
  o.speed = "1";
  const auto r = solve(o);
  EXPECT_EQ(r.status, "fail");
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Cli, ReductionDiscrepancyStatus) {
  EXPECT_EQ(reduce(Options{}, "eq7").status, "pass");
  EXPECT_EQ(reduce(Options{}, "forced-exp").status, "discrepancy");
}

TEST(Cli, PainleveVerdicts) {
  EXPECT_EQ(painleve({"eq02i", "", 8}).status, "pass");
  EXPECT_EQ(painleve({"eq02g", "", 8}).status, "fail");
  const auto r = painleve({"", "y_xx = 2*y^3", 6});
  EXPECT_EQ(r.status, "pass");
}

TEST(Cli, ClawsCountsVectors) {
  Options o;
  o.model = "timoshenko";
  const auto r = claws(o, "A0");
  EXPECT_EQ(r.status, "pass");
  EXPECT_EQ(r.data["conserved_vectors"].size(), 4u);
  EXPECT_THROW(claws(o, "u^^2"), UsageError);
}

TEST(Cli, SimulateStabilityFailure) {
  Options o;
  SimulateOptions s;
  s.nx = 64;
  s.dt = 0.05;
  EXPECT_EQ(simulate(o, s).status, "fail");
  s.dt = 0;
  EXPECT_EQ(simulate(o, s).status, "pass");
}

TEST(Cli, ReportAllDeterministic) {
  const auto a = report_all(7).to_json().dump();
  const auto b = report_all(7).to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(report_all(7).to_json().count("wall_seconds"), 0u);
}

}  // namespace
}  // namespace beamsym::cli
