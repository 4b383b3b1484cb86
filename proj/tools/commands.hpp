#pragma once

// Subcommands of the beamsym tool. Each returns a RunReport; main() maps it to an exit code.

#include "checks.hpp"

#include "beamsym/models.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsym::cli {

using checks::Json;

/// Bad flag values and unsupported combinations; exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct RunReport {
  std::string command;
  Json inputs = Json::object();
  std::string status = "pass";  // pass, fail or discrepancy
  std::vector<Check> checks;
  Json data = Json::object();
  std::optional<double> wall_seconds;  // omitted by report-all

  void add(std::string name, bool pass, std::string detail = "");
  /// pass when every check passes; `on_failure` otherwise.
  void settle(const std::string& on_failure = "fail");
  int exit_code() const { return status == "pass" ? 0 : 1; }
  Json to_json() const;
  std::string to_text() const;
};

/// Flags shared by the model-based subcommands. Empty strings mean "symbolic".
struct Options {
  std::string model = "eb";
  std::string alpha, beta, epsilon;
  std::string source = "none";
  std::string a, b, n, a0, a1;
  std::string speed;
  std::uint64_t seed = 1;

  models::ModelKind model_kind() const;
  models::SourceKind source_kind() const;
  models::ModelParams params() const;
  models::SourceSpec source_spec() const;
  Expr speed_or(const Expr& fallback) const;
  Json echo() const;
};

/// "p/q" or a decimal integer; UsageError otherwise.
Rational parse_rational(const std::string& flag, const std::string& text);

RunReport check_symmetries(const Options& o);
RunReport solve_determining(const Options& o, int degree);
RunReport commutators(const Options& o);
RunReport reduce(const Options& o, const std::string& rule);
RunReport solve(const Options& o);

struct PainleveOptions {
  std::string ode;       // registry name
  std::string equation;  // or an equation in x and y(x)
  int order = 8;
};
RunReport painleve(const PainleveOptions& p);

RunReport claws(const Options& o, const std::string& phi);

struct SimulateOptions {
  int nx = 128;
  double T = 1;
  double dt = 0;
  int frames = 64;
  std::string csv;
  bool ladder = false;
  bool check_stability = true;
};
RunReport simulate(const Options& o, const SimulateOptions& s);

RunReport report_all(std::uint64_t seed);

}  // namespace beamsym::cli
