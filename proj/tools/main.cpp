#include "commands.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>

namespace {

void model_flags(CLI::App* app, beamsym::cli::Options& o, bool with_source = true) {
  app->add_option("--model", o.model, "eb, rayleigh or timoshenko")->capture_default_str();
  app->add_option("--alpha", o.alpha, "rational p/q; symbolic when omitted");
  app->add_option("--beta", o.beta, "rational p/q; symbolic when omitted");
  app->add_option("--epsilon", o.epsilon, "rational p/q; symbolic when omitted");
  app->add_option("--speed", o.speed, "travelling-wave speed c");
  if (!with_source) return;
  app->add_option("--source", o.source, "none, linear, power, exp, constant, affine or arbitrary")->capture_default_str();
  app->add_option("--a", o.a);
  app->add_option("--b", o.b);
  app->add_option("--n", o.n);
  app->add_option("--a0", o.a0);
  app->add_option("--a1", o.a1);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace beamsym::cli;
  CLI::App app{"Lie symmetries, reductions, Painleve analysis and conservation laws of beam equations"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "print the JSON report");

  Options o;
  std::uint64_t seed = 1;
  auto seeded = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "random seed")->capture_default_str();
    sub->add_flag("--json", json, "print the JSON report");
  };

  auto* sym = app.add_subcommand("check-symmetries", "verify a tabulated symmetry catalog");
  model_flags(sym, o);
  seeded(sym);

  int degree = 2;
  auto* det = app.add_subcommand("solve-determining", "solve the determining equations on a polynomial ansatz");
  model_flags(det, o);
  det->add_option("--degree", degree, "ansatz degree")->capture_default_str();
  seeded(det);

  auto* com = app.add_subcommand("commutators", "structure constants of a catalog");
  model_flags(com, o);
  seeded(com);

  std::string rule;
  auto* red = app.add_subcommand("reduce", "apply a reduction and compare with the tabulated ODE");
  model_flags(red, o);
  red->add_option("--rule", rule, "eq7, eq02e, ..., forced-exp, or travelling-wave")->required();
  seeded(red);

  auto* sol = app.add_subcommand("solve", "closed-form solutions and their residuals");
  model_flags(sol, o);
  seeded(sol);

  PainleveOptions pv;
  auto* pain = app.add_subcommand("painleve", "ARS resonance test");
  pain->add_option("--ode", pv.ode, "eq02g, eq02h, eq02i or ll01");
  pain->add_option("--equation", pv.equation, "ODE in x and y, e.g. 'y_xx = 2*y^3'");
  pain->add_option("--order", pv.order, "series order")->capture_default_str();
  seeded(pain);

  std::string phi = "all";
  auto* cl = app.add_subcommand("claws", "conserved vectors of a source-free model");
  model_flags(cl, o, false);
  cl->add_option("--phi", phi, "A0, 'A1*u + A2', all, or an expression in u, t, x")->capture_default_str();
  seeded(cl);

  SimulateOptions so;
  auto* sim = app.add_subcommand("simulate", "finite-difference run from travelling-wave data");
  model_flags(sim, o, false);
  sim->add_option("--nx", so.nx, "grid points (power of two)")->capture_default_str();
  sim->add_option("--T", so.T, "final time")->capture_default_str();
  sim->add_option("--dt", so.dt, "time step; 0 picks the admissible step")->capture_default_str();
  sim->add_option("--frames", so.frames, "recorded frames")->capture_default_str();
  sim->add_option("--csv", so.csv, "write t,x,u,residual to this file");
  sim->add_flag("--ladder", so.ladder, "convergence ladder at nx, 2nx, 4nx");
  sim->add_flag("!--no-stability-check", so.check_stability, "skip the stability bound");
  seeded(sim);

  auto* all = app.add_subcommand("report-all", "run every acceptance check");
  seeded(all);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  o.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  try {
    if (*sym) report = check_symmetries(o);
    else if (*det) report = solve_determining(o, degree);
    else if (*com) report = commutators(o);
    else if (*red) report = reduce(o, rule);
    else if (*sol) report = solve(o);
    else if (*pain) report = painleve(pv);
    else if (*cl) report = claws(o, phi);
    else if (*sim) report = simulate(o, so);
    else report = report_all(seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!*all) report.wall_seconds = seconds;

  if (json) std::cout << report.to_json().dump(2) << "\n";
  else std::cout << report.to_text();
  std::fprintf(stderr, "wall time %.2f s\n", seconds);
  return report.exit_code();
}
