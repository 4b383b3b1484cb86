#include "beamsym/numlab.hpp"
#include "beamsym/reduce.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace beamsym {
namespace {

using models::ModelKind;
using numlab::GridSpec;

const Expr t = Expr::independent("t");
const Expr x = Expr::independent("x");
constexpr double kPi = std::numbers::pi;

// Travelling wave of the reduced ODE at alpha = 3, beta = 1/2, epsilon = 1/5, speed 1.
struct Wave {
  Expr u;
  GridSpec grid;
};
Wave wave(ModelKind kind, int nx) {
  const models::ModelParams mp{Expr(3), Expr(Rational(1, 2)), Expr(Rational(1, 5))};
  const auto tw = reduce::travelling_wave_solution(kind, mp, Expr(1), {Expr(0), Expr(0), Expr(1), Expr(Rational(1, 2))});
  Wave w{tw.solution, {}};
  w.grid.params = {3, 0.5, 0.2};
  w.grid.Lx = 2 * kPi / std::sqrt(eval_numeric(tw.k_squared, {}));
  w.grid.Nx = nx;
  w.grid.T = w.grid.Lx;
  w.grid.frames = 9;
  return w;
}

TEST(Numlab, EulerBernoulliReturnsAfterOnePeriod) {
  GridSpec g;
  g.Nx = 256;
  g.T = 2 * kPi;
  g.frames = 2;
  const auto sim = numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t));
  const auto& last = sim.frames.back();
  EXPECT_DOUBLE_EQ(last.t, 2 * kPi);
  double worst = 0;
  for (int j = 0; j < g.Nx; ++j) worst = std::max(worst, std::abs(last.u[j] - std::sin(sim.x[j])));
  EXPECT_LT(worst, 1e-3);
}

TEST(Numlab, ZeroDataStaysZero) {
  for (auto kind : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    GridSpec g;
    g.Nx = 32;
    g.params = {2, 0.5, 0.2};
    const auto sim = numlab::simulate(kind, g, Expr(0));
    for (const auto& f : sim.frames)
      for (double v : f.u) EXPECT_EQ(v, 0.0);
  }
}

TEST(Numlab, StabilityBound) {
  GridSpec g;
  g.Nx = 64;
  const double dx = g.dx();
  const double limit = 0.25 * dx * dx;
  EXPECT_NEAR(numlab::admissible_time_step(ModelKind::EulerBernoulli, g), limit, 1e-15);
  EXPECT_TRUE(numlab::modes_stable(ModelKind::EulerBernoulli, g, 2 * limit));
  EXPECT_FALSE(numlab::modes_stable(ModelKind::EulerBernoulli, g, 2.02 * limit));
  g.dt = 1.5 * limit;
  EXPECT_THROW(numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t)), numlab::InstabilityError);
}

TEST(Numlab, BlowUpDetected) {
  GridSpec g;
  g.Nx = 64;
  g.dt = 0.6 * g.dx() * g.dx();
  g.T = 2000 * g.dt;
  g.check_stability = false;
  // Nyquist content seeds the unstable mode.
  EXPECT_THROW(numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t) + Expr(Rational(1, 1000)) * cos(32 * x)),
               numlab::InstabilityError);
}

TEST(Numlab, SingularMassOperator) {
  GridSpec g;
  g.Nx = 64;
  g.params = {1, -0.5, 0};
  g.dt = 1e-3;
  g.check_stability = false;
  EXPECT_THROW(numlab::simulate(ModelKind::Rayleigh, g, sin(x)), numlab::SingularOperatorError);
}

TEST(Numlab, RejectsBadGrid) {
  GridSpec g;
  g.Nx = 48;
  EXPECT_THROW(numlab::simulate(ModelKind::EulerBernoulli, g, sin(x)), numlab::NumlabError);
}

TEST(Numlab, ImplicitSchemesConverge) {
  for (auto kind : {ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    double prev = 0;
    for (int nx : {64, 128, 256}) {
      const auto w = wave(kind, nx);
      const double err = numlab::max_error(numlab::simulate(kind, w.grid, w.u), w.u);
      if (prev > 0) EXPECT_NEAR(std::log2(prev / err), 2.0, 0.3) << models::to_string(kind) << " " << nx;
      prev = err;
    }
    EXPECT_LT(prev, 1e-3);
  }
}

TEST(Numlab, ConvergenceLadder) {
  const auto ladder = numlab::convergence_ladder({1, 1, 0}, 1, {64, 128, 256});
  ASSERT_EQ(ladder.orders.size(), 2u);
  for (double o : ladder.orders) EXPECT_NEAR(o, 2.0, 0.3);
  for (std::size_t i = 0; i + 1 < ladder.rungs.size(); ++i)
    EXPECT_NEAR(ladder.rungs[i].dt / ladder.rungs[i + 1].dt, 4.0, 0.01);
}

TEST(Numlab, CrestSpeed) {
  GridSpec g;
  g.Nx = 512;
  g.T = 2 * kPi;
  g.frames = 200;
  const auto sim = numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t));
  EXPECT_NEAR(numlab::crest_speed(sim), 1.0, 0.01);
  // alpha*beta = 4, c = 2 gives k = 1.
  g.params = {2, 2, 0};
  g.T = kPi;
  const auto fast = numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - 2 * t));
  EXPECT_NEAR(numlab::crest_speed(fast), 2.0, 0.02);
}

TEST(Numlab, ResidualOnGrid) {
  const models::ModelParams mp{Expr(3), Expr(Rational(1, 2)), Expr(Rational(1, 5))};
  GridSpec g;
  g.Nx = 64;
  g.T = 2;
  g.params = {3, 0.5, 0.2};
  const auto eb = reduce::travelling_wave_solution(ModelKind::EulerBernoulli, mp, Expr(Rational(3, 2)),
                                                   {Expr(Rational(1, 3)), Expr(Rational(-2, 7)), 1, -1});
  EXPECT_LT(numlab::residual_on_grid(ModelKind::EulerBernoulli, eb.solution, g, 64), 1e-10);
  // The EB wavenumber does not satisfy the Rayleigh dispersion relation.
  EXPECT_GT(numlab::residual_on_grid(ModelKind::Rayleigh, eb.solution, g, 64), 0.1);
  for (auto kind : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko})
    EXPECT_EQ(numlab::residual_on_grid(kind, Expr(Rational(5, 3)), g, 8), 0.0);
}

TEST(Numlab, SpectralDerivative) {
  const int n = 32;
  std::vector<double> f(n);
  const double L = 3.0;
  for (int j = 0; j < n; ++j) f[j] = std::sin(2 * kPi * 3 * j / n);
  const auto d2 = numlab::spectral_derivative(f, L, 2);
  const double k = 2 * kPi * 3 / L;
  for (int j = 0; j < n; ++j) EXPECT_NEAR(d2[j], -k * k * f[j], 1e-9);
  EXPECT_NEAR(numlab::periodic_integral(std::vector<double>(n, 2.0), L / n), 2 * L, 1e-14);
}

// Two EB modes with different speeds (alpha*beta = 1): k = 1, c = 1 and k = 2, c = 2.
GridSpec two_mode_grid() {
  GridSpec g;
  g.Nx = 64;
  g.T = 2 * kPi;
  g.frames = 9;
  return g;
}
const Expr two_mode = sin(x - t) + Expr(Rational(1, 2)) * cos(2 * x - 4 * t);

TEST(Numlab, ConservedDensitiesDoNotDrift) {
  for (auto kind : {ModelKind::EulerBernoulli, ModelKind::Rayleigh, ModelKind::Timoshenko}) {
    auto w = wave(kind, 128);
    const bool eb = kind == ModelKind::EulerBernoulli;
    const auto sim = eb ? numlab::simulate(kind, two_mode_grid(), two_mode) : numlab::simulate(kind, w.grid, w.u);
    const auto model = models::make_model(kind);
    int checked = 0;
    for (const auto& g : claws::catalog_generators(kind))
      for (const auto& mu : claws::default_multipliers()) {
        const auto d = numlab::density_drift(sim, claws::conserved_vector(model, g, mu));
        if (!d.applicable) {
          EXPECT_FALSE(d.reason.empty());
          continue;
        }
        ++checked;
        EXPECT_LT(d.relative_drift, 1e-6) << g.label << " " << mu.name;
      }
    EXPECT_GE(checked, 6) << models::to_string(kind);
  }
}

TEST(Numlab, NonConservedDensityDrifts) {
  const auto sim = numlab::simulate(ModelKind::EulerBernoulli, two_mode_grid(), two_mode);
  claws::ConservedVector fake;
  fake.ct = pow(Expr::jet("u"), 4);
  fake.cx = Expr(0);
  EXPECT_GT(numlab::density_drift(sim, fake).relative_drift, 1e-4);
}

TEST(Numlab, CsvIsDeterministic) {
  GridSpec g;
  g.Nx = 16;
  g.frames = 3;
  const auto sim = numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t));
  std::ostringstream a, b;
  numlab::write_csv(a, sim, sin(x - t));
  numlab::write_csv(b, numlab::simulate(ModelKind::EulerBernoulli, g, sin(x - t)), sin(x - t));
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x,u,residual");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 3 * 16);
}

}  // namespace
}  // namespace beamsym
