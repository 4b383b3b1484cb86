#pragma once

// Finite-difference oracle for the beam equations on a periodic domain:
// explicit and operator-implicit leapfrog schemes, exact-derivative residuals
// on grids, convergence ladders and conserved-density drift.

#include "beamsym/claws.hpp"
#include "beamsym/models.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamsym::numlab {

class NumlabError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
/// Time step outside the stability region, or norm growth beyond the blow-up threshold.
class InstabilityError : public NumlabError {
 public:
  using NumlabError::NumlabError;
};
class SingularOperatorError : public NumlabError {
 public:
  using NumlabError::NumlabError;
};

struct Params {
  double alpha = 1;
  double beta = 1;
  double epsilon = 0;
};

struct GridSpec {
  double Lx = 6.283185307179586;
  int Nx = 128;
  double dt = 0;  // 0 picks the largest admissible step
  double T = 1;
  Params params;
  int frames = 64;             // recorded states, evenly spaced, including t = 0 and t = T
  bool check_stability = true;  // false lets the blow-up detector catch an unstable step
  Assignment constants;         // values of further parameters in the initial data

  double dx() const { return Lx / Nx; }
};

/// Is every Fourier mode of the scheme stable at time step dt? Exact per-mode test.
bool modes_stable(models::ModelKind kind, const GridSpec& grid, double dt);
/// Largest step dt0/2^m stable at twice its size, dt0 from the Rayleigh-type symbol bound.
/// For EB this is 0.25*dx^2/sqrt(alpha*beta).
double admissible_time_step(models::ModelKind kind, const GridSpec& grid);

struct FieldState {
  double t = 0;
  std::vector<double> u, ut, utt, uttt;  // time derivatives from the scheme at this level
};

struct Simulation {
  models::ModelKind kind{};
  GridSpec grid;  // with the time step actually used
  int steps = 0;
  std::vector<double> x;
  std::vector<FieldState> frames;
};

/// Integrates from closed-form initial data u(0, x) and its time derivatives.
/// EB: leapfrog with the five-point fourth difference. Rayleigh: leapfrog with
/// (1 - beta*D2) inverted per step. Timoshenko: w = u_tt with the mass term
/// averaged over three levels, one cyclic tridiagonal solve per step.
Simulation simulate(models::ModelKind kind, const GridSpec& grid, const Expr& initial);

/// Model parameters, grid constants and the multiplier constants A0 = 13/10, A1 = 7/10, A2 = -2/5.
Assignment parameter_values(const GridSpec& grid);

/// max |E(u)| over Nx x time_samples points of [0, Lx) x [0, T], derivatives taken symbolically.
double residual_on_grid(models::ModelKind kind, const Expr& solution, const GridSpec& grid, int time_samples = 64);

/// max over frames and points of |u - exact|.
double max_error(const Simulation& sim, const Expr& exact);

/// d^order f / dx^order of periodic samples by discrete Fourier transform.
std::vector<double> spectral_derivative(const std::vector<double>& f, double Lx, int order);

/// Trapezoidal rule on a periodic grid.
double periodic_integral(const std::vector<double>& f, double dx);

struct DensityDrift {
  bool applicable = true;
  std::string reason;             // set when not applicable
  std::vector<double> integrals;  // per frame
  double relative_drift = 0;      // max |I - I0| / scale
};

/// Trapezoidal integral of c^t on each simulated frame. Not applicable when the
/// components depend explicitly on x or involve a family function.
DensityDrift density_drift(const Simulation& sim, const claws::ConservedVector& cv);

/// Fitted crest speed: parabolic peak location per frame, unwrapped, least-squares slope.
double crest_speed(const Simulation& sim);

struct LadderRung {
  int Nx = 0;
  double dt = 0;
  double error = 0;  // L-infinity against the exact solution over all frames
};
struct Ladder {
  std::vector<LadderRung> rungs;
  std::vector<double> orders;  // log2(e_i / e_{i+1}) for successive doublings
};

/// EB travelling wave u = sin(k(x - c t)) on one wavelength, one period, dt proportional to dx^2.
/// Rungs run in parallel.
Ladder convergence_ladder(const Params& p, double c, const std::vector<int>& sizes);

/// CSV with columns t,x,u[,residual][,ct_integral]; rows ordered by frame then x.
void write_csv(std::ostream& os, const Simulation& sim, const std::optional<Expr>& exact = std::nullopt,
               const DensityDrift* drift = nullptr);

}  // namespace beamsym::numlab
