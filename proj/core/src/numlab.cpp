#include "beamsym/numlab.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <future>
#include <numbers>
#include <ostream>

namespace beamsym::numlab {

using models::ModelKind;

namespace {

using Vec = std::vector<double>;

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Symbols of the periodic second difference for mode j: d2 <= 0, d4 = d2^2.
double second_difference_symbol(int j, int n, double dx) {
  const double s = std::sin(std::numbers::pi * j / n);
  return -4.0 * s * s / (dx * dx);
}

// Does the quadratic a*y^2 + b*y + c have both roots real and inside [-2, 2]?
bool roots_in_band(double a, double b, double c) {
  if (a == 0) {
    if (b == 0) return c == 0;
    const double y = -c / b;
    return y >= -2 && y <= 2;
  }
  const double disc = b * b - 4 * a * c;
  const double tol = 1e-12 * (b * b + std::abs(4 * a * c));
  if (disc < -tol) return false;
  const double r = std::sqrt(std::max(disc, 0.0));
  const double y1 = (-b - r) / (2 * a), y2 = (-b + r) / (2 * a);
  const double eps = 1e-12;
  return std::min(y1, y2) >= -2 - eps && std::max(y1, y2) <= 2 + eps;
}

// Mode j of the scheme with z^n dependence is stable iff y = z + 1/z solves the
// characteristic quadratic with real roots in [-2, 2].
bool mode_stable(ModelKind kind, const Params& p, double d2, double dt) {
  const double ab = p.alpha * p.beta, d4 = d2 * d2;
  switch (kind) {
    case ModelKind::EulerBernoulli:
      return roots_in_band(0, 1, ab * d4 * dt * dt - 2);
    case ModelKind::Rayleigh: {
      const double m = 1 - p.beta * d2;
      if (m <= 0) return false;
      return roots_in_band(0, 1, ab * d4 / m * dt * dt - 2);
    }
    case ModelKind::Timoshenko: {
      // (A + l/4) y^2 - 4A y + 4A - l + K = 0
      const double A = p.epsilon * p.beta / (p.alpha * dt * dt);
      const double l = 1 - p.beta * (1 + p.epsilon) * d2;
      const double K = ab * d4 * dt * dt;
      if (l <= 0 || A < 0) return false;
      return roots_in_band(A + l / 4, -4 * A, 4 * A - l + K);
    }
  }
  return false;
}

// Periodic five-point fourth difference.
Vec fourth_difference(const Vec& u, double dx) {
  const int n = static_cast<int>(u.size());
  Vec out(u.size());
  const double h = 1.0 / (dx * dx * dx * dx);
  for (int i = 0; i < n; ++i)
    out[i] = (u[(i + n - 2) % n] - 4 * u[(i + n - 1) % n] + 6 * u[i] - 4 * u[(i + 1) % n] + u[(i + 2) % n]) * h;
  return out;
}

// Solves the cyclic tridiagonal system off*x_{i-1} + diag*x_i + off*x_{i+1} = rhs_i
// by the Thomas algorithm with a Sherman-Morrison correction.
Vec cyclic_solve(double diag, double off, const Vec& rhs) {
  const int n = static_cast<int>(rhs.size());
  if (!(std::abs(diag) > 2 * std::abs(off))) throw SingularOperatorError("cyclic operator is not diagonally dominant");
  const double gamma = -diag;
  Vec b(n, diag), c(n, off), x(rhs), z(n, 0.0);
  b[0] = diag - gamma;
  b[n - 1] = diag - off * off / gamma;
  z[0] = gamma;
  z[n - 1] = off;
  // forward sweep on both right-hand sides
  Vec cp(n);
  cp[0] = c[0] / b[0];
  x[0] /= b[0];
  z[0] /= b[0];
  for (int i = 1; i < n; ++i) {
    const double m = b[i] - off * cp[i - 1];
    if (m == 0) throw SingularOperatorError("zero pivot in cyclic solve");
    cp[i] = c[i] / m;
    x[i] = (x[i] - off * x[i - 1]) / m;
    z[i] = (z[i] - off * z[i - 1]) / m;
  }
  for (int i = n - 2; i >= 0; --i) {
    x[i] -= cp[i] * x[i + 1];
    z[i] -= cp[i] * z[i + 1];
  }
  const double vx = x[0] + off / gamma * x[n - 1];
  const double vz = z[0] + off / gamma * z[n - 1];
  if (std::abs(1 + vz) < 1e-300) throw SingularOperatorError("singular Sherman-Morrison correction");
  const double f = vx / (1 + vz);
  for (int i = 0; i < n; ++i) x[i] -= f * z[i];
  return x;
}

double l2_norm(const Vec& u, double dx) {
  double s = 0;
  for (double v : u) s += v * v;
  return std::sqrt(s * dx);
}

Vec sample(const Expr& e, const Vec& xs, double t, Assignment values) {
  values["t"] = t;
  Vec out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    values["x"] = xs[j];
    out[j] = eval_numeric(e, values);
  }
  return out;
}

// Scheme state and operators for one model.
class Stepper {
 public:
  Stepper(ModelKind kind, const GridSpec& g) : kind_(kind), dx_(g.dx()), dt_(g.dt) {
    const double ab = g.params.alpha * g.params.beta;
    ab_ = ab;
    if (kind == ModelKind::Rayleigh) {
      mass_diag_ = 1 + 2 * g.params.beta / (dx_ * dx_);
      mass_off_ = -g.params.beta / (dx_ * dx_);
    }
    if (kind == ModelKind::Timoshenko) {
      const double b = g.params.beta * (1 + g.params.epsilon);
      A_ = g.params.epsilon * g.params.beta / (g.params.alpha * dt_ * dt_);
      l_diag_ = 1 + 2 * b / (dx_ * dx_);
      l_off_ = -b / (dx_ * dx_);
    }
  }

  // u_tt from u for the second-order-in-time models.
  Vec acceleration(const Vec& u) const {
    Vec a = fourth_difference(u, dx_);
    for (double& v : a) v *= -ab_;
    if (kind_ == ModelKind::Rayleigh) a = cyclic_solve(mass_diag_, mass_off_, a);
    return a;
  }

  // Advances (prev, cur) -> next; for Timoshenko also (w_prev, w) -> w_next.
  Vec step_u(const Vec& prev, const Vec& cur, const Vec& w) const {
    const std::size_t n = cur.size();
    Vec next(n);
    const Vec acc = kind_ == ModelKind::Timoshenko ? w : acceleration(cur);
    for (std::size_t i = 0; i < n; ++i) next[i] = 2 * cur[i] - prev[i] + dt_ * dt_ * acc[i];
    return next;
  }

  Vec step_w(const Vec& u, const Vec& w_prev, const Vec& w) const {
    const std::size_t n = u.size();
    const Vec d4 = fourth_difference(u, dx_);
    Vec s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 2 * w[i] + w_prev[i];
    const Vec ls = apply_l(s);
    Vec rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -ab_ * d4[i] + A_ * (2 * w[i] - w_prev[i]) - ls[i] / 4;
    return cyclic_solve(A_ + l_diag_ / 4, l_off_ / 4, rhs);
  }

 private:
  Vec apply_l(const Vec& v) const {
    const int n = static_cast<int>(v.size());
    Vec out(v.size());
    for (int i = 0; i < n; ++i) out[i] = l_diag_ * v[i] + l_off_ * (v[(i + n - 1) % n] + v[(i + 1) % n]);
    return out;
  }

  ModelKind kind_;
  double dx_, dt_;
  double ab_ = 0;
  double mass_diag_ = 1, mass_off_ = 0;
  double A_ = 0, l_diag_ = 1, l_off_ = 0;
};

}  // namespace

bool modes_stable(ModelKind kind, const GridSpec& grid, double dt) {
  if (!(dt > 0)) return false;
  const double dx = grid.dx();
  for (int j = 1; j <= grid.Nx / 2; ++j)
    if (!mode_stable(kind, grid.params, second_difference_symbol(j, grid.Nx, dx), dt)) return false;
  return true;
}

double admissible_time_step(ModelKind kind, const GridSpec& grid) {
  const Params& p = grid.params;
  const double dx = grid.dx();
  const double d2 = -4.0 / (dx * dx);
  double sigma = p.alpha * p.beta * d2 * d2;
  if (kind == ModelKind::Rayleigh) sigma /= 1 - p.beta * d2;
  if (kind == ModelKind::Timoshenko) sigma /= 1 - p.beta * (1 + p.epsilon) * d2;
  if (!(sigma > 0) || !std::isfinite(sigma)) throw NumlabError("no admissible time step: alpha*beta must be positive");
  double dt = 1 / std::sqrt(sigma);
  for (int k = 0; k < 60; ++k, dt /= 2)
    if (modes_stable(kind, grid, 2 * dt)) return dt;
  throw InstabilityError("no admissible time step found");
}

Assignment parameter_values(const GridSpec& grid) {
  Assignment a = grid.constants;
  a["alpha"] = grid.params.alpha;
  a["beta"] = grid.params.beta;
  a["epsilon"] = grid.params.epsilon;
  a.emplace("A0", 1.3);
  a.emplace("A1", 0.7);
  a.emplace("A2", -0.4);
  return a;
}

Simulation simulate(ModelKind kind, const GridSpec& grid, const Expr& initial) {
  if (grid.Nx < 16 || !power_of_two(grid.Nx)) throw NumlabError("Nx must be a power of two >= 16");
  if (!(grid.T > 0) || !(grid.Lx > 0)) throw NumlabError("T and Lx must be positive");
  if (grid.frames < 2) throw NumlabError("at least two frames are recorded");

  Simulation sim;
  sim.kind = kind;
  sim.grid = grid;
  double dt = grid.dt > 0 ? grid.dt : admissible_time_step(kind, grid);
  sim.steps = std::max(1, static_cast<int>(std::ceil(grid.T / dt - 1e-9)));
  dt = grid.T / sim.steps;
  sim.grid.dt = dt;
  if (grid.check_stability && !modes_stable(kind, sim.grid, 2 * dt))
    throw InstabilityError("time step " + std::to_string(dt) + " violates the stability bound");

  const int n = grid.Nx;
  const double dx = grid.dx();
  sim.x.resize(n);
  for (int j = 0; j < n; ++j) sim.x[j] = j * dx;

  const Assignment values = parameter_values(grid);
  const Expr t_sym = Expr::independent("t");
  std::vector<Expr> dts{initial};
  for (int m = 1; m <= 2; ++m) dts.push_back(partial(dts.back(), t_sym));

  const Stepper stepper(kind, sim.grid);
  Vec prev = sample(initial, sim.x, 0, values);
  Vec cur;
  Vec w_prev, w;
  if (kind != ModelKind::Timoshenko) {
    // Taylor start with the discrete operator: u(dt) = sum dt^m/m! a^(m/2) applied to u0 or u_t.
    Vec even = prev, odd = sample(dts[1], sim.x, 0, values);
    cur.assign(n, 0.0);
    double f = 1;
    for (int m = 0; m <= 7; ++m) {
      const Vec& src = m % 2 == 0 ? even : odd;
      for (int j = 0; j < n; ++j) cur[j] += f * src[j];
      if (m % 2 == 1) {
        even = stepper.acceleration(even);
        odd = stepper.acceleration(odd);
      }
      f *= dt / (m + 1);
    }
  } else {
    cur = sample(initial, sim.x, dt, values);
    w_prev = sample(dts[2], sim.x, 0, values);
    w = sample(dts[2], sim.x, dt, values);
  }

  // The scheme is time-symmetric: one backward step gives level -1, so every frame,
  // including t = 0, uses the same central-difference estimates.
  {
    Vec back = stepper.step_u(cur, prev, w_prev);
    if (kind == ModelKind::Timoshenko) {
      Vec w_back = stepper.step_w(prev, w, w_prev);
      w = std::move(w_prev);
      w_prev = std::move(w_back);
    }
    cur = std::move(prev);
    prev = std::move(back);
  }

  std::vector<int> record;
  for (int i = 0; i < grid.frames; ++i)
    record.push_back(static_cast<int>(std::llround(static_cast<double>(i) * sim.steps / (grid.frames - 1))));
  record.erase(std::unique(record.begin(), record.end()), record.end());
  auto next_record = record.begin();

  const double norm0 = std::max(l2_norm(prev, dx), l2_norm(cur, dx));
  for (int level = 0; level <= sim.steps; ++level) {
    Vec next = stepper.step_u(prev, cur, w);
    Vec w_next;
    if (kind == ModelKind::Timoshenko) w_next = stepper.step_w(cur, w_prev, w);

    if (next_record != record.end() && *next_record == level) {
      FieldState f;
      f.t = level * dt;
      f.u = cur;
      f.ut.resize(n);
      for (int j = 0; j < n; ++j) f.ut[j] = (next[j] - prev[j]) / (2 * dt);
      if (kind == ModelKind::Timoshenko) {
        f.utt = w;
        f.uttt.resize(n);
        for (int j = 0; j < n; ++j) f.uttt[j] = (w_next[j] - w_prev[j]) / (2 * dt);
      } else {
        f.utt = stepper.acceleration(cur);
        f.uttt = stepper.acceleration(f.ut);
      }
      sim.frames.push_back(std::move(f));
      ++next_record;
    }

    const double norm = l2_norm(next, dx);
    if (!std::isfinite(norm))
      throw InstabilityError("non-finite field at step " + std::to_string(level + 1));
    if (norm0 > 0 && norm > 1e6 * norm0)
      throw InstabilityError("norm growth beyond 1e6 at step " + std::to_string(level + 1));
    prev = std::move(cur);
    cur = std::move(next);
    if (kind == ModelKind::Timoshenko) {
      w_prev = std::move(w);
      w = std::move(w_next);
    }
  }
  return sim;
}

double residual_on_grid(ModelKind kind, const Expr& solution, const GridSpec& grid, int time_samples) {
  const auto model = models::make_model(kind);
  const Expr r = jet::insert_solution(model.equation, "u", solution);
  Assignment values = parameter_values(grid);
  double worst = 0;
  for (int i = 0; i < time_samples; ++i) {
    values["t"] = time_samples > 1 ? grid.T * i / (time_samples - 1) : 0.0;
    for (int j = 0; j < grid.Nx; ++j) {
      values["x"] = j * grid.dx();
      worst = std::max(worst, std::abs(eval_numeric(r, values)));
    }
  }
  return worst;
}

double max_error(const Simulation& sim, const Expr& exact) {
  const Assignment values = parameter_values(sim.grid);
  double worst = 0;
  for (const auto& f : sim.frames) {
    const Vec e = sample(exact, sim.x, f.t, values);
    for (std::size_t j = 0; j < e.size(); ++j) worst = std::max(worst, std::abs(f.u[j] - e[j]));
  }
  return worst;
}

std::vector<double> spectral_derivative(const std::vector<double>& f, double Lx, int order) {
  if (order == 0) return f;
  const int n = static_cast<int>(f.size());
  using C = std::complex<double>;
  std::vector<C> F(n);
  for (int k = 0; k < n; ++k) {
    C s = 0;
    for (int j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -2 * std::numbers::pi * k * j / n);
    F[k] = s;
  }
  for (int k = 0; k < n; ++k) {
    const int kk = k <= n / 2 ? k : k - n;
    if (2 * k == n && order % 2 == 1) {
      F[k] = 0;
      continue;
    }
    const C ik(0, 2 * std::numbers::pi * kk / Lx);
    F[k] *= std::pow(ik, order);
  }
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    C s = 0;
    for (int k = 0; k < n; ++k) s += F[k] * std::polar(1.0, 2 * std::numbers::pi * k * j / n);
    out[j] = s.real() / n;
  }
  return out;
}

double periodic_integral(const std::vector<double>& f, double dx) {
  double s = 0;
  for (double v : f) s += v;
  return s * dx;
}

DensityDrift density_drift(const Simulation& sim, const claws::ConservedVector& cv) {
  DensityDrift out;
  const Expr x = Expr::independent("x");
  if (!cv.generator.family.empty()) {
    out.applicable = false;
    out.reason = "components involve the family function " + cv.generator.family;
    return out;
  }
  if (contains(cv.ct, x) || contains(cv.cx, x)) {
    out.applicable = false;
    out.reason = "components depend explicitly on x; the flux is not periodic";
    return out;
  }
  // Required jets of u: (time order, space order).
  std::vector<std::pair<Expr, std::pair<int, int>>> jets;
  for (const auto& a : free_atoms(cv.ct)) {
    if (!a.is_jet()) continue;
    if (a.name() != "u") {
      out.applicable = false;
      out.reason = "density involves " + a.name();
      return out;
    }
    const int nt = static_cast<int>(std::count(a.index().begin(), a.index().end(), 't'));
    const int nx = static_cast<int>(a.index().size()) - nt;
    if (nt > 3) {
      out.applicable = false;
      out.reason = "density needs more than three time derivatives";
      return out;
    }
    jets.push_back({a, {nt, nx}});
  }

  Assignment values = parameter_values(sim.grid);
  const double dx = sim.grid.dx();
  double scale = 0;
  for (const auto& f : sim.frames) {
    const Vec* level[4] = {&f.u, &f.ut, &f.utt, &f.uttt};
    std::vector<std::pair<std::string, Vec>> data;
    for (const auto& [a, ord] : jets)
      data.emplace_back(atom_key(a), spectral_derivative(*level[ord.first], sim.grid.Lx, ord.second));
    values["t"] = f.t;
    Vec density(sim.x.size());
    for (std::size_t j = 0; j < sim.x.size(); ++j) {
      for (const auto& [key, v] : data) values[key] = v[j];
      density[j] = eval_numeric(cv.ct, values);
    }
    out.integrals.push_back(periodic_integral(density, dx));
    if (out.integrals.size() == 1) {
      Vec absd(density.size());
      std::transform(density.begin(), density.end(), absd.begin(), [](double v) { return std::abs(v); });
      scale = std::max(std::abs(out.integrals[0]), periodic_integral(absd, dx));
    }
  }
  if (scale > 0)
    for (double I : out.integrals) out.relative_drift = std::max(out.relative_drift, std::abs(I - out.integrals[0]) / scale);
  return out;
}

double crest_speed(const Simulation& sim) {
  const double L = sim.grid.Lx, dx = sim.grid.dx();
  const int n = sim.grid.Nx;
  std::vector<double> ts, xs;
  double unwrapped = 0;
  for (std::size_t i = 0; i < sim.frames.size(); ++i) {
    const Vec& u = sim.frames[i].u;
    const int j = static_cast<int>(std::max_element(u.begin(), u.end()) - u.begin());
    const double fm = u[(j + n - 1) % n], f0 = u[j], fp = u[(j + 1) % n];
    const double denom = fm - 2 * f0 + fp;
    const double delta = denom != 0 ? (fm - fp) / (2 * denom) : 0.0;
    const double pos = (j + delta) * dx;
    unwrapped = i == 0 ? pos : unwrapped + std::remainder(pos - unwrapped, L);
    ts.push_back(sim.frames[i].t);
    xs.push_back(unwrapped);
  }
  const double m = static_cast<double>(ts.size());
  double st = 0, sx = 0, stt = 0, stx = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    st += ts[i];
    sx += xs[i];
    stt += ts[i] * ts[i];
    stx += ts[i] * xs[i];
  }
  return (m * stx - st * sx) / (m * stt - st * st);
}

Ladder convergence_ladder(const Params& p, double c, const std::vector<int>& sizes) {
  const double k = c / std::sqrt(p.alpha * p.beta);
  const Expr u = sin(Expr::parameter("k") * (Expr::independent("x") - Expr::parameter("c") * Expr::independent("t")));
  std::vector<std::future<LadderRung>> jobs;
  for (int nx : sizes) {
    jobs.push_back(std::async(std::launch::async, [=] {
      GridSpec g;
      g.Lx = 2 * std::numbers::pi / k;
      g.Nx = nx;
      g.T = g.Lx / c;
      g.params = p;
      g.frames = 16;
      g.constants = {{"k", k}, {"c", c}};
      const Simulation sim = simulate(ModelKind::EulerBernoulli, g, u);
      return LadderRung{nx, sim.grid.dt, max_error(sim, u)};
    }));
  }
  Ladder out;
  for (auto& j : jobs) out.rungs.push_back(j.get());
  for (std::size_t i = 0; i + 1 < out.rungs.size(); ++i)
    out.orders.push_back(std::log2(out.rungs[i].error / out.rungs[i + 1].error));
  return out;
}

void write_csv(std::ostream& os, const Simulation& sim, const std::optional<Expr>& exact, const DensityDrift* drift) {
  const bool with_drift = drift && drift->applicable && drift->integrals.size() == sim.frames.size();
  os << "t,x,u";
  if (exact) os << ",residual";
  if (with_drift) os << ",ct_integral";
  os << '\n';
  const Assignment values = parameter_values(sim.grid);
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < sim.frames.size(); ++i) {
    const auto& f = sim.frames[i];
    Vec e;
    if (exact) e = sample(*exact, sim.x, f.t, values);
    for (std::size_t j = 0; j < sim.x.size(); ++j) {
      os << num(f.t) << ',' << num(sim.x[j]) << ',' << num(f.u[j]);
      if (exact) os << ',' << num(f.u[j] - e[j]);
      if (with_drift) os << ',' << num(drift->integrals[i]);
      os << '\n';
    }
  }
}

}  // namespace beamsym::numlab
