#pragma once

// Diffusion dynamics toward a log-concave target: exact Ornstein-Uhlenbeck
// evolution of Gaussians, an exponential-fitting finite-volume Fokker-Planck
// solver on the line, and an Euler-Maruyama particle simulation.

#include <cinttypes>
#include <cstdio>
#include <random>

#include "ineqlab/functionals.hpp"
#include "ineqlab/wasserstein.hpp"

namespace ineqlab {

struct TrajectoryRecord {
  double t = 0;
  double entropy = 0;        // H(state | target)
  double fisher = 0;         // I(state | target)
  double w2 = 0;             // W2(state, target)
  double second_moment = 0;  // int |x|^2 d(state)
  double entropy_dx = 0;     // NaN when the state representation has no density
};

struct Trajectory {
  std::shared_ptr<const Potential> potential;  // target potential
  Measure target;
  std::vector<double> times;
  std::vector<Measure> states;
  std::vector<TrajectoryRecord> records;
  std::string solver;
  std::uint64_t seed = 0;

  void write_csv(std::FILE* out) const {
    std::fprintf(out, "t,entropy,fisher,w2,second_moment,entropy_dx\n");
    for (const auto& r : records) {
      std::fprintf(out, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.entropy, r.fisher, r.w2,
                   r.second_moment, r.entropy_dx);
    }
  }
};

struct SolverConfig {
  double dt = 0.0;          // 0 = largest stable step (grid) / 1e-3 (particles)
  int particles = 1000;     // langevin only
  std::uint64_t seed = 1;   // langevin only
};

namespace detail {

inline TrajectoryRecord record_state(double t, const Measure& state, const Measure& target) {
  TrajectoryRecord r;
  r.t = t;
  // particle clouds admit only the Gaussian moment proxy for H and I
  const bool hi_defined = !state.cloud() || target.gaussian() != nullptr;
  r.entropy = hi_defined ? relative_entropy(state, target) : std::numeric_limits<double>::quiet_NaN();
  r.fisher = hi_defined ? fisher_information(state, target) : std::numeric_limits<double>::quiet_NaN();
  const W2Backend backend =
      state.cloud() && state.base_dim() == 1 ? W2Backend::quantile1d : W2Backend::automatic;
  r.w2 = wasserstein2(state, target, backend);
  r.second_moment = second_moment(state);
  r.entropy_dx = state.cloud() ? std::numeric_limits<double>::quiet_NaN() : entropy_dx(state);
  return r;
}

}  // namespace detail

// Ornstein-Uhlenbeck evolution of a Gaussian initial condition toward the
// standard Gaussian: mean m e^{-t}, covariance e^{-2t} S + (1 - e^{-2t}) I.
inline Measure ou_evolve_gaussian(const Measure& init, double t) {
  const auto* g = init.gaussian();
  require(g, "ou_evolve_gaussian: Gaussian initial condition required");
  require(t >= 0.0, "ou_evolve_gaussian: time must be nonnegative");
  const int n = g->dim();
  const double e = std::exp(-t);
  Measure out = build_gaussian(Vec(e * g->mean),
                               Mat(e * e * g->cov + (1.0 - e * e) * Mat::Identity(n, n)));
  out.factors = init.factors;
  return out;
}

inline Trajectory ou_evolve_trajectory(const Measure& init, const std::vector<double>& times) {
  require(init.gaussian(), "ou_evolve_trajectory: Gaussian initial condition required");
  Trajectory traj;
  traj.solver = "mehler";
  traj.target = build_standard_gaussian(init.base_dim());
  traj.target.factors = init.factors;
  traj.potential = traj.target.potential;
  for (const double t : times) {
    Measure state = ou_evolve_gaussian(init, t);
    traj.times.push_back(t);
    traj.records.push_back(detail::record_state(t, state, traj.target));
    traj.states.push_back(std::move(state));
  }
  return traj;
}

struct FundamentalEntropy {
  double value = 0;             // entropy of the heat-type kernel at time t vs the Gaussian target
  double log_bound = 0;         // -(n/2) log(1 - e^{-2t})
  double short_time_bound = 0;  // n / (2t)
};

// H(P_t delta_0 | gamma) for the Ornstein-Uhlenbeck semigroup in dimension n:
// the kernel at time t is N(0, (1 - e^{-2t}) I).
inline FundamentalEntropy fundamental_entropy(int n, double t) {
  require(n >= 1, "fundamental_entropy: dimension must be positive");
  require(t > 0.0, "fundamental_entropy: time must be positive");
  FundamentalEntropy out;
  const double q = std::exp(-2.0 * t);
  out.value = -0.5 * n * (q + std::log1p(-q));
  out.log_bound = -0.5 * n * std::log1p(-q);
  out.short_time_bound = 0.5 * n / t;
  return out;
}

namespace detail {

// Bernoulli function B(z) = z / (e^z - 1), the exponential-fitting flux weight.
inline double bernoulli_b(double z) {
  if (std::abs(z) < 1e-5) return 1.0 - 0.5 * z + z * z / 12.0;
  if (z > 700.0) return 0.0;
  if (z < -700.0) return -z;
  return z / std::expm1(z);
}

}  // namespace detail

// Largest explicit time step the finite-volume scheme accepts on this grid.
inline double fp_stable_dt(const Potential& V, const GridSpec& grid) {
  require(grid.dim == 1, "fp_solve: one-dimensional grids only");
  const double h = grid.step(0);
  double max_slope = 0.0;
  for (int i = 0; i < grid.count[0]; ++i) {
    Vec x(1);
    x[0] = grid.coord(0, i);
    max_slope = std::max(max_slope, V.grad(x).norm());
  }
  return 0.4 * h * h / (2.0 + h * max_slope);
}

// Explicit finite-volume solver for d(rho)/dt = div(grad rho + rho grad V) on a
// line segment with no-flux boundaries. Fluxes use exponential fitting, so the
// discrete stationary state is exactly the normalized e^{-V} node mass vector
// and total mass is conserved to round-off.
inline Trajectory fp_solve(const Potential& V, const Measure& init, const std::vector<double>& times,
                           const SolverConfig& cfg = {}) {
  const auto* g0 = init.grid();
  require(g0, "fp_solve: grid initial condition required");
  require(init.factors == 1, "fp_solve: base measures only");
  const GridSpec grid = g0->grid;
  require(grid.dim == 1, "fp_solve: one-dimensional grids only");
  require(!times.empty() && times.front() >= 0.0, "fp_solve: need a nonempty time grid from t >= 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    require(times[k] > times[k - 1], "fp_solve: times must increase");

  const int N = grid.count[0];
  const double h = grid.step(0);
  const double stable = fp_stable_dt(V, grid);
  if (cfg.dt > 0.0) {
    require(cfg.dt <= stable, "fp_solve: requested dt " + std::to_string(cfg.dt) +
                                  " exceeds the stability bound " + std::to_string(stable));
  }
  const double dt_base = cfg.dt > 0.0 ? cfg.dt : stable;

  // face coefficients: F_{i+1/2} = -(1/h) [B(-dV) u_{i+1} - B(dV) u_i]
  std::vector<double> bp(N - 1), bm(N - 1);
  for (int i = 0; i + 1 < N; ++i) {
    Vec xa(1), xb(1);
    xa[0] = grid.coord(0, i);
    xb[0] = grid.coord(0, i + 1);
    const double dv = V.value(xb) - V.value(xa);
    bp[i] = detail::bernoulli_b(dv);
    bm[i] = detail::bernoulli_b(-dv);
  }

  Trajectory traj;
  traj.solver = "grid_fv";
  traj.target = build_from_potential(V, grid);
  traj.potential = traj.target.potential;

  std::vector<double> u = g0->w;  // node masses
  std::vector<double> unew(N);
  double t_now = times.front();

  const auto push_state = [&](double t) {
    GridDensity gd;
    gd.grid = grid;
    gd.w = u;
    Measure m;
    m.rep = std::move(gd);
    traj.times.push_back(t);
    traj.records.push_back(detail::record_state(t, m, traj.target));
    traj.states.push_back(std::move(m));
  };
  push_state(t_now);

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - t_now;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_base)));
    const double dt = span / steps;
    const double lam = dt / (h * h);
    for (long s = 0; s < steps; ++s) {
      for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        if (i + 1 < N) acc += bm[i] * u[i + 1] - bp[i] * u[i];
        if (i > 0) acc -= bm[i - 1] * u[i] - bp[i - 1] * u[i - 1];
        unew[i] = u[i] + lam * acc;
      }
      u.swap(unew);
    }
    double mn = 0.0;
    for (const double v : u) mn = std::min(mn, v);
    require(mn >= -1e-14, "fp_solve: solver fault, negative mass " + std::to_string(mn));
    t_now = times[k];
    push_state(t_now);
  }
  return traj;
}

// Euler-Maruyama particle simulation of dX = -grad V(X) dt + sqrt(2) dB.
// Fully deterministic for a fixed seed: one generator, particles advanced in
// index order inside each substep.
inline Trajectory langevin_simulate(const Potential& V, const Measure& init,
                                    const std::vector<double>& times, const SolverConfig& cfg = {}) {
  require(init.factors == 1, "langevin_simulate: base measures only");
  require(!times.empty() && times.front() >= 0.0,
          "langevin_simulate: need a nonempty time grid from t >= 0");
  for (std::size_t k = 1; k < times.size(); ++k)
    require(times[k] > times[k - 1], "langevin_simulate: times must increase");
  const int n = init.base_dim();
  require(V.dim == n, "langevin_simulate: dimension mismatch");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  Mat pts;
  if (const auto* c = init.cloud()) {
    pts = c->points;
  } else if (const auto* g = init.gaussian()) {
    require(cfg.particles > 0, "langevin_simulate: need a positive particle count");
    const Mat L = g->cov.llt().matrixL();
    pts.resize(cfg.particles, n);
    for (int p = 0; p < cfg.particles; ++p) {
      Vec z(n);
      for (int j = 0; j < n; ++j) z[j] = normal(rng);
      pts.row(p) = (g->mean + L * z).transpose();
    }
  } else {
    fail("langevin_simulate: Gaussian or particle initial conditions only");
  }
  const auto P = static_cast<int>(pts.rows());

  Trajectory traj;
  traj.solver = "langevin_em";
  traj.seed = cfg.seed;
  if (V.quadratic) {
    const Mat cov = V.quadratic->Q.llt().solve(Mat::Identity(n, n));
    traj.target = build_gaussian(V.quadratic->center, cov);
  } else {
    traj.target = build_from_potential(
        V, GridSpec::line(-12.0, 12.0, 4097));
  }
  traj.potential = traj.target.potential;

  const double dt_base = cfg.dt > 0.0 ? cfg.dt : 1e-3;
  double t_now = times.front();

  const auto push_state = [&](double t) {
    ParticleCloud pc;
    pc.points = pts;
    pc.w.assign(P, 1.0 / P);
    Measure m;
    m.rep = std::move(pc);
    traj.times.push_back(t);
    traj.records.push_back(detail::record_state(t, m, traj.target));
    traj.states.push_back(std::move(m));
  };
  push_state(t_now);

  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - t_now;
    const long steps = std::max(1L, static_cast<long>(std::ceil(span / dt_base)));
    const double dt = span / steps;
    const double noise = std::sqrt(2.0 * dt);
    for (long s = 0; s < steps; ++s) {
      for (int p = 0; p < P; ++p) {
        Vec x = pts.row(p).transpose();
        Vec drift = V.grad(x);
        for (int j = 0; j < n; ++j) x[j] += -drift[j] * dt + noise * normal(rng);
        require(x.norm() < 1e8, "langevin_simulate: solver fault, particle escaped");
        pts.row(p) = x.transpose();
      }
    }
    t_now = times[k];
    push_state(t_now);
  }
  return traj;
}

}  // namespace ineqlab
