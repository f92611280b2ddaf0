// Diffusion dynamics toward a log-concave target: the analytic
// Ornstein-Uhlenbeck flow, the finite-volume Fokker-Planck solver, the
// particle simulator, and the contraction / smoothing / convergence audits.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>

#include "ineqlab/audits.hpp"
#include "ineqlab/dynamics.hpp"

using namespace ineqlab;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Measure gaussian1d(double mean, double var) {
  Vec m(1);
  m[0] = mean;
  Mat c(1, 1);
  c(0, 0) = var;
  return build_gaussian(m, c);
}

Measure gaussian1d_grid(double mean, double var, const GridSpec& g) {
  Vec m(1);
  m[0] = mean;
  Mat c(1, 1);
  c(0, 0) = var;
  return build_from_potential(make_gaussian_potential(m, c), g);
}

std::vector<double> uniform_times(double t_end, int nodes) {
  std::vector<double> t(nodes);
  for (int k = 0; k < nodes; ++k) t[k] = t_end * k / (nodes - 1);
  return t;
}

}  // namespace

TEST_CASE("Ornstein-Uhlenbeck evolution of Gaussian states") {
  const Measure init = gaussian1d(0.8, 3.0);
  const Measure at = ou_evolve_gaussian(init, 0.7);
  const double e = std::exp(-0.7);
  REQUIRE(at.gaussian() != nullptr);
  REQUIRE(at.gaussian()->mean[0] == Approx(0.8 * e).margin(1e-14));
  REQUIRE(at.gaussian()->cov(0, 0) == Approx(e * e * 3.0 + (1.0 - e * e)).margin(1e-14));

  // t = 0 is the identity, negative times are rejected
  REQUIRE(ou_evolve_gaussian(init, 0.0).gaussian()->cov(0, 0) == Approx(3.0).margin(1e-14));
  REQUIRE_THROWS(ou_evolve_gaussian(init, -0.1));
  REQUIRE_THROWS(ou_evolve_gaussian(gaussian1d_grid(0.0, 1.0, GridSpec::line(-7.0, 7.0, 257)), 0.5));

  // tensor factor count survives the evolution
  Measure tens = init;
  tens.factors = 4;
  REQUIRE(ou_evolve_gaussian(tens, 1.0).factors == 4);
}

TEST_CASE("trajectory records reproduce the translated-Gaussian closed forms") {
  // from N(1/2, 1): H = e^{-2t}/8, I = e^{-2t}/4, W2 = e^{-t}/2,
  // m2 = 1 + e^{-2t}/4, and the coordinate entropy stays Gaussian
  const auto traj = ou_evolve_trajectory(gaussian1d(0.5, 1.0), {0.0, 0.3, 1.0, 2.5});
  REQUIRE(traj.solver == "mehler");
  REQUIRE(traj.times.size() == 4);
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double q = std::exp(-2.0 * traj.times[k]);
    const auto& r = traj.records[k];
    REQUIRE(r.entropy == Approx(0.125 * q).margin(1e-12));
    REQUIRE(r.fisher == Approx(0.25 * q).margin(1e-12));
    REQUIRE(r.w2 == Approx(0.5 * std::sqrt(q)).margin(1e-12));
    REQUIRE(r.second_moment == Approx(1.0 + 0.25 * q).margin(1e-12));
    REQUIRE(r.entropy_dx == Approx(-0.5 * std::log(2.0 * M_PI * M_E)).margin(1e-12));
  }
}

TEST_CASE("entropy of the spreading kernel and its two upper bounds") {
  const auto fe = fundamental_entropy(1, 0.5);
  REQUIRE(fe.value == Approx(0.04539785210781976).margin(1e-15));
  // closed forms of the bounds
  REQUIRE(fe.log_bound == Approx(-0.5 * std::log1p(-std::exp(-1.0))).margin(1e-15));
  REQUIRE(fe.short_time_bound == Approx(1.0).margin(1e-15));

  for (const double t : {0.05, 0.2, 1.0, 3.0}) {
    for (const int n : {1, 2, 5}) {
      const auto f = fundamental_entropy(n, t);
      REQUIRE(f.value > 0.0);
      REQUIRE(f.value < f.log_bound);
      REQUIRE(f.value <= f.short_time_bound);
    }
  }
  // entropy decreases in time, grows linearly in dimension
  REQUIRE(fundamental_entropy(1, 0.2).value > fundamental_entropy(1, 0.4).value);
  REQUIRE(fundamental_entropy(3, 0.5).value == Approx(3.0 * fe.value).margin(1e-13));
  REQUIRE_THROWS(fundamental_entropy(1, 0.0));
  REQUIRE_THROWS(fundamental_entropy(0, 0.5));
}

TEST_CASE("finite-volume solver: stability bound, stationarity, conservation") {
  const Potential V = make_gaussian_potential(1);
  const GridSpec g = GridSpec::line(-8.0, 8.0, 1025);

  // dt bound: 0.4 h^2 / (2 + h max|V'|) with h = 1/64 and max slope 8
  REQUIRE(fp_stable_dt(V, g) == Approx(4.59558823529e-5).epsilon(1e-9));
  SolverConfig cfg;
  cfg.dt = 2.0 * fp_stable_dt(V, g);
  REQUIRE_THROWS_WITH(fp_solve(V, gaussian1d_grid(0.0, 1.0, g), {0.0, 0.1}, cfg),
                      ContainsSubstring("exceeds the stability bound"));

  // the discrete stationary state does not move and mass is conserved
  const Measure stat = build_from_potential(V, g);
  const auto traj = fp_solve(V, stat, {0.0, 0.5, 1.0});
  REQUIRE(traj.solver == "grid_fv");
  REQUIRE(traj.records.back().entropy == Approx(0.0).margin(1e-12));
  for (const auto& state : traj.states) {
    double mass = 0.0;
    for (const double w : state.grid()->w) mass += w;
    REQUIRE(mass == Approx(1.0).margin(1e-13));
  }

  // a particle-cloud initial state is rejected
  REQUIRE_THROWS(fp_solve(V, gaussian1d(0.0, 1.0), {0.0, 0.1}));
}

TEST_CASE("finite-volume solver tracks the analytic relaxation") {
  const Potential V = make_gaussian_potential(1);
  const GridSpec g = GridSpec::line(-8.0, 8.0, 1025);
  const auto traj = fp_solve(V, gaussian1d_grid(0.5, 1.0, g), {0.0, 0.5, 1.0});

  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double q = std::exp(-2.0 * traj.times[k]);
    REQUIRE(std::abs(traj.records[k].entropy - 0.125 * q) / (0.125 * q) <= 1e-4);
    REQUIRE(std::abs(traj.records[k].second_moment - (1.0 + 0.25 * q)) <= 1e-5);
  }
  // entropy decays along the flow
  for (std::size_t k = 1; k < traj.times.size(); ++k)
    REQUIRE(traj.records[k].entropy < traj.records[k - 1].entropy);
}

TEST_CASE("particle simulation is deterministic and relaxes to equilibrium") {
  const Potential V = make_gaussian_potential(1);
  SolverConfig cfg;
  cfg.particles = 10000;
  cfg.seed = 7;

  const auto a = langevin_simulate(V, gaussian1d(1.0, 1.0), {0.0, 1.0, 2.0}, cfg);
  REQUIRE(a.solver == "langevin_em");
  REQUIRE(a.seed == 7);
  // the quadratic potential yields an analytic Gaussian target
  REQUIRE(a.target.gaussian() != nullptr);
  // sampled second moment starts near E|x|^2 = 2 and relaxes toward 1
  REQUIRE(a.records.front().second_moment == Approx(2.0).margin(0.1));
  REQUIRE(a.records.back().second_moment == Approx(1.0).margin(0.1));
  REQUIRE(a.records.back().w2 < 0.2);
  // clouds carry no coordinate density
  REQUIRE(std::isnan(a.records.back().entropy_dx));

  // identical seeds reproduce the run bit for bit; a new seed does not
  const auto b = langevin_simulate(V, gaussian1d(1.0, 1.0), {0.0, 1.0, 2.0}, cfg);
  REQUIRE(a.records.back().second_moment == b.records.back().second_moment);
  REQUIRE(a.records.back().w2 == b.records.back().w2);
  SolverConfig other = cfg;
  other.seed = 9;
  const auto c = langevin_simulate(V, gaussian1d(1.0, 1.0), {0.0, 1.0, 2.0}, other);
  REQUIRE(c.records.back().second_moment != a.records.back().second_moment);

  // an explicit particle cloud is propagated as given
  ParticleCloud pc;
  pc.points = Mat(5, 1);
  pc.points << -2.0, -1.0, 0.0, 1.0, 2.0;
  pc.w.assign(5, 0.2);
  Measure cloud;
  cloud.rep = pc;
  const auto d = langevin_simulate(V, cloud, {0.0, 0.5}, cfg);
  REQUIRE(d.states.back().cloud() != nullptr);
  REQUIRE(d.states.back().cloud()->points.rows() == 5);

  REQUIRE_THROWS(langevin_simulate(make_gaussian_potential(2), gaussian1d(0.0, 1.0), {0.0, 1.0}));
}

TEST_CASE("trajectory CSV export") {
  const auto traj = ou_evolve_trajectory(gaussian1d(0.5, 1.0), {0.0, 0.5, 1.0});
  std::FILE* f = std::tmpfile();
  REQUIRE(f != nullptr);
  traj.write_csv(f);
  std::rewind(f);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  REQUIRE(std::string(line) == "t,entropy,fisher,w2,second_moment,entropy_dx\n");
  int rows = 0;
  while (std::fgets(line, sizeof line, f) != nullptr) ++rows;
  REQUIRE(rows == 3);
  std::fclose(f);
}

TEST_CASE("contraction audit is saturated by the pure dilation pair") {
  // between flows started at N(0,4) and at the target, the dimensional bound
  // holds with equality for all times
  const auto times = uniform_times(4.0, 801);
  const auto u = ou_evolve_trajectory(gaussian1d(0.0, 4.0), times);
  const auto v = ou_evolve_trajectory(gaussian1d(0.0, 1.0), times);

  const auto audit = audit_contraction(u, v, 1.0);
  REQUIRE(audit.evaluation.intermediates.at("w2_squared_initial") == Approx(1.0).margin(1e-12));
  REQUIRE(audit.worst_dimensional >= -1e-6);
  REQUIRE(audit.worst_dimensional == Approx(0.0).margin(1e-7));
  REQUIRE(audit.worst_classical >= 0.0);
  REQUIRE(audit.evaluation.intermediates.at("slack_vs_classical") >= 0.0);
  REQUIRE(audit.evaluation.verdict);
  REQUIRE(audit.rows.size() == times.size());
  // the audited gap shrinks monotonically along the contraction
  REQUIRE(audit.rows.back().w2_squared < 1e-3);

  // refusals: coarse time grids and mismatched time grids
  const auto coarse_u = ou_evolve_trajectory(gaussian1d(0.0, 4.0), {0.0, 0.5, 1.0});
  const auto coarse_v = ou_evolve_trajectory(gaussian1d(0.0, 1.0), {0.0, 0.5, 1.0});
  REQUIRE_THROWS_WITH(audit_contraction(coarse_u, coarse_v, 1.0),
                      ContainsSubstring("too coarse"));
  const auto off_v = ou_evolve_trajectory(gaussian1d(0.0, 1.0), {0.0, 0.5, 1.1});
  REQUIRE_THROWS(audit_contraction(coarse_u, off_v, 1.0));
}

TEST_CASE("entropy smoothing audit along the spreading flow") {
  // starting from a nearly degenerate Gaussian, the entropy stays below the
  // Gaussian smoothing bound and the short-time constant is fitted
  std::vector<double> times{0.0};
  for (int k = 1; k <= 200; ++k) times.push_back(0.01 * k);
  const auto traj = ou_evolve_trajectory(gaussian1d(0.0, 1e-4), times);

  const auto audit = audit_entropy_smoothing(traj, 1.0);
  REQUIRE(audit.gaussian_bound_applicable);
  REQUIRE(audit.worst_gaussian_slack >= 0.0);
  REQUIRE(audit.fitted_constant == Approx(0.194688).margin(1e-4));
  REQUIRE(audit.fitted_constant > 0.0);
  REQUIRE(audit.fitted_constant < 1.0);
  // int |grad V|^2 du_t = m2(t) <= 1 along this flow
  REQUIRE(audit.max_grad_v_energy <= 1.0);
  REQUIRE(audit.evaluation.intermediates.at("slack_grad_energy") >= 0.0);
  REQUIRE(audit.evaluation.verdict);

  // an initial second moment above n withdraws the Gaussian bound
  const auto na = audit_entropy_smoothing(ou_evolve_trajectory(gaussian1d(0.5, 1.0), {0.0, 0.5, 1.0}));
  REQUIRE_FALSE(na.gaussian_bound_applicable);
  REQUIRE(std::count(na.evaluation.flags.begin(), na.evaluation.flags.end(),
                     "gaussian_bound_not_applicable") == 1);
  REQUIRE(na.fitted_constant == 0.0);
  REQUIRE(na.evaluation.verdict);
}

TEST_CASE("improved convergence rate audit") {
  // N(0, 1/4) start: x0 = 1/8 and the improved bound is saturated at t = 0
  std::vector<double> times;
  for (int k = 0; k <= 80; ++k) times.push_back(0.05 * k);
  const auto traj = ou_evolve_trajectory(gaussian1d(0.0, 0.25), times);

  const auto audit = audit_improved_rate(traj);
  REQUIRE(audit.evaluation.intermediates.at("x0") == Approx(0.125).margin(1e-12));
  REQUIRE(audit.worst_improved >= -1e-10);
  REQUIRE(audit.rows.front().improved_bound - audit.rows.front().x == Approx(0.0).margin(1e-12));
  REQUIRE(audit.rows[10].improved_bound - audit.rows[10].x > 0.01);
  // the improved bound stays below the classical exponential decay
  REQUIRE(audit.worst_vs_classical >= 0.0);
  REQUIRE(audit.rows[10].classical_bound > audit.rows[10].improved_bound);
  REQUIRE(audit.evaluation.verdict);

  // initial states with second moment above n are rejected
  REQUIRE_THROWS_WITH(audit_improved_rate(ou_evolve_trajectory(gaussian1d(0.5, 1.0), {0.0, 1.0})),
                      ContainsSubstring("second moment"));
}
