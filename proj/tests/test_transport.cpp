// Quadratic optimal transport: Gaussian closed forms, quantile couplings on
// grids and atom clouds, the debiased entropic solver, Brenier plans, and
// entropy profiles along displacement geodesics.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ineqlab/transport.hpp"

using namespace ineqlab;
using Catch::Approx;

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

// W2^2 between N(0.4, 0.8) and N(0, 1): the monotone coupling is affine,
// so the cost splits into the mean shift and the standard deviation gap.
const double kShiftedPairW2Sq = 0.16 + (std::sqrt(0.8) - 1.0) * (std::sqrt(0.8) - 1.0);

}  // namespace

TEST_CASE("Gaussian W2 closed forms") {
  // pure translation: W2 equals the length of the shift
  Vec a(3);
  a << 0.3, -0.2, 0.6;
  const Measure nu = build_gaussian(a, Mat::Identity(3, 3));
  const Measure mu = build_standard_gaussian(3);
  REQUIRE(wasserstein2_squared(nu, mu) == Approx(a.squaredNorm()).margin(1e-12));
  REQUIRE(wasserstein2(nu, mu) == Approx(a.norm()).margin(1e-12));

  // centered 1D pair: the distance is the gap between standard deviations
  REQUIRE(wasserstein2_squared(gaussian1d(0.0, 0.8), gaussian1d(0.0, 1.0)) ==
          Approx((std::sqrt(0.8) - 1.0) * (std::sqrt(0.8) - 1.0)).margin(1e-12));

  // anisotropic 2D pair against the identity covariance
  Mat c(2, 2);
  c << 1.0, 0.0, 0.0, 4.0;
  const Measure wide = build_gaussian(Vec::Zero(2), c);
  // trace(C) + trace(I) - 2 (sqrt(1) + sqrt(4)) = 7 - 6 = 1
  REQUIRE(wasserstein2_squared(wide, build_standard_gaussian(2)) == Approx(1.0).margin(1e-12));

  // symmetry and self distance
  REQUIRE(wasserstein2_squared(build_standard_gaussian(2), wide) == Approx(1.0).margin(1e-12));
  REQUIRE(wasserstein2_squared(wide, wide) == Approx(0.0).margin(1e-14));
}

TEST_CASE("quantile backend reproduces the affine coupling of Gaussian pairs") {
  const Measure nu = gaussian1d(0.4, 0.8);
  const Measure mu = gaussian1d(0.0, 1.0);
  REQUIRE(wasserstein2_squared(nu, mu, W2Backend::quantile1d) ==
          Approx(kShiftedPairW2Sq).margin(1e-14));
  REQUIRE(wasserstein2_squared(nu, mu, W2Backend::gaussian) ==
          Approx(kShiftedPairW2Sq).margin(1e-12));
  // the automatic backend picks the closed form for a Gaussian pair
  REQUIRE(wasserstein2_squared(nu, mu) == Approx(kShiftedPairW2Sq).margin(1e-12));
}

TEST_CASE("quantile coupling of grid densities matches the closed form") {
  const GridSpec g = GridSpec::line(-10.0, 10.0, 2049);
  const Measure nu = gaussian1d_grid(0.4, 0.8, g);
  const Measure mu = gaussian1d_grid(0.0, 1.0, g);

  const double ab = wasserstein2_squared(nu, mu);
  REQUIRE(ab == Approx(kShiftedPairW2Sq).margin(1e-6));
  // the coupling is symmetric in its arguments
  REQUIRE(wasserstein2_squared(mu, nu) == Approx(ab).margin(1e-12));
  // grid versus analytic reference evaluates on the shared grid
  REQUIRE(wasserstein2_squared(nu, build_standard_gaussian(1)) ==
          Approx(kShiftedPairW2Sq).margin(1e-6));
  // self transport is free
  REQUIRE(wasserstein2_squared(mu, mu) == Approx(0.0).margin(1e-14));
}

TEST_CASE("atom clouds couple through the shared quantile grid") {
  ParticleCloud two;
  two.points = Mat(2, 1);
  two.points << 0.0, 1.0;
  two.w = {0.5, 0.5};
  Measure a;
  a.rep = two;

  ParticleCloud one;
  one.points = Mat(1, 1);
  one.points << 0.5;
  one.w = {1.0};
  Measure b;
  b.rep = one;

  // each half unit of mass moves by 1/2: cost = 2 * (1/2) * (1/2)^2 = 1/4
  REQUIRE(wasserstein2_squared(a, b) == Approx(0.25).margin(1e-14));
  REQUIRE(wasserstein2_squared(b, a) == Approx(0.25).margin(1e-14));

  const TransportPlan plan = brenier_transport(a, b);
  const auto* cp = plan.coupling();
  REQUIRE(cp != nullptr);
  REQUIRE(plan.cost == Approx(0.25).margin(1e-14));
  double mass = 0.0;
  for (std::size_t k = 0; k < cp->mass.size(); ++k) {
    mass += cp->mass[k];
    REQUIRE(cp->target_x[k] == Approx(0.5).margin(1e-14));
  }
  REQUIRE(mass == Approx(1.0).margin(1e-14));
}

TEST_CASE("W2 satisfies symmetry and the triangle inequality on grids") {
  const GridSpec g = GridSpec::line(-9.0, 9.0, 1025);
  const Measure f1 = gaussian1d_grid(0.0, 1.0, g);
  const Measure f2 = gaussian1d_grid(0.7, 1.3, g);
  const Measure f3 = build_from_potential(make_quadratic_quartic_potential(1.2, 0.1), g);

  const double d12 = wasserstein2(f1, f2);
  const double d23 = wasserstein2(f2, f3);
  const double d13 = wasserstein2(f1, f3);
  REQUIRE(d12 > 0.0);
  REQUIRE(d12 == Approx(wasserstein2(f2, f1)).margin(1e-12));
  REQUIRE(d23 == Approx(wasserstein2(f3, f2)).margin(1e-12));
  REQUIRE(d13 <= d12 + d23 + 1e-10);
  REQUIRE(d12 <= d13 + d23 + 1e-10);
  REQUIRE(d23 <= d12 + d13 + 1e-10);
}

TEST_CASE("tensor powers scale the squared distance by the factor count") {
  Measure a = gaussian1d(0.5, 1.0);
  Measure b = build_standard_gaussian(1);
  a.factors = 3;
  b.factors = 3;
  REQUIRE(wasserstein2_squared(a, b) == Approx(0.75).margin(1e-12));

  Measure c = build_standard_gaussian(1);
  c.factors = 2;
  REQUIRE_THROWS(wasserstein2_squared(a, c));
}

TEST_CASE("debiased entropic solver converges with a relaxed floor") {
  const GridSpec g = GridSpec::line(-7.0, 7.0, 101);
  const Measure nu = gaussian1d_grid(0.4, 0.8, g);
  const Measure mu = gaussian1d_grid(0.0, 1.0, g);
  Mat x(static_cast<Eigen::Index>(g.size()), 1);
  for (std::size_t i = 0; i < g.size(); ++i)
    x(static_cast<Eigen::Index>(i), 0) = g.coord(0, static_cast<int>(i));

  SinkhornOptions opt;
  opt.eps_floor_rel = 1e-2;  // coarse grids need a larger blur to converge
  opt.marginal_tol = 1e-7;

  const SinkhornResult r = entropic_w2_squared(x, nu.grid()->w, x, mu.grid()->w, opt);
  REQUIRE(r.converged);
  REQUIRE(r.iterations > 0);
  REQUIRE(r.marginal_error <= opt.marginal_tol);
  REQUIRE(r.eps_floor > 0.0);
  REQUIRE(std::abs(r.w2_squared - kShiftedPairW2Sq) / kShiftedPairW2Sq <= 1e-3);

  // debiasing removes the entropic self cost
  const SinkhornResult self = entropic_w2_squared(x, nu.grid()->w, x, nu.grid()->w, opt);
  REQUIRE(self.converged);
  REQUIRE(std::abs(self.w2_squared) <= 1e-8);
}

TEST_CASE("entropic backend matches the closed form on a dense grid") {
  // the default annealing schedule needs roughly 200 nodes to reach its
  // marginal tolerance; this case takes tens of seconds
  const GridSpec g = GridSpec::line(-7.0, 7.0, 201);
  const Measure nu = gaussian1d_grid(0.4, 0.8, g);
  const Measure mu = gaussian1d_grid(0.0, 1.0, g);
  const double v = wasserstein2_squared(nu, mu, W2Backend::entropic);
  REQUIRE(std::abs(v - kShiftedPairW2Sq) / kShiftedPairW2Sq <= 1e-3);
}

TEST_CASE("Brenier transport between Gaussians is affine") {
  const Measure mu = build_standard_gaussian(1);

  const TransportPlan shift = brenier_transport(mu, gaussian1d(0.7, 1.0));
  const auto* ap = shift.affine();
  REQUIRE(ap != nullptr);
  REQUIRE(ap->A(0, 0) == Approx(1.0).margin(1e-12));
  REQUIRE(ap->b[0] == Approx(0.7).margin(1e-12));
  REQUIRE(shift.cost == Approx(0.49).margin(1e-12));

  const TransportPlan dilate = brenier_transport(mu, gaussian1d(0.0, 4.0));
  REQUIRE(dilate.affine() != nullptr);
  REQUIRE(dilate.affine()->A(0, 0) == Approx(2.0).margin(1e-12));
  REQUIRE(dilate.affine()->b[0] == Approx(0.0).margin(1e-12));
  REQUIRE(dilate.cost == Approx(1.0).margin(1e-12));

  Mat c(2, 2);
  c << 1.0, 0.0, 0.0, 4.0;
  const TransportPlan plane = brenier_transport(build_standard_gaussian(2), build_gaussian(Vec::Zero(2), c));
  REQUIRE(plane.affine() != nullptr);
  REQUIRE(plane.affine()->A(0, 0) == Approx(1.0).margin(1e-12));
  REQUIRE(plane.affine()->A(1, 1) == Approx(2.0).margin(1e-12));
  REQUIRE(plane.affine()->A(0, 1) == Approx(0.0).margin(1e-12));
  REQUIRE(plane.cost == Approx(1.0).margin(1e-12));
}

TEST_CASE("Brenier transport between grids is a monotone map") {
  const Measure mu = gaussian1d_grid(0.0, 1.0, GridSpec::line(-10.0, 10.0, 2049));
  const Measure wide = gaussian1d_grid(0.0, 4.0, GridSpec::line(-13.0, 13.0, 2081));

  const TransportPlan plan = brenier_transport(mu, wide);
  const auto* mp = plan.monotone();
  REQUIRE(mp != nullptr);
  REQUIRE(plan.cost == Approx(1.0).margin(1e-5));

  // the optimal map doubles the coordinate; check it away from the tails
  for (std::size_t i = 0; i < mp->map.size(); ++i) {
    const double x = mp->grid.coord(0, static_cast<int>(i));
    if (std::abs(x) > 2.0 || !mp->mask[i]) continue;
    REQUIRE(mp->map[i] == Approx(2.0 * x).margin(1e-3));
  }
  // nodes beyond the quantile resolution are dropped from the support
  REQUIRE(mp->mask.front() == 0);
  REQUIRE(mp->mask.back() == 0);
  REQUIRE(mp->mask[1024] == 1);
  // monotone on the support
  for (std::size_t i = 0; i + 1 < mp->map.size(); ++i)
    if (mp->mask[i] && mp->mask[i + 1]) REQUIRE(mp->map[i + 1] >= mp->map[i] - 1e-12);
}

TEST_CASE("geodesic entropy profile of a Gaussian dilation") {
  // interpolating N(0,1) to N(0,4), the map is 2x and the coordinate entropy
  // is -log(2 pi e)/2 - log(1 + s)
  const Measure m0 = build_standard_gaussian(1);
  const Measure m1 = gaussian1d(0.0, 4.0);
  const GeodesicProfile prof = geodesic_profile(m0, m1);

  REQUIRE(prof.dim == 1);
  REQUIRE(prof.s.size() == 33);
  REQUIRE(prof.s.front() == Approx(0.0).margin(1e-15));
  REQUIRE(prof.s.back() == Approx(1.0).margin(1e-15));
  REQUIRE(prof.plan.cost == Approx(1.0).margin(1e-12));

  const double base = -0.5 * std::log(2.0 * M_PI * M_E);
  REQUIRE(prof.psi.front() == Approx(base).margin(1e-12));
  REQUIRE(prof.psi[16] == Approx(base - std::log(1.5)).margin(1e-12));
  REQUIRE(prof.psi.back() == Approx(base - std::log(2.0)).margin(1e-12));

  REQUIRE_THROWS(geodesic_profile(m0, m1, 16));
}

TEST_CASE("geodesic entropy profile on grids tracks the analytic dilation") {
  const Measure m0 = gaussian1d_grid(0.0, 1.0, GridSpec::line(-8.0, 8.0, 1025));
  const Measure m1 = gaussian1d_grid(0.0, 4.0, GridSpec::line(-13.0, 13.0, 1665));
  const GeodesicProfile prof = geodesic_profile(m0, m1);

  REQUIRE(prof.plan.monotone() != nullptr);
  REQUIRE(prof.plan.cost == Approx(1.0).margin(1e-4));
  const double base = -0.5 * std::log(2.0 * M_PI * M_E);
  for (std::size_t k = 0; k < prof.s.size(); ++k)
    REQUIRE(prof.psi[k] == Approx(base - std::log1p(prof.s[k])).margin(1e-4));
}
