// Entropy, Fisher information, variance, moments: closed-form oracles,
// grid convergence, tensorization, and density perturbations.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ineqlab/functionals.hpp"

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

double trapz(const std::function<double(double)>& f, double L, int nn) {
  double s = 0.0;
  const double h = 2.0 * L / (nn - 1);
  for (int i = 0; i < nn; ++i) {
    const double x = -L + i * h;
    s += ((i == 0 || i == nn - 1) ? 0.5 : 1.0) * f(x);
  }
  return s * h;
}

}  // namespace

TEST_CASE("relative entropy closed forms for Gaussians") {
  REQUIRE(relative_entropy(gaussian1d(0.0, 2.0), build_standard_gaussian(1)) ==
          Approx(0.5 * (1.0 - std::log(2.0))).epsilon(1e-13));
  Vec m(2);
  m << 1.0, 1.0;
  REQUIRE(relative_entropy(build_gaussian(m, Mat::Identity(2, 2)), build_standard_gaussian(2)) ==
          Approx(1.0).epsilon(1e-13));
  // entropy against itself vanishes
  REQUIRE(relative_entropy(gaussian1d(0.3, 1.7), gaussian1d(0.3, 1.7)) == Approx(0.0).margin(1e-14));
}

TEST_CASE("relative Fisher information closed forms for Gaussians") {
  Vec a(3);
  a << 1.0, -2.0, 0.5;
  REQUIRE(fisher_information(build_gaussian(a, Mat::Identity(3, 3)), build_standard_gaussian(3)) ==
          Approx(a.squaredNorm()).epsilon(1e-13));
  REQUIRE(fisher_information(gaussian1d(0.0, 2.0), build_standard_gaussian(1)) ==
          Approx(0.5).epsilon(1e-13));
}

TEST_CASE("Lebesgue entropy of Gaussians and its scaling law") {
  const double base = -0.5 * std::log(2.0 * M_PI * std::exp(1.0));
  REQUIRE(entropy_dx(build_standard_gaussian(1)) == Approx(base).epsilon(1e-13));
  // scaling the covariance by c shifts entropy by -(1/2) log c
  REQUIRE(entropy_dx(gaussian1d(0.0, 3.0)) == Approx(base - 0.5 * std::log(3.0)).epsilon(1e-13));
  // grid discretization agrees with the closed form
  const GridSpec g = GridSpec::line(-10.0, 10.0, 2049);
  REQUIRE(entropy_dx(gaussian1d_grid(0.4, 0.8, g)) ==
          Approx(base - 0.5 * std::log(0.8)).margin(1e-10));
}

TEST_CASE("variance of canonical observables under the standard Gaussian") {
  for (int n : {1, 2, 3}) {
    const Measure gamma = build_standard_gaussian(n);
    const ScalarField half_sq{[](const Vec& x) { return 0.5 * x.squaredNorm(); }, nullptr};
    const auto vr = variance(half_sq, gamma);
    REQUIRE(vr.mean == Approx(0.5 * n).epsilon(1e-12));
    REQUIRE(vr.variance == Approx(0.5 * n).epsilon(1e-11));
    const auto vsq = variance(field_norm_squared(), gamma);
    REQUIRE(vsq.mean == Approx(static_cast<double>(n)).epsilon(1e-12));
    REQUIRE(vsq.variance == Approx(2.0 * n).epsilon(1e-11));
  }
}

TEST_CASE("Gauss-Hermite quadrature handles a non-polynomial integrand") {
  const ScalarField f{[](const Vec& x) { return 1.0 / (1.0 + x[0] * x[0]); }, nullptr};
  // E_gamma[1/(1+x^2)] = e^{1/2} sqrt(pi/2) erfc(1/sqrt(2))
  const double oracle =
      std::exp(0.5) * std::sqrt(M_PI / 2.0) * std::erfc(1.0 / std::sqrt(2.0));
  REQUIRE(integrate(f, build_standard_gaussian(1)) == Approx(oracle).margin(1e-7));
}

TEST_CASE("mean vector and covariance matrix of an anisotropic Gaussian") {
  Vec m(2);
  m << 0.7, -0.4;
  Mat c(2, 2);
  c << 1.5, 0.3, 0.3, 0.9;
  const Measure nu = build_gaussian(m, c);
  const Vec mv = mean_vector(nu);
  REQUIRE(mv[0] == Approx(0.7).margin(1e-12));
  REQUIRE(mv[1] == Approx(-0.4).margin(1e-12));
  const Mat cv = covariance_matrix(nu);
  REQUIRE(cv(0, 0) == Approx(1.5).margin(1e-11));
  REQUIRE(cv(0, 1) == Approx(0.3).margin(1e-11));
  REQUIRE(cv(1, 1) == Approx(0.9).margin(1e-11));
  REQUIRE(second_moment(nu) == Approx(1.5 + 0.9 + 0.49 + 0.16).margin(1e-11));
}

TEST_CASE("grid measures carry unit mass and exact low moments") {
  const GridSpec g = GridSpec::line(-10.0, 10.0, 1025);
  const Measure nu = gaussian1d_grid(0.4, 0.8, g);
  const auto w = grid_masses(nu, g);
  double mass = 0.0;
  for (double wi : w) mass += wi;
  REQUIRE(mass == Approx(1.0).margin(1e-12));
  REQUIRE(second_moment(nu) == Approx(0.8 + 0.16).margin(1e-10));
}

TEST_CASE("relative entropy and Fisher are exact on Gaussian grids") {
  // both log densities are quadratic, so every quadrature and finite
  // difference in the pipeline is exact up to rounding
  const GridSpec g = GridSpec::line(-10.0, 10.0, 1025);
  const Measure nu = gaussian1d_grid(0.4, 0.8, g);
  const Measure mu = gaussian1d_grid(0.0, 1.0, g);
  const double Hexact = 0.5 * (0.16 + 0.8 - 1.0 - std::log(0.8));
  const double Iexact = 0.16 + 0.04 / 0.8;
  REQUIRE(relative_entropy(nu, mu) == Approx(Hexact).margin(1e-12));
  REQUIRE(fisher_information(nu, mu) == Approx(Iexact).margin(1e-12));
}

TEST_CASE("Fisher information converges at second order in the step") {
  // nu = exp(-x^2/2 - 2x^4)/Z against mu = exp(-x^4)/Z': the quartic term in
  // the log ratio gives the finite-difference gradient a clean O(h^2) error
  const double Z = trapz([](double x) { return std::exp(-0.5 * x * x - 2.0 * std::pow(x, 4)); },
                         6.0, 400001);
  const double Iexact = trapz(
                            [](double x) {
                              const double g = x + 4.0 * x * x * x;
                              return g * g * std::exp(-0.5 * x * x - 2.0 * std::pow(x, 4));
                            },
                            6.0, 400001) /
                        Z;
  double prev = 0.0;
  for (int pts : {1025, 2049, 4097}) {
    const GridSpec g = GridSpec::line(-6.0, 6.0, pts);
    const Measure nu = build_from_potential(make_quadratic_quartic_potential(1.0, 2.0), g);
    const Measure mu = build_from_potential(make_quartic_potential(), g);
    const double err = fisher_information(nu, mu) - Iexact;
    REQUIRE(err > 0.0);
    if (prev != 0.0) REQUIRE(prev / err == Approx(4.0).margin(0.3));
    prev = err;
  }
}

TEST_CASE("relative entropy of a particle cloud uses the moment proxy") {
  ParticleCloud cloud;
  cloud.points = Mat(3, 1);
  cloud.points << -1.0, 0.0, 1.0;
  cloud.w = {0.25, 0.5, 0.25};
  Measure nu;
  nu.rep = cloud;
  // cloud mean 0, variance 1/2; the proxy equals the Gaussian closed form
  const double expected = relative_entropy(gaussian1d(0.0, 0.5), build_standard_gaussian(1));
  REQUIRE(relative_entropy(nu, build_standard_gaussian(1)) == Approx(expected).margin(1e-12));
  REQUIRE_THROWS_AS(entropy_dx(nu), Error);
}

TEST_CASE("tensor powers scale the additive functionals exactly") {
  const Measure nu = gaussian1d(0.4, 0.8);
  const Measure mu = build_standard_gaussian(1);
  const double h1 = relative_entropy(nu, mu);
  const double i1 = fisher_information(nu, mu);
  const double m1 = second_moment(nu);
  for (int N : {2, 5, 10}) {
    const Measure nuN = tensor_power(nu, N);
    const Measure muN = tensor_power(mu, N);
    REQUIRE(nuN.dim() == N);
    REQUIRE(relative_entropy(nuN, muN) == Approx(N * h1).margin(1e-13 * N));
    REQUIRE(fisher_information(nuN, muN) == Approx(N * i1).margin(1e-13 * N));
    REQUIRE(second_moment(nuN) == Approx(N * m1).margin(1e-13 * N));
  }
  REQUIRE_THROWS_AS(relative_entropy(tensor_power(nu, 2), mu), Error);
  REQUIRE_THROWS_AS(covariance_matrix(tensor_power(nu, 2)), Error);
}

TEST_CASE("materialized Gaussian tensor power agrees with the flagged product") {
  const Measure nu = gaussian1d(0.4, 0.8);
  const Measure mu = build_standard_gaussian(1);
  const Measure nu2f = tensor_power(nu, 2);
  const Measure nu2m = tensor_power(nu, 2, true);
  const Measure mu2m = tensor_power(mu, 2, true);
  REQUIRE(nu2m.gaussian() != nullptr);
  REQUIRE(nu2m.dim() == 2);
  REQUIRE(relative_entropy(nu2m, mu2m) ==
          Approx(relative_entropy(nu2f, tensor_power(mu, 2))).margin(1e-13));
  REQUIRE(fisher_information(nu2m, mu2m) ==
          Approx(2.0 * fisher_information(nu, mu)).margin(1e-13));
}

TEST_CASE("density perturbation shifts the mean at first order") {
  const GridSpec g = GridSpec::line(-9.0, 9.0, 2049);
  const Measure gamma = gaussian1d_grid(0.0, 1.0, g);
  Vec a(1);
  a[0] = 1.0;
  const Measure nu = perturb_density(gamma, field_linear(a), 0.1);
  // mean of (1 + 0.1 x) gamma is 0.1 E[x^2] = 0.1
  REQUIRE(mean_vector(nu)[0] == Approx(0.1).margin(1e-10));
  REQUIRE_FALSE(nu.potential);
  // a perturbation that would touch zero density is rejected
  REQUIRE_THROWS_AS(perturb_density(gamma, field_linear(a), 0.2), Error);
}

TEST_CASE("entropy of a perturbed density is quadratic in the amplitude") {
  const GridSpec g = GridSpec::line(-9.0, 9.0, 2049);
  const Measure gamma = gaussian1d_grid(0.0, 1.0, g);
  const ScalarField f = [] {
    ScalarField h;
    h.value = [](const Vec& x) { return (x[0] * x[0] - 1.0) * std::exp(-0.25 * x[0] * x[0]); };
    return h;
  }();
  // the perturbed density is renormalized, so the quadratic coefficient is
  // the centered second moment of the bump
  const double gvar = variance(f, gaussian1d(0.0, 1.0)).variance;
  for (double eps : {0.02, -0.02}) {
    const Measure nu = perturb_density(gamma, f, eps);
    const double h = relative_entropy(nu, gamma);
    REQUIRE(h / (eps * eps) == Approx(0.5 * gvar).epsilon(0.05));
  }
}

TEST_CASE("potential integrals agree between closed form and quadrature") {
  const Potential V = make_gaussian_potential(1);
  const Measure nu = gaussian1d(0.4, 0.8);
  const double closed = integrate_potential(V, nu);
  REQUIRE(closed == Approx(0.5 * (0.8 + 0.16) + V.beta).margin(1e-12));
  const GridSpec g = GridSpec::line(-10.0, 10.0, 2049);
  REQUIRE(integrate_potential(V, gaussian1d_grid(0.4, 0.8, g)) == Approx(closed).margin(1e-10));
}

TEST_CASE("gradient pair integrals match on analytic and grid paths") {
  const Measure nga = gaussian1d(0.4, 0.8);
  const Measure mga = build_standard_gaussian(1);
  const auto closed = detail::pair_gradient_integrals(nga, mga);
  REQUIRE(closed.a == Approx(0.96).margin(1e-12));   // E_nu |x|^2
  REQUIRE(closed.b == Approx(-0.04).margin(1e-12));  // E_nu x . (log nu/mu)'
  REQUIRE(closed.c == Approx(0.21).margin(1e-12));   // relative Fisher
  const GridSpec g = GridSpec::line(-10.0, 10.0, 2049);
  const auto grid = detail::pair_gradient_integrals(gaussian1d_grid(0.4, 0.8, g),
                                                    gaussian1d_grid(0.0, 1.0, g));
  REQUIRE(grid.a == Approx(closed.a).margin(1e-10));
  REQUIRE(grid.b == Approx(closed.b).margin(1e-10));
  REQUIRE(grid.c == Approx(closed.c).margin(1e-10));
}

TEST_CASE("absolute continuity on a shared grid is enforced") {
  const GridSpec g = GridSpec::line(-6.0, 6.0, 513);
  const Measure wide = gaussian1d_grid(0.0, 0.5, g);
  const Measure sharp = build_from_potential(make_quartic_potential(), g);
  // the Gaussian out-supports the quartic reference on this box
  REQUIRE_THROWS_AS(relative_entropy(wide, sharp), Error);
  // grids must match exactly
  const GridSpec g2 = GridSpec::line(-6.0, 6.0, 515);
  REQUIRE_THROWS_AS(relative_entropy(gaussian1d_grid(0.0, 1.0, g),
                                     gaussian1d_grid(0.0, 1.0, g2)),
                    Error);
}
