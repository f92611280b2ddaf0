#pragma once

// Gauss-Hermite nodes for integration against the standard normal weight,
// computed once per order by the Golub-Welsch eigenvalue method.

#include <map>
#include <mutex>
#include <vector>

#include "ineqlab/common.hpp"

namespace ineqlab {

struct GaussHermiteRule {
  std::vector<double> node;    // abscissae for weight e^{-x^2/2}/sqrt(2 pi)
  std::vector<double> weight;  // sums to 1
};

// Rule of the given order; exact for polynomials of degree < 2*order.
inline const GaussHermiteRule& gauss_hermite(int order) {
  static std::map<int, GaussHermiteRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it != cache.end()) return it->second;
  require(order >= 1, "gauss_hermite order must be >= 1");

  Mat jacobi = Mat::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = std::sqrt(k / 2.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  require(es.info() == Eigen::Success, "gauss_hermite eigensolve failed");

  GaussHermiteRule rule;
  rule.node.resize(order);
  rule.weight.resize(order);
  for (int i = 0; i < order; ++i) {
    rule.node[i] = std::sqrt(2.0) * es.eigenvalues()[i];
    rule.weight[i] = sqr(es.eigenvectors()(0, i));
  }
  return cache.emplace(order, std::move(rule)).first->second;
}

}  // namespace ineqlab
