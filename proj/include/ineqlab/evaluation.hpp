#pragma once

// Evaluation record shared by all inequality checks, with the tolerance
// policy: absolute 1e-8 on analytic paths, max(1e-6, 10 h^2 scale) when a
// grid is involved.

#include <map>
#include <string>
#include <vector>

#include "ineqlab/measure.hpp"

namespace ineqlab {

struct NumericsMeta {
  bool grid = false;
  double h = 0.0;

  void absorb(const Measure& m) {
    if (const auto* g = m.grid()) {
      grid = true;
      h = std::max(h, g->grid.max_step());
    }
  }
  void absorb(const NumericsMeta& o) {
    grid = grid || o.grid;
    h = std::max(h, o.h);
  }
};

inline double tolerance_for(const NumericsMeta& meta, double lhs, double rhs) {
  if (!meta.grid) return 1e-8;
  const double scale = std::abs(lhs) + std::abs(rhs) + 1.0;
  return std::max(1e-6, 10.0 * meta.h * meta.h * scale);
}

struct InequalityEvaluation {
  std::string id;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;  // rhs - lhs
  std::map<std::string, double> intermediates;
  std::vector<std::string> flags;
  double tolerance = 0.0;
  bool verdict = false;

  // The verdict also covers auxiliary one-sided bounds recorded under keys
  // starting with "slack_".
  void finalize(const NumericsMeta& meta, double tol_override = -1.0) {
    slack = rhs - lhs;
    tolerance = tol_override >= 0.0 ? tol_override : tolerance_for(meta, lhs, rhs);
    rejudge();
  }

  void rescale_tolerance(double factor) {
    require(factor >= 0.0, "tolerance scale must be nonnegative");
    tolerance *= factor;
    rejudge();
  }

 private:
  void rejudge() {
    verdict = slack >= -tolerance;
    for (const auto& [key, value] : intermediates)
      if (key.rfind("slack_", 0) == 0) verdict = verdict && value >= -tolerance;
  }
};

}  // namespace ineqlab
