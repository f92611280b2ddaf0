#pragma once

// Discrete Legendre-Fenchel transform of sampled functions: convex hull plus
// monotone slope search in 1D, separable passes in 2D.

#include <algorithm>
#include <vector>

#include "ineqlab/grid.hpp"
#include "ineqlab/potential.hpp"

namespace ineqlab {

// Conjugate of the lower convex envelope of samples (x_i, v_i).
class LegendreTransform1D {
 public:
  LegendreTransform1D(std::vector<double> x, std::vector<double> v) {
    require(x.size() == v.size() && x.size() >= 2, "LegendreTransform1D: need >= 2 samples");
    hull_x_.reserve(x.size());
    hull_v_.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      require(i == 0 || x[i] > x[i - 1], "LegendreTransform1D: abscissae must be increasing");
      while (hull_x_.size() >= 2) {
        const std::size_t m = hull_x_.size();
        const double cross = (hull_v_[m - 1] - hull_v_[m - 2]) * (x[i] - hull_x_[m - 1]) -
                             (v[i] - hull_v_[m - 1]) * (hull_x_[m - 1] - hull_x_[m - 2]);
        if (cross >= 0.0) hull_x_.pop_back(), hull_v_.pop_back();
        else break;
      }
      hull_x_.push_back(x[i]);
      hull_v_.push_back(v[i]);
    }
    edge_slope_.resize(hull_x_.size() - 1);
    for (std::size_t k = 0; k + 1 < hull_x_.size(); ++k)
      edge_slope_[k] = (hull_v_[k + 1] - hull_v_[k]) / (hull_x_[k + 1] - hull_x_[k]);
  }

  struct Eval {
    double value;
    bool on_boundary;  // the sup is attained at the edge of the sample box
  };

  Eval at(double slope) const {
    const auto it = std::lower_bound(edge_slope_.begin(), edge_slope_.end(), slope);
    const std::size_t k = static_cast<std::size_t>(it - edge_slope_.begin());
    return Eval{slope * hull_x_[k] - hull_v_[k], k == 0 || k == hull_x_.size() - 1};
  }

 private:
  std::vector<double> hull_x_, hull_v_, edge_slope_;
};

struct LegendreEval {
  double value;
  bool on_boundary;
};

namespace detail {

inline LegendreEval legendre_2d(const Potential& p, const Vec& y, const GridSpec& box) {
  // pass 1: conjugate in x2 along each x1-row at the single slope y[1];
  // pass 2: conjugate the result in x1 at slope y[0].
  const int nx = box.count[0], ny = box.count[1];
  std::vector<double> rowconj(nx), xs(nx);
  bool boundary = false;
  std::vector<double> x2(ny), col(ny);
  for (int j = 0; j < ny; ++j) x2[j] = box.coord(1, j);
  Vec q(2);
  for (int i = 0; i < nx; ++i) {
    xs[i] = box.coord(0, i);
    q[0] = xs[i];
    for (int j = 0; j < ny; ++j) {
      q[1] = x2[j];
      col[j] = p.value0(q);
    }
    const auto e = LegendreTransform1D(x2, col).at(y[1]);
    rowconj[i] = -e.value;  // partial conjugates enter pass 2 with a sign flip
    boundary = boundary || e.on_boundary;
  }
  const auto e = LegendreTransform1D(xs, rowconj).at(y[0]);
  return LegendreEval{e.value, boundary || e.on_boundary};
}

}  // namespace detail

// Discrete conjugate of V0 sampled on a box; flags queries whose sup lands on
// the box boundary as unreliable.
inline LegendreEval legendre_transform(const Potential& p, const Vec& y,
                                       const GridSpec& box) {
  require(p.dim == box.dim && y.size() == p.dim, "legendre_transform: dimension mismatch");
  if (p.dim == 1) {
    std::vector<double> xs(box.count[0]), vs(box.count[0]);
    for (int i = 0; i < box.count[0]; ++i) {
      xs[i] = box.coord(0, i);
      Vec q(1);
      q[0] = xs[i];
      vs[i] = p.value0(q);
    }
    const auto e = LegendreTransform1D(std::move(xs), std::move(vs)).at(y[0]);
    return LegendreEval{e.value, e.on_boundary};
  }
  return detail::legendre_2d(p, y, box);
}

inline GridSpec default_legendre_box(int dim) {
  return dim == 1 ? GridSpec::line(-12.0, 12.0, 32769)
                  : GridSpec::plane(-12.0, 12.0, 257, -12.0, 12.0, 257);
}

inline LegendreEval legendre_transform(const Potential& p, const Vec& y) {
  return legendre_transform(p, y, default_legendre_box(p.dim));
}

}  // namespace ineqlab
