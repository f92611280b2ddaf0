#pragma once

// Uniform node-centered grids in one and two dimensions.

#include <array>
#include <cstddef>

#include "ineqlab/common.hpp"

namespace ineqlab {

// Nodes along axis k sit at lo[k] + i*step(k), i = 0..count[k]-1.  A node
// carries the mass of the cell of width step(k) centered on it.
struct GridSpec {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{0.0, 0.0};
  std::array<int, 2> count{0, 0};

  static GridSpec line(double a, double b, int n) {
    require(n >= 2 && b > a, "GridSpec::line needs b > a and at least 2 nodes");
    GridSpec g;
    g.dim = 1;
    g.lo = {a, 0.0};
    g.hi = {b, 0.0};
    g.count = {n, 1};
    return g;
  }

  static GridSpec plane(double ax, double bx, int nx, double ay, double by, int ny) {
    require(nx >= 2 && ny >= 2 && bx > ax && by > ay, "GridSpec::plane needs valid per-axis ranges");
    GridSpec g;
    g.dim = 2;
    g.lo = {ax, ay};
    g.hi = {bx, by};
    g.count = {nx, ny};
    return g;
  }

  double step(int axis) const { return (hi[axis] - lo[axis]) / (count[axis] - 1); }

  double max_step() const {
    double h = step(0);
    if (dim == 2) h = std::max(h, step(1));
    return h;
  }

  std::size_t size() const {
    return static_cast<std::size_t>(count[0]) * (dim == 2 ? count[1] : 1);
  }

  double cell_volume() const {
    double v = step(0);
    if (dim == 2) v *= step(1);
    return v;
  }

  double coord(int axis, int i) const { return lo[axis] + i * step(axis); }

  Vec node(std::size_t flat) const {
    Vec x(dim);
    if (dim == 1) {
      x[0] = coord(0, static_cast<int>(flat));
    } else {
      const int ny = count[1];
      x[0] = coord(0, static_cast<int>(flat) / ny);
      x[1] = coord(1, static_cast<int>(flat) % ny);
    }
    return x;
  }

  bool operator==(const GridSpec& o) const {
    if (dim != o.dim) return false;
    for (int k = 0; k < dim; ++k) {
      if (lo[k] != o.lo[k] || hi[k] != o.hi[k] || count[k] != o.count[k]) return false;
    }
    return true;
  }
  bool operator!=(const GridSpec& o) const { return !(*this == o); }
};

}  // namespace ineqlab
