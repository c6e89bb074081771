#include "pekar/grid.hpp"

#include <cmath>
#include <utility>

namespace pekar {

Grid3D::Grid3D(int n, double L) : n_(n), L_(L) {
  if (n < 8 || n % 2 != 0)
    throw PekarError("Grid3D: n must be even and >= 8, got " + std::to_string(n));
  if (!(L > 0.0) || !std::isfinite(L)) throw PekarError("Grid3D: L must be positive and finite");
}

Field3D::Field3D(const Grid3D& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  if (static_cast<std::size_t>(values.size()) != grid.size())
    throw PekarError("Field3D: value count does not match grid");
}

RadialGrid::RadialGrid(int m, double r_max) : m_(m), r_max_(r_max) {
  if (m < 3) throw PekarError("RadialGrid: need at least 3 nodes");
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw PekarError("RadialGrid: r_max must be positive");
  const double hh = h();
  nodes_ = Eigen::ArrayXd::LinSpaced(m, 0.0, r_max);
  weights_.resize(m);
  for (int j = 0; j < m; ++j) {
    const double r = nodes_[j];
    // half-hat integrals of hat_j(r) r^2 on the left and right cells
    const double left = 0.5 * r * r * hh - r * hh * hh / 3.0 + hh * hh * hh / 12.0;
    const double right = 0.5 * r * r * hh + r * hh * hh / 3.0 + hh * hh * hh / 12.0;
    weights_[j] = (j > 0 ? left : 0.0) + (j < m - 1 ? right : 0.0);
  }
}

RadialField::RadialField(const RadialGrid& g, Eigen::ArrayXd v) : grid(g), values(std::move(v)) {
  if (values.size() != g.m()) throw PekarError("RadialField: value count does not match grid");
}

double RadialField::at(double r) const {
  if (r < 0.0) r = -r;
  if (r > grid.r_max()) return 0.0;
  const double s = r / grid.h();
  int j = static_cast<int>(s);
  if (j >= grid.m() - 1) return values[grid.m() - 1];
  const double t = s - j;
  return (1.0 - t) * values[j] + t * values[j + 1];
}

}  // namespace pekar
