#pragma once

#include <Eigen/Core>

#include <vector>

namespace pekar {

/// Angular quadrature on the unit sphere; weights sum to 1 (mean, not area).
struct SphereRule {
  std::vector<Eigen::Vector3d> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
};

/// Octahedrally invariant Lebedev rules. Supported point counts:
/// 6, 14, 26, 50 (degrees 3, 5, 7, 11) and 302, 590 (degrees 29, 41).
SphereRule lebedev_rule(int points);

/// Smallest supported Lebedev rule integrating spherical polynomials of the given degree.
SphereRule lebedev_rule_for_degree(int degree);

}  // namespace pekar
