#pragma once

#include "pekar/grid.hpp"

#include <Eigen/Core>

#include <memory>
#include <string>

namespace pekar {

/// C-infinity ramp: 0 for t <= 0, 1 for t >= 1, g(t) / (g(t) + g(1 - t)) between,
/// with g(t) = exp(-1/t).
double smooth_ramp(double t);

/// Radial profile of the annular well: 0 on [0,1], 1 on [2,R], 0 beyond R+1.
double annular_profile(double r, double R);

/// Compactly supported bump exp(1 - 1/(1 - t^2)), t = (r - center) / half_width; peak 1.
double radial_bump(double r, double center, double half_width);

struct PotentialSpec {
  enum class Kind { annular, radial_bump, constant, coordinate_square, general_field };

  Kind kind = Kind::constant;
  double R = 0.0;             ///< annular: outer plateau radius
  double strength = 1.0;      ///< multiplies every kind (lambda for the annular well)
  double center = 0.0;        ///< radial_bump
  double half_width = 1.0;    ///< radial_bump
  int axis = 0;               ///< coordinate_square: W = x_axis^2
  std::shared_ptr<const Field3D> field;  ///< general_field, sampled by interpolation

  static PotentialSpec annular(double R, double strength = 1.0);
  static PotentialSpec bump(double center, double half_width, double amplitude = 1.0);
  static PotentialSpec constant_value(double value);
  static PotentialSpec coordinate_square(int axis = 0);
  static PotentialSpec general(Field3D f);

  bool is_radial() const { return kind != Kind::coordinate_square && kind != Kind::general_field; }

  /// Throws PekarError when the parameters are outside the documented domain.
  void validate() const;

  double operator()(const Eigen::Vector3d& x) const;
  /// Only for radial kinds.
  double radial(double r) const;

  std::string describe() const;
};

/// Samples the spec on every cell center.
Field3D build_potential(const PotentialSpec& spec, const Grid3D& grid);
RadialField build_radial_potential(const PotentialSpec& spec, const RadialGrid& grid);

/// The annular well V_R. Throws if R <= 2 or if R + 1 >= L/2.
Field3D build_VR(double R, const Grid3D& grid, double strength = 1.0);

/// lift_radial(spherical_average(W)).
Field3D rotational_average(const Field3D& W);

/// Discrete integral of V rho.
double potential_energy(const Field3D& V, const Field3D& rho);

/// Mass of rho on the shell 2 <= |x| <= R.
double mass_in_well(const Field3D& rho, double R);

}  // namespace pekar
