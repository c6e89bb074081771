#include "pekar/potentials.hpp"

#include "pekar/field_core.hpp"

#include <cmath>
#include <sstream>

namespace pekar {

double smooth_ramp(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double annular_profile(double r, double R) {
  r = std::abs(r);
  if (r <= 1.0) return 0.0;
  if (r < 2.0) return smooth_ramp(r - 1.0);
  if (r <= R) return 1.0;
  if (r < R + 1.0) return smooth_ramp(R + 1.0 - r);
  return 0.0;
}

double radial_bump(double r, double center, double half_width) {
  const double t = (r - center) / half_width;
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

PotentialSpec PotentialSpec::annular(double R, double strength) {
  PotentialSpec s;
  s.kind = Kind::annular;
  s.R = R;
  s.strength = strength;
  return s;
}

PotentialSpec PotentialSpec::bump(double center, double half_width, double amplitude) {
  PotentialSpec s;
  s.kind = Kind::radial_bump;
  s.center = center;
  s.half_width = half_width;
  s.strength = amplitude;
  return s;
}

PotentialSpec PotentialSpec::constant_value(double value) {
  PotentialSpec s;
  s.kind = Kind::constant;
  s.strength = value;
  return s;
}

PotentialSpec PotentialSpec::coordinate_square(int axis) {
  PotentialSpec s;
  s.kind = Kind::coordinate_square;
  s.axis = axis;
  return s;
}

PotentialSpec PotentialSpec::general(Field3D f) {
  PotentialSpec s;
  s.kind = Kind::general_field;
  s.field = std::make_shared<const Field3D>(std::move(f));
  return s;
}

void PotentialSpec::validate() const {
  if (!std::isfinite(strength)) throw PekarError("potential strength must be finite");
  switch (kind) {
    case Kind::annular:
      if (!(R > 2.0)) throw PekarError("R must exceed 2 (got " + std::to_string(R) + ")");
      if (strength < 1.0) throw PekarError("annular strength multiplier must be >= 1");
      break;
    case Kind::radial_bump:
      if (!(half_width > 0.0)) throw PekarError("bump half_width must be positive");
      if (center - half_width < 0.0) throw PekarError("bump support must not cross the origin");
      break;
    case Kind::coordinate_square:
      if (axis < 0 || axis > 2) throw PekarError("coordinate axis must be 0, 1 or 2");
      break;
    case Kind::general_field:
      if (!field) throw PekarError("general potential needs a field");
      break;
    case Kind::constant:
      break;
  }
}

double PotentialSpec::radial(double r) const {
  switch (kind) {
    case Kind::annular:
      return strength * annular_profile(r, R);
    case Kind::radial_bump:
      return strength * radial_bump(r, center, half_width);
    case Kind::constant:
      return strength;
    default:
      throw PekarError("PotentialSpec::radial called on a non-radial potential");
  }
}

double PotentialSpec::operator()(const Eigen::Vector3d& x) const {
  switch (kind) {
    case Kind::coordinate_square:
      return strength * x[axis] * x[axis];
    case Kind::general_field:
      return strength * interpolate(*field, x);
    default:
      return radial(x.norm());
  }
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::annular: os << "annular(R=" << R << ", lambda=" << strength << ")"; break;
    case Kind::radial_bump: os << "bump(center=" << center << ", half_width=" << half_width << ", amp=" << strength << ")"; break;
    case Kind::constant: os << "constant(" << strength << ")"; break;
    case Kind::coordinate_square: os << "x" << (axis + 1) << "^2"; break;
    case Kind::general_field: os << "field"; break;
  }
  return os.str();
}

Field3D build_potential(const PotentialSpec& spec, const Grid3D& grid) {
  spec.validate();
  if (spec.kind == PotentialSpec::Kind::annular) return build_VR(spec.R, grid, spec.strength);
  if (spec.kind == PotentialSpec::Kind::general_field && spec.field->grid == grid)
    return Field3D(grid, spec.strength * spec.field->values);
  return Field3D::from_function(grid, [&](const Eigen::Vector3d& x) { return spec(x); });
}

RadialField build_radial_potential(const PotentialSpec& spec, const RadialGrid& grid) {
  spec.validate();
  return RadialField::from_function(grid, [&](double r) { return spec.radial(r); });
}

Field3D build_VR(double R, const Grid3D& grid, double strength) {
  if (!(R > 2.0)) throw PekarError("R must exceed 2 (got " + std::to_string(R) + ")");
  if (R + 1.0 >= 0.5 * grid.L()) throw PekarError("potential exits box: R + 1 must be below L/2");
  return Field3D::from_function(grid, [&](const Eigen::Vector3d& x) { return strength * annular_profile(x.norm(), R); });
}

Field3D rotational_average(const Field3D& W) {
  return lift_radial(spherical_average(W).profile, W.grid);
}

double potential_energy(const Field3D& V, const Field3D& rho) {
  if (!V.values.allFinite() || !rho.values.allFinite()) throw PekarError("potential_energy: non-finite input");
  return inner(V, rho);
}

double mass_in_well(const Field3D& rho, double R) {
  const Grid3D& g = rho.grid;
  const int n = g.n();
  double acc = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double r = g.point(i, j, k).norm();
        if (r >= 2.0 && r <= R) acc += rho(i, j, k);
      }
  return acc * g.cell_volume();
}

}  // namespace pekar
