#pragma once

#include "pekar/grid.hpp"
#include "pekar/sphere_rules.hpp"

#include <Eigen/Core>

#include <vector>

namespace pekar {

// ---------------------------------------------------------------------------
// 3D fields

/// Discrete inner product sum_x a(x) b(x) dx^3.
double inner(const Field3D& a, const Field3D& b);
double l2_norm(const Field3D& f);
double total_mass(const Field3D& rho);

/// Rescales to unit discrete L2 norm. Throws "degenerate normalization" on a zero field.
Field3D normalize(const Field3D& psi);

/// Pointwise |psi|^2.
Field3D density(const Field3D& psi);

/// Spectral evaluation of the integral of |grad psi|^2.
double kinetic_energy(const Field3D& psi);

/// -Laplacian of psi, spectral.
Field3D apply_negative_laplacian(const Field3D& psi);

struct CoulombEnergy {
  double value = 0.0;
  /// Mass of rho in the boundary layer max_i |x_i| > 0.4 L.
  double outside_mass = 0.0;
  /// Set when outside_mass exceeds 1e-6: the density is not resolved by the box.
  bool support_warning = false;
};

/// D(rho, rho) = double integral rho(x) rho(y) / |x - y| by zero-padded FFT
/// convolution with the free-space kernel.
/// Throws if rho has entries below -1e-12.
CoulombEnergy coulomb_self_energy(const Field3D& rho);

/// Phi = rho * 1/|x|, consistent with coulomb_self_energy.
Field3D coulomb_potential(const Field3D& rho);

Eigen::Vector3d center_of_mass(const Field3D& rho);

/// Mass of rho outside the ball of the given radius about `center`.
double mass_outside_ball(const Field3D& rho, const Eigen::Vector3d& center, double radius);

// ---------------------------------------------------------------------------
// Lattice symmetries

/// f(x - shift * dx) with periodic wrap.
Field3D translate_cells(const Field3D& f, const Eigen::Vector3i& shift);

/// One of the 48 signed axis permutations (index 0..47): f(S^{-1} x).
Field3D apply_cubic_symmetry(const Field3D& f, int op);

// ---------------------------------------------------------------------------
// Radial fields

/// 4 pi sum_j w_j u_j^2
double radial_norm_squared(const RadialField& u);
RadialField normalize(const RadialField& u);
/// 4 pi * integral of u_r^2 r^2 dr with u piecewise linear.
double radial_kinetic(const RadialField& u);
/// Mass 4 pi sum_j w_j rho_j of a radial density.
double radial_mass(const RadialField& rho);

/// Newton's-theorem Coulomb energy of a radial density:
/// (4 pi)^2 sum_ij w_i w_j rho_i rho_j / max(r_i, r_j). Throws on negative entries.
double radial_coulomb(const RadialField& rho);

/// Phi(r_i) = 4 pi sum_j w_j rho_j / max(r_i, r_j); consistent with radial_coulomb.
RadialField radial_coulomb_potential(const RadialField& rho);

/// H^1 norm sqrt(||grad u||^2 + ||u||^2) of a radial function.
double radial_h1_norm(const RadialField& u);

/// sqrt(2) |S^2|^{-1/2} h1_norm / r
double strauss_bound(double r, double h1_norm);

/// min over nodes r_j >= 2 of strauss_bound(r_j) - |u(r_j)|.
double strauss_bound_check(const RadialField& u, double h1_norm);

// ---------------------------------------------------------------------------
// Spherical averaging

enum class Interpolation { trilinear, tricubic };

/// Periodic interpolation of a 3D field at an arbitrary point.
double interpolate(const Field3D& f, const Eigen::Vector3d& p, Interpolation scheme = Interpolation::tricubic);

struct SphericalAverage {
  RadialField profile;
  /// Nodes whose sphere leaves the box (r > L/2); f counts as zero outside the box.
  std::vector<bool> extrapolated;
};

struct SphereAverageOptions {
  int rule_points = 590;
  Interpolation interpolation = Interpolation::tricubic;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
};

/// Radial grid covering the whole box (r_max = sqrt(3) L / 2) at spacing dx/4.
RadialGrid covering_radial_grid(const Grid3D& grid);

/// Mean of f over spheres |x - center| = r_j using a Lebedev rule.
SphericalAverage spherical_average(const Field3D& f, const RadialGrid& rgrid, const SphereAverageOptions& opts = {});
SphericalAverage spherical_average(const Field3D& f);

/// Cubic Lagrange interpolation in r (even extension at the origin, linear near r_max).
double evaluate_radial_cubic(const RadialField& u, double r);

/// Samples u(|x|) at every cell center. Requires r_max >= sqrt(3) L / 2.
Field3D lift_radial(const RadialField& u, const Grid3D& grid);

}  // namespace pekar
