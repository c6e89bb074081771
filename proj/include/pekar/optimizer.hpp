#pragma once

#include "pekar/grid.hpp"
#include "pekar/pekar_energy.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace pekar {

/// Energy dropped below the coercivity floor 0.25 * kinetic - 10.
class DivergenceError : public PekarError {
 public:
  using PekarError::PekarError;
};

struct SeedSpec {
  enum class Kind { radial_gaussian, translated_q, random_perturbed, custom };

  Kind kind = Kind::radial_gaussian;
  /// Gaussian seeds are exp(-|x - center|^2 / (4 sigma^2)).
  double gaussian_sigma = 2.0;
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  /// random_perturbed: relative amplitude of smooth multiplicative noise.
  double perturbation = 0.1;
  std::uint64_t rng_seed = 1;
  /// translated_q: radial profile placed at `center`.
  std::shared_ptr<const RadialField> profile;
  std::shared_ptr<const Field3D> custom;
};

struct SolveOptions {
  int max_iters = 50000;
  double initial_step = 1.0;
  double max_step = 4.0;
  double step_growth = 1.5;
  double tolerance_energy = 1e-9;
  double tolerance_residual = 1e-5;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 40;
  /// Shift s of the Sobolev preconditioner (s - Laplacian)^{-1}.
  double preconditioner_shift = 1.0;
  SeedSpec seed;
  EnergyModel model;

  void validate() const;
};

template <class FieldT>
struct BasicMinimizerResult {
  FieldT psi;
  EnergyBreakdown energy;
  ELResidual residual;
  int iterations = 0;
  bool converged = false;
  /// Total energy of the seed followed by every accepted iterate.
  std::vector<double> history;
  /// | ||psi_k||_2 - 1 | for every recorded iterate.
  std::vector<double> norm_defects;
  std::string stop_reason;
};

using MinimizerResult = BasicMinimizerResult<Field3D>;
using RadialMinimizerResult = BasicMinimizerResult<RadialField>;

/// Seed field on a grid according to `seed` (not yet normalized for custom seeds).
Field3D make_seed(const SeedSpec& seed, const Grid3D& grid);
RadialField make_radial_seed(const SeedSpec& seed, const RadialGrid& grid);

/// Projected (Sobolev-preconditioned) gradient descent on the unit L2 sphere
/// with Armijo backtracking.
MinimizerResult minimize(const Field3D& V, const SolveOptions& opts);
RadialMinimizerResult minimize_radial(const RadialField& V, const SolveOptions& opts);

/// Radial minimizer Q of the free problem.
RadialMinimizerResult solve_free(const RadialGrid& grid, SolveOptions opts = {});

/// Samples Q(|x - center|) on the grid by cubic interpolation in r.
Field3D place_radial(const RadialField& Q, const Grid3D& grid, const Eigen::Vector3d& center);

/// Q(x - zeta_R) with zeta_R = ((R+2)/2, 0, 0), normalized. Throws when the
/// translate leaves the box (lattice mass off by more than 2%).
Field3D translate_seed(const RadialField& Q, double R, const Grid3D& grid);
Eigen::Vector3d well_center(double R);

}  // namespace pekar
