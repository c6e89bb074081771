#pragma once

#include "pekar/field_core.hpp"
#include "pekar/grid.hpp"
#include "pekar/optimizer.hpp"
#include "pekar/potentials.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace pekar {

/// Radial free minimizer Q and e(0), shared by every experiment.
struct FreeProblem {
  RadialField Q;
  EnergyBreakdown energy;
  bool converged = false;

  double e0() const { return energy.total; }
};

FreeProblem solve_free_problem(const RadialGrid& grid, const SolveOptions& opts = {});

// ---------------------------------------------------------------------------
// R sweep

struct SweepOptions {
  Grid3D grid{128, 24.0};
  RadialGrid radial{4096, 24.0};
  SolveOptions solve;
  double strength = 1.0;
  int workers = 1;
  /// Centers of the extra radial Gaussian seeds; e_rad is the lowest result.
  std::vector<double> radial_seed_centers{0.0, 3.0, 5.0};
  bool keep_fields = false;
};

struct SweepRow {
  double R = 0.0;
  double e_full = 0.0;
  double e_rad = 0.0;
  double trial_bound = 0.0;
  double gap = 0.0;          ///< e_rad - e_full
  double well_mass = 0.0;    ///< of the full minimizer
  double anisotropy = 0.0;   ///< |center of mass| of the full minimizer
  double residual_full = 0.0;
  double residual_rad = 0.0;
  int iterations_full = 0;
  bool converged = false;
  std::string note;
  std::shared_ptr<const MinimizerResult> full;
  std::shared_ptr<const RadialMinimizerResult> radial;
};

/// One row per R, computed concurrently on `workers` threads. Rows come back
/// in input order; a failed or unconverged solve is flagged in `note`.
std::vector<SweepRow> sweep_R(const std::vector<double>& R_list, const FreeProblem& free, const SweepOptions& opts);

/// e(0) - integral V_R |Q_R|^2 on the grid.
double trial_upper_bound(double R, const FreeProblem& free, const Grid3D& grid, double strength = 1.0);

// ---------------------------------------------------------------------------
// Perturbation derivative

struct PerturbedSolve {
  double delta = 0.0;
  EnergyBreakdown energy;
  bool converged = false;
  int iterations = 0;
};

/// Minimizes E_V - delta integral Z |u|^2, warm-started from `start`.
PerturbedSolve perturbed_energy(const Field3D& V, const Field3D& Z, double delta, const Field3D& start,
                                const SolveOptions& opts);

struct DerivativeReport {
  std::string V_description;
  std::string Z_description;
  double e_base = 0.0;
  double pairing = 0.0;                 ///< integral Z |u_V|^2
  std::vector<double> deltas;
  std::vector<double> e_plus, e_minus;
  std::vector<double> central, forward, backward;
  double richardson = 0.0;
  double defect = 0.0;                  ///< |richardson + pairing|
  bool bracketed = false;               ///< forward <= central <= backward at every delta
  bool converged = false;
};

/// Central, forward and backward difference quotients of delta -> e(V + delta Z)
/// at 0 over a decreasing schedule, with Richardson extrapolation of the
/// central quotients (step ratio 2). `u_V` is the unperturbed minimizer.
/// Z must be radial.
DerivativeReport fd_derivative(const PotentialSpec& V, const PotentialSpec& Z, const MinimizerResult& u_V,
                               const std::vector<double>& deltas, const SolveOptions& opts, int workers = 1);

/// Repeated Richardson extrapolation of O(h^2) estimates at h, h/2, h/4, ...
double richardson_extrapolate(const std::vector<double>& estimates);

// ---------------------------------------------------------------------------
// Rotational averages

struct RotationalDefects {
  double fubini = 0.0;    ///< |int <rho> W - int rho <W>|
  double averaged = 0.0;  ///< |int rho <W> - int <rho> <W>|
};

RotationalDefects rotational_density_check(const Field3D& u, const Field3D& W, const SphereAverageOptions& opts = {});

struct OrbitReport {
  std::vector<Eigen::Vector3d> directions;
  std::vector<double> energies;
  std::vector<bool> converged;
  std::vector<RadialField> profiles;   ///< spherical averages of the densities
  double max_energy_spread = 0.0;      ///< (max - min) / |min|
  double max_profile_defect = 0.0;     ///< max pairwise sup-norm difference over r <= L/2, relative to the peak
};

struct OrbitOptions {
  SolveOptions solve;
  /// Distance of every seed from the origin.
  double seed_radius = 0.0;
  /// Average each density about its own center of mass instead of the origin.
  bool recenter = false;
  std::uint64_t rng_seed = 1;
  int workers = 1;
};

/// Minimizes from n_seeds translated copies of Q placed in uniformly random
/// directions and compares the outcomes.
OrbitReport rotation_orbit_evidence(const Field3D& V, const FreeProblem& free, int n_seeds, const OrbitOptions& opts);

/// Runs jobs 0..count-1 on at most `workers` threads.
void parallel_for(int count, int workers, const std::function<void(int)>& job);

}  // namespace pekar
