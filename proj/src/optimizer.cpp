#include "pekar/optimizer.hpp"

#include "pekar/field_core.hpp"
#include "pekar/spectral.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace pekar {

void SolveOptions::validate() const {
  if (max_iters < 0) throw PekarError("max_iters must be >= 0");
  if (!(tolerance_energy > 0.0)) throw PekarError("tolerance_energy must be positive");
  if (!(tolerance_residual > 0.0)) throw PekarError("tolerance_residual must be positive");
  if (!(initial_step > 0.0) || !(max_step >= initial_step)) throw PekarError("step sizes must satisfy 0 < initial_step <= max_step");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) throw PekarError("armijo_c1 must lie in (0, 1)");
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) throw PekarError("backtrack_factor must lie in (0, 1)");
  if (!(preconditioner_shift > 0.0)) throw PekarError("preconditioner_shift must be positive");
}

namespace {

// Both problems share one descent loop. A problem supplies the discrete
// inner product, the energy with H psi, and the Sobolev preconditioner.
struct Evaluation {
  EnergyBreakdown energy;
  Eigen::ArrayXd h_psi;
};

class GridProblem {
 public:
  GridProblem(const Field3D& V, const SolveOptions& opts)
      : V_(V), model_(opts.model), shift_(opts.preconditioner_shift), ws_(spectral_workspace(V.grid)) {}

  double dot(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) const {
    return (a * b).sum() * V_.grid.cell_volume();
  }

  Evaluation evaluate(const Eigen::ArrayXd& u, bool with_gradient) const {
    PekarEvaluation ev = evaluate_pekar(Field3D(V_.grid, u), V_, with_gradient, model_);
    return {ev.energy, std::move(ev.h_psi.values)};
  }

  Eigen::ArrayXd precondition(const Eigen::ArrayXd& r) {
    SpectralWorkspace::Spectrum s;
    ws_.forward(r, s);
    s *= ws_.resolvent(shift_);
    Eigen::ArrayXd out;
    ws_.inverse(s, out);
    return out;
  }

  Field3D wrap(Eigen::ArrayXd u) const { return Field3D(V_.grid, std::move(u)); }

 private:
  const Field3D& V_;
  EnergyModel model_;
  double shift_;
  SpectralWorkspace& ws_;
};

class RadialProblem {
 public:
  RadialProblem(const RadialField& V, const SolveOptions& opts) : V_(V), model_(opts.model) {
    const RadialGrid& g = V.grid;
    const int m = g.m();
    const double h = g.h();
    // tridiagonal (K + s M) with K the P1 stiffness and M the lumped mass
    diag_ = opts.preconditioner_shift * g.weights();
    off_ = Eigen::ArrayXd::Zero(m - 1);
    for (int j = 0; j + 1 < m; ++j) {
      const double r0 = g.r(j), r1 = g.r(j + 1);
      const double c = (r1 * r1 * r1 - r0 * r0 * r0) / (3.0 * h * h);
      diag_[j] += c;
      diag_[j + 1] += c;
      off_[j] = -c;
    }
  }

  double dot(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) const {
    return 4.0 * std::numbers::pi * (V_.grid.weights() * a * b).sum();
  }

  Evaluation evaluate(const Eigen::ArrayXd& u, bool with_gradient) const {
    RadialPekarEvaluation ev = evaluate_radial_pekar(RadialField(V_.grid, u), V_, with_gradient, model_);
    return {ev.energy, std::move(ev.h_psi.values)};
  }

  // Thomas algorithm for (K + s M) x = M r.
  Eigen::ArrayXd precondition(const Eigen::ArrayXd& r) const {
    const int m = static_cast<int>(r.size());
    Eigen::ArrayXd rhs = V_.grid.weights() * r;
    Eigen::ArrayXd c(m), x(m);
    double denom = diag_[0];
    c[0] = m > 1 ? off_[0] / denom : 0.0;
    x[0] = rhs[0] / denom;
    for (int j = 1; j < m; ++j) {
      denom = diag_[j] - off_[j - 1] * c[j - 1];
      c[j] = j + 1 < m ? off_[j] / denom : 0.0;
      x[j] = (rhs[j] - off_[j - 1] * x[j - 1]) / denom;
    }
    for (int j = m - 2; j >= 0; --j) x[j] -= c[j] * x[j + 1];
    return x;
  }

  RadialField wrap(Eigen::ArrayXd u) const { return RadialField(V_.grid, std::move(u)); }

 private:
  const RadialField& V_;
  EnergyModel model_;
  Eigen::ArrayXd diag_;
  Eigen::ArrayXd off_;
};

void check_coercivity(const EnergyBreakdown& e, int iteration) {
  if (!std::isfinite(e.total) || e.total < 0.25 * e.kinetic - 10.0) {
    std::ostringstream os;
    os << "energy fell below the coercivity floor at iteration " << iteration << ": total=" << e.total
       << " kinetic=" << e.kinetic << " coulomb=" << e.coulomb << " potential=" << e.potential;
    throw DivergenceError(os.str());
  }
}

template <class Problem, class FieldT>
BasicMinimizerResult<FieldT> descend(Problem& problem, Eigen::ArrayXd u, const SolveOptions& opts) {
  opts.validate();
  BasicMinimizerResult<FieldT> out;

  auto unit = [&](Eigen::ArrayXd v) {
    const double nrm = std::sqrt(problem.dot(v, v));
    if (!(nrm > 0.0)) throw PekarError("degenerate normalization");
    v /= nrm;
    return v;
  };
  auto norm_defect = [&](const Eigen::ArrayXd& v) { return std::abs(std::sqrt(problem.dot(v, v)) - 1.0); };

  u = unit(std::move(u));
  Evaluation ev = problem.evaluate(u, true);
  check_coercivity(ev.energy, 0);
  out.history.push_back(ev.energy.total);
  out.norm_defects.push_back(norm_defect(u));

  double step = opts.initial_step;
  double last_drop = std::numeric_limits<double>::infinity();
  double mu = problem.dot(u, ev.h_psi);
  Eigen::ArrayXd res = ev.h_psi - mu * u;
  double rnorm = std::sqrt(problem.dot(res, res));
  out.stop_reason = "max_iters";

  for (int it = 0; it < opts.max_iters; ++it) {
    if (rnorm <= opts.tolerance_residual && last_drop <= opts.tolerance_energy) {
      out.converged = true;
      out.stop_reason = "tolerances met";
      break;
    }
    // Sobolev gradient projected onto the tangent space of the sphere
    const Eigen::ArrayXd pg = problem.precondition(ev.h_psi);
    const Eigen::ArrayXd pu = problem.precondition(u);
    const double lambda = problem.dot(u, pg) / problem.dot(u, pu);
    const Eigen::ArrayXd dir = -(pg - lambda * pu);
    const double slope = 2.0 * problem.dot(ev.h_psi, dir);
    if (!(slope < 0.0)) {
      out.stop_reason = "no descent direction";
      out.converged = rnorm <= opts.tolerance_residual;
      break;
    }

    bool accepted = false;
    double t = step;
    Eigen::ArrayXd trial;
    Evaluation trial_ev;
    for (int b = 0; b <= opts.max_backtracks; ++b, t *= opts.backtrack_factor) {
      trial = unit(u + t * dir);
      trial_ev = problem.evaluate(trial, true);
      if (trial_ev.energy.total <= ev.energy.total + opts.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // the energy cannot be decreased further at working precision
      out.stop_reason = "line search stalled";
      out.converged = rnorm <= opts.tolerance_residual;
      break;
    }
    check_coercivity(trial_ev.energy, it + 1);
    last_drop = ev.energy.total - trial_ev.energy.total;
    u = std::move(trial);
    ev = std::move(trial_ev);
    step = std::min(t * opts.step_growth, opts.max_step);
    ++out.iterations;
    out.history.push_back(ev.energy.total);
    out.norm_defects.push_back(norm_defect(u));
    mu = problem.dot(u, ev.h_psi);
    res = ev.h_psi - mu * u;
    rnorm = std::sqrt(problem.dot(res, res));
  }
  if (!out.converged && out.stop_reason == "max_iters" && opts.max_iters > 0 && rnorm <= opts.tolerance_residual &&
      last_drop <= opts.tolerance_energy) {
    out.converged = true;
    out.stop_reason = "tolerances met";
  }

  out.energy = ev.energy;
  out.residual = {rnorm, mu};
  out.psi = problem.wrap(std::move(u));
  return out;
}

Eigen::ArrayXd smooth_noise(const Grid3D& grid, std::uint64_t seed, double correlation_length) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::ArrayXd white(grid.size());
  for (Eigen::Index i = 0; i < white.size(); ++i) white[i] = normal(rng);
  auto& ws = spectral_workspace(grid);
  SpectralWorkspace::Spectrum s;
  ws.forward(white, s);
  s *= (-0.5 * correlation_length * correlation_length * ws.k2()).exp();
  Eigen::ArrayXd out;
  ws.inverse(s, out);
  const double scale = std::sqrt(out.square().mean());
  return scale > 0.0 ? Eigen::ArrayXd(out / scale) : out;
}

}  // namespace

Field3D make_seed(const SeedSpec& seed, const Grid3D& grid) {
  const double sigma = seed.gaussian_sigma;
  auto gaussian = [&](const Eigen::Vector3d& c) {
    if (!(sigma > 0.0)) throw PekarError("seed gaussian_sigma must be positive");
    return Field3D::from_function(grid, [&](const Eigen::Vector3d& x) {
      return std::exp(-(x - c).squaredNorm() / (4.0 * sigma * sigma));
    });
  };
  switch (seed.kind) {
    case SeedSpec::Kind::radial_gaussian:
      return gaussian(seed.center);
    case SeedSpec::Kind::translated_q:
      if (!seed.profile) throw PekarError("translated_q seed needs a radial profile");
      return place_radial(*seed.profile, grid, seed.center);
    case SeedSpec::Kind::random_perturbed: {
      Field3D base = seed.profile ? place_radial(*seed.profile, grid, seed.center) : gaussian(seed.center);
      base.values *= 1.0 + seed.perturbation * smooth_noise(grid, seed.rng_seed, 1.0);
      return base;
    }
    case SeedSpec::Kind::custom:
      if (!seed.custom) throw PekarError("custom seed needs a field");
      if (!(seed.custom->grid == grid)) throw PekarError("custom seed lives on a different grid");
      return *seed.custom;
  }
  throw PekarError("unknown seed kind");
}

RadialField make_radial_seed(const SeedSpec& seed, const RadialGrid& grid) {
  const double sigma = seed.gaussian_sigma;
  switch (seed.kind) {
    case SeedSpec::Kind::custom:
    case SeedSpec::Kind::translated_q:
      if (seed.profile && seed.profile->grid == grid) return *seed.profile;
      if (seed.profile)
        return RadialField::from_function(grid, [&](double r) { return evaluate_radial_cubic(*seed.profile, r); });
      throw PekarError("radial seed needs a profile");
    case SeedSpec::Kind::random_perturbed: {
      std::mt19937_64 rng(seed.rng_seed);
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      const double p1 = phase(rng), p2 = phase(rng);
      return RadialField::from_function(grid, [&](double r) {
        const double g = std::exp(-r * r / (4.0 * sigma * sigma));
        return g * (1.0 + seed.perturbation * (std::sin(0.7 * r + p1) + 0.5 * std::sin(1.9 * r + p2)));
      });
    }
    case SeedSpec::Kind::radial_gaussian:
      break;
  }
  if (!(sigma > 0.0)) throw PekarError("seed gaussian_sigma must be positive");
  const double c = seed.center.norm();
  return RadialField::from_function(grid, [&](double r) {
    return std::exp(-(r - c) * (r - c) / (4.0 * sigma * sigma));
  });
}

MinimizerResult minimize(const Field3D& V, const SolveOptions& opts) {
  if (!V.values.allFinite()) throw PekarError("minimize: potential is not finite");
  GridProblem problem(V, opts);
  return descend<GridProblem, Field3D>(problem, make_seed(opts.seed, V.grid).values, opts);
}

RadialMinimizerResult minimize_radial(const RadialField& V, const SolveOptions& opts) {
  if (!V.values.allFinite()) throw PekarError("minimize_radial: potential is not finite");
  RadialProblem problem(V, opts);
  return descend<RadialProblem, RadialField>(problem, make_radial_seed(opts.seed, V.grid).values, opts);
}

RadialMinimizerResult solve_free(const RadialGrid& grid, SolveOptions opts) {
  return minimize_radial(RadialField(grid), opts);
}

Field3D place_radial(const RadialField& Q, const Grid3D& grid, const Eigen::Vector3d& center) {
  return Field3D::from_function(grid, [&](const Eigen::Vector3d& x) {
    return evaluate_radial_cubic(Q, (x - center).norm());
  });
}

Eigen::Vector3d well_center(double R) { return {0.5 * (R + 2.0), 0.0, 0.0}; }

Field3D translate_seed(const RadialField& Q, double R, const Grid3D& grid) {
  Field3D f = place_radial(Q, grid, well_center(R));
  const double lattice_mass = inner(f, f);
  const double radial_mass_value = radial_norm_squared(Q);
  if (std::abs(lattice_mass - radial_mass_value) > 2e-2 * radial_mass_value)
    throw PekarError("translate_seed: translated profile does not fit in the box (lattice mass " +
                     std::to_string(lattice_mass) + ")");
  return normalize(f);
}

}  // namespace pekar
