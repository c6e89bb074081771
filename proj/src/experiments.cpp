#include "pekar/experiments.hpp"

#include "pekar/field_core.hpp"
#include "pekar/pekar_energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

namespace pekar {

void parallel_for(int count, int workers, const std::function<void(int)>& job) {
  if (count <= 0) return;
  const int threads = std::clamp(workers, 1, count);
  if (threads == 1) {
    for (int i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

FreeProblem solve_free_problem(const RadialGrid& grid, const SolveOptions& opts) {
  RadialMinimizerResult r = solve_free(grid, opts);
  return {std::move(r.psi), r.energy, r.converged};
}

double trial_upper_bound(double R, const FreeProblem& free, const Grid3D& grid, double strength) {
  const Field3D QR = translate_seed(free.Q, R, grid);
  return free.e0() - potential_energy(build_VR(R, grid, strength), density(QR));
}

namespace {

SweepRow sweep_row(double R, const FreeProblem& free, const SweepOptions& opts) {
  SweepRow row;
  row.R = R;
  std::vector<std::string> notes;
  try {
    const Field3D V = build_VR(R, opts.grid, opts.strength);
    row.trial_bound = trial_upper_bound(R, free, opts.grid, opts.strength);

    SolveOptions full_opts = opts.solve;
    full_opts.seed.kind = SeedSpec::Kind::custom;
    full_opts.seed.custom = std::make_shared<Field3D>(translate_seed(free.Q, R, opts.grid));
    auto full = std::make_shared<MinimizerResult>(minimize(V, full_opts));

    const RadialField Vr = build_radial_potential(PotentialSpec::annular(R, opts.strength), opts.radial);
    std::shared_ptr<RadialMinimizerResult> best;
    auto consider = [&](SolveOptions ro) {
      auto r = std::make_shared<RadialMinimizerResult>(minimize_radial(Vr, ro));
      if (!r->converged) notes.push_back("a radial seed did not converge");
      if (!best || r->energy.total < best->energy.total) best = r;
    };
    SolveOptions ro = opts.solve;
    ro.seed = SeedSpec{};
    ro.seed.kind = SeedSpec::Kind::translated_q;
    ro.seed.profile = std::make_shared<RadialField>(free.Q);
    consider(ro);
    for (double c : opts.radial_seed_centers) {
      ro.seed = SeedSpec{};
      ro.seed.kind = SeedSpec::Kind::radial_gaussian;
      ro.seed.gaussian_sigma = 1.5;
      ro.seed.center = Eigen::Vector3d(c, 0.0, 0.0);
      consider(ro);
    }

    const Field3D rho = density(full->psi);
    row.e_full = full->energy.total;
    row.e_rad = best->energy.total;
    row.gap = row.e_rad - row.e_full;
    row.well_mass = mass_in_well(rho, R);
    row.anisotropy = center_of_mass(rho).norm();
    row.residual_full = full->residual.residual_norm;
    row.residual_rad = best->residual.residual_norm;
    row.iterations_full = full->iterations;
    row.converged = full->converged && best->converged;
    if (!full->converged) notes.push_back("full solve did not converge (" + full->stop_reason + ")");
    if (opts.keep_fields) {
      row.full = full;
      row.radial = best;
    }
  } catch (const PekarError& e) {
    row.converged = false;
    notes.push_back(e.what());
  }
  for (std::size_t i = 0; i < notes.size(); ++i) row.note += (i ? "; " : "") + notes[i];
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_R(const std::vector<double>& R_list, const FreeProblem& free, const SweepOptions& opts) {
  opts.solve.validate();
  std::vector<SweepRow> rows(R_list.size());
  parallel_for(static_cast<int>(R_list.size()), opts.workers,
               [&](int i) { rows[i] = sweep_row(R_list[i], free, opts); });
  return rows;
}

// ---------------------------------------------------------------------------

PerturbedSolve perturbed_energy(const Field3D& V, const Field3D& Z, double delta, const Field3D& start,
                                const SolveOptions& opts) {
  if (!(V.grid == Z.grid) || !(V.grid == start.grid)) throw PekarError("perturbed_energy: fields live on different grids");
  SolveOptions o = opts;
  o.seed = SeedSpec{};
  o.seed.kind = SeedSpec::Kind::custom;
  o.seed.custom = std::make_shared<Field3D>(start);
  const MinimizerResult r = minimize(Field3D(V.grid, V.values + delta * Z.values), o);
  return {delta, r.energy, r.converged, r.iterations};
}

double richardson_extrapolate(const std::vector<double>& estimates) {
  if (estimates.empty()) throw PekarError("richardson_extrapolate: no estimates");
  std::vector<double> t = estimates;
  double factor = 4.0;
  for (std::size_t level = 1; level < estimates.size(); ++level, factor *= 4.0)
    for (std::size_t i = 0; i + level < estimates.size(); ++i) t[i] = (factor * t[i + 1] - t[i]) / (factor - 1.0);
  return t[0];
}

DerivativeReport fd_derivative(const PotentialSpec& Vspec, const PotentialSpec& Zspec, const MinimizerResult& u_V,
                               const std::vector<double>& deltas, const SolveOptions& opts, int workers) {
  Vspec.validate();
  Zspec.validate();
  if (!Zspec.is_radial()) throw PekarError("fd_derivative: the perturbation Z must be radial");
  if (deltas.empty()) throw PekarError("fd_derivative: empty delta schedule");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw PekarError("fd_derivative: deltas must be positive");
    if (i > 0 && !(deltas[i] < deltas[i - 1])) throw PekarError("fd_derivative: deltas must decrease");
  }

  const Grid3D& g = u_V.psi.grid;
  const Field3D V = build_potential(Vspec, g);
  const Field3D Z = build_potential(Zspec, g);

  DerivativeReport rep;
  rep.V_description = Vspec.describe();
  rep.Z_description = Zspec.describe();
  rep.deltas = deltas;
  rep.e_base = u_V.energy.total;
  rep.pairing = potential_energy(Z, density(u_V.psi));
  rep.converged = u_V.converged;
  rep.bracketed = true;

  const std::size_t count = deltas.size();
  rep.e_plus.assign(count, 0.0);
  rep.e_minus.assign(count, 0.0);
  std::vector<char> ok(2 * count, 0);
  parallel_for(static_cast<int>(2 * count), workers, [&](int job) {
    const std::size_t i = job / 2;
    const double d = (job % 2 == 0) ? deltas[i] : -deltas[i];
    const PerturbedSolve s = perturbed_energy(V, Z, d, u_V.psi, opts);
    (job % 2 == 0 ? rep.e_plus : rep.e_minus)[i] = s.energy.total;
    ok[job] = s.converged;
  });
  for (char b : ok) rep.converged = rep.converged && b;

  for (std::size_t i = 0; i < count; ++i) {
    const double d = deltas[i];
    rep.central.push_back((rep.e_plus[i] - rep.e_minus[i]) / (2.0 * d));
    rep.forward.push_back((rep.e_plus[i] - rep.e_base) / d);
    rep.backward.push_back((rep.e_base - rep.e_minus[i]) / d);
    if (!(rep.forward[i] <= rep.central[i] && rep.central[i] <= rep.backward[i])) rep.bracketed = false;
  }
  rep.richardson = richardson_extrapolate(rep.central);
  rep.defect = std::abs(rep.richardson + rep.pairing);
  return rep;
}

// ---------------------------------------------------------------------------

RotationalDefects rotational_density_check(const Field3D& u, const Field3D& W, const SphereAverageOptions& opts) {
  if (!(u.grid == W.grid)) throw PekarError("rotational_density_check: fields live on different grids");
  SphereAverageOptions o = opts;
  o.center = Eigen::Vector3d::Zero();
  const RadialGrid rg = covering_radial_grid(u.grid);
  const Field3D rho = density(u);
  const Field3D rho_avg = lift_radial(spherical_average(rho, rg, o).profile, u.grid);
  const Field3D W_avg = lift_radial(spherical_average(W, rg, o).profile, u.grid);
  const double dv = u.grid.cell_volume();
  const double a = (rho_avg.values * W.values).sum() * dv;
  const double b = (rho.values * W_avg.values).sum() * dv;
  const double c = (rho_avg.values * W_avg.values).sum() * dv;
  return {std::abs(a - b), std::abs(b - c)};
}

OrbitReport rotation_orbit_evidence(const Field3D& V, const FreeProblem& free, int n_seeds, const OrbitOptions& opts) {
  if (n_seeds < 1) throw PekarError("rotation_orbit_evidence: need at least one seed");
  opts.solve.validate();
  OrbitReport rep;
  std::mt19937_64 rng(opts.rng_seed);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n_seeds; ++i) {
    Eigen::Vector3d d(normal(rng), normal(rng), normal(rng));
    rep.directions.push_back(d.normalized());
  }
  rep.energies.assign(n_seeds, 0.0);
  rep.converged.assign(n_seeds, false);
  rep.profiles.assign(n_seeds, RadialField());

  const RadialGrid rg = covering_radial_grid(V.grid);
  parallel_for(n_seeds, opts.workers, [&](int i) {
    SolveOptions o = opts.solve;
    o.seed = SeedSpec{};
    o.seed.kind = SeedSpec::Kind::translated_q;
    o.seed.profile = std::make_shared<RadialField>(free.Q);
    o.seed.center = opts.seed_radius * rep.directions[i];
    const MinimizerResult r = minimize(V, o);
    const Field3D rho = density(r.psi);
    SphereAverageOptions so;
    if (opts.recenter) so.center = center_of_mass(rho);
    rep.energies[i] = r.energy.total;
    rep.converged[i] = r.converged;
    rep.profiles[i] = spherical_average(rho, rg, so).profile;
  });

  const auto [lo, hi] = std::minmax_element(rep.energies.begin(), rep.energies.end());
  rep.max_energy_spread = (*hi - *lo) / std::abs(*lo);
  // Compare profiles where the averaging spheres stay inside the box.
  const double r_in = 0.5 * V.grid.L();
  for (int i = 0; i < n_seeds; ++i)
    for (int j = i + 1; j < n_seeds; ++j) {
      double diff = 0.0, peak = 0.0;
      for (int k = 0; k < rg.m() && rg.r(k) <= r_in; ++k) {
        diff = std::max(diff, std::abs(rep.profiles[i].values[k] - rep.profiles[j].values[k]));
        peak = std::max(peak, std::abs(rep.profiles[i].values[k]));
      }
      rep.max_profile_defect = std::max(rep.max_profile_defect, peak > 0.0 ? diff / peak : diff);
    }
  return rep;
}

}  // namespace pekar
