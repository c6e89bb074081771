#include "pekar/runner.hpp"

#include "pekar/experiments.hpp"
#include "pekar/field_core.hpp"
#include "pekar/pekar_energy.hpp"
#include "pekar/product_ansatz.hpp"
#include "pekar/snapshot_io.hpp"

#include <Eigen/Core>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>

namespace pekar {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "1.0.0";

json energy_json(const EnergyBreakdown& e) {
  return {{"kinetic", e.kinetic}, {"coulomb", e.coulomb}, {"potential", e.potential}, {"total", e.total}};
}

json vec_json(const Eigen::Vector3d& v) { return json::array({v[0], v[1], v[2]}); }

std::string fmt(double x) { return format_double(x); }

class Run {
 public:
  Run(const ExperimentConfig& cfg, bool strict, std::ostream& log)
      : cfg_(cfg), strict_(strict), log_(log), hash_(config_hash(cfg)), dir_(cfg.output_dir) {
    fs::create_directories(dir_);
  }

  RunSummary execute() {
    const auto t0 = std::chrono::steady_clock::now();
    switch (cfg_.experiment) {
      case ExperimentKind::solve_free: solve_free_experiment(); break;
      case ExperimentKind::solve_radial: solve_radial_experiment(); break;
      case ExperimentKind::solve_full: solve_full_experiment(); break;
      case ExperimentKind::sweep_R: sweep_experiment(); break;
      case ExperimentKind::perturb: perturb_experiment(); break;
      case ExperimentKind::product_energy: product_experiment(); break;
      case ExperimentKind::orbit: orbit_experiment(); break;
    }
    summary_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary_.exit_code = (strict_ && !summary_.all_converged) ? exit_not_converged : exit_ok;
    write_manifest();
    return summary_;
  }

 private:
  std::string path(const std::string& name) {
    summary_.artifacts.push_back(name);
    return (dir_ / name).string();
  }

  void write_json(const std::string& name, json j) {
    j["config_hash"] = hash_;
    std::ofstream out(path(name));
    if (!out) throw PekarError("cannot write " + name);
    out << std::setw(2) << j << '\n';
  }

  void note_convergence(bool converged, const std::string& what) {
    if (!converged) {
      summary_.all_converged = false;
      log_ << "warning: " << what << " did not converge\n";
    }
  }

  const FreeProblem& free_problem() {
    if (!free_) {
      SolveOptions o = cfg_.solver;
      o.seed = SeedSpec{};
      free_ = solve_free_problem(cfg_.make_radial_grid(), o);
      note_convergence(free_->converged, "free radial solve");
      log_ << "e(0) = " << fmt(free_->e0()) << '\n';
    }
    return *free_;
  }

  // Seed for a 3D solve with potential V: translated Q in the annular well
  // unless the config names a seed.
  SolveOptions full_options(const Grid3D& grid) {
    SolveOptions o = cfg_.solver;
    const bool annular = cfg_.potential && cfg_.potential->kind == PotentialSpec::Kind::annular;
    if (!cfg_.has_seed && annular) {
      o.seed.kind = SeedSpec::Kind::custom;
      o.seed.custom = std::make_shared<Field3D>(translate_seed(free_problem().Q, cfg_.potential->R, grid));
    } else if (o.seed.kind == SeedSpec::Kind::translated_q) {
      o.seed.profile = std::make_shared<RadialField>(free_problem().Q);
      if (annular && o.seed.center.isZero()) o.seed.center = well_center(cfg_.potential->R);
    }
    return o;
  }

  MinimizerResult solve_full(const Field3D& V) {
    MinimizerResult r = minimize(V, full_options(V.grid));
    note_convergence(r.converged, "3D solve");
    log_ << "3D energy = " << fmt(r.energy.total) << " after " << r.iterations << " iterations (" << r.stop_reason << ")\n";
    return r;
  }

  json minimizer_json(const MinimizerResult& r) {
    const Field3D rho = density(r.psi);
    json j{{"energy", energy_json(r.energy)},
           {"residual", r.residual.residual_norm},
           {"multiplier", r.residual.multiplier},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"stop_reason", r.stop_reason},
           {"center_of_mass", vec_json(center_of_mass(rho))},
           {"anisotropy", center_of_mass(rho).norm()}};
    if (cfg_.potential && cfg_.potential->kind == PotentialSpec::Kind::annular)
      j["well_mass"] = mass_in_well(rho, cfg_.potential->R);
    return j;
  }

  void write_history(const std::string& name, const MinimizerResult& r) {
    CsvWriter csv(path(name));
    csv.header({"iteration", "energy", "norm_defect", "config_hash"});
    for (std::size_t i = 0; i < r.history.size(); ++i)
      csv.row({std::to_string(i), fmt(r.history[i]), fmt(r.norm_defects[i]), hash_});
  }

  void write_energy_row(const std::string& name, const EnergyBreakdown& e) {
    CsvWriter csv(path(name));
    csv.header({"kinetic", "coulomb", "potential", "total", "config_hash"});
    csv.row({fmt(e.kinetic), fmt(e.coulomb), fmt(e.potential), fmt(e.total), hash_});
  }

  // -------------------------------------------------------------------------

  void solve_free_experiment() {
    SolveOptions o = cfg_.solver;
    if (o.seed.kind != SeedSpec::Kind::radial_gaussian && o.seed.kind != SeedSpec::Kind::random_perturbed) o.seed = SeedSpec{};
    const RadialMinimizerResult r = solve_free(cfg_.make_radial_grid(), o);
    note_convergence(r.converged, "free radial solve");
    const double h1 = radial_h1_norm(r.psi);
    json j{{"e0", r.energy.total},
           {"energy", energy_json(r.energy)},
           {"virial_defect", std::abs(r.energy.coulomb - 2.0 * r.energy.kinetic) / r.energy.coulomb},
           {"multiplier", r.residual.multiplier},
           {"residual", r.residual.residual_norm},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"h1_norm", h1},
           {"strauss_margin", strauss_bound_check(r.psi, h1)},
           {"radial_grid", {{"m", cfg_.radial_grid.m}, {"r_max", cfg_.radial_grid.r_max}}}};
    log_ << "e(0) = " << fmt(r.energy.total) << '\n';
    write_radial_csv(path("q_profile.csv"), r.psi);

    if (cfg_.has_grid) {
      const Grid3D grid = cfg_.make_grid();
      SolveOptions o3 = cfg_.solver;
      const MinimizerResult full = minimize(Field3D(grid), o3);
      note_convergence(full.converged, "free 3D solve");
      json f = minimizer_json(full);
      f["relative_difference"] = std::abs(r.energy.total - full.energy.total) / std::abs(r.energy.total);
      f["grid"] = {{"n", grid.n()}, {"L", grid.L()}};
      j["full_3d"] = f;
      log_ << "e(0) on the 3D grid = " << fmt(full.energy.total) << '\n';
    }
    write_json("free.json", j);
  }

  void solve_radial_experiment() {
    const RadialGrid rg = cfg_.make_radial_grid();
    SolveOptions o = cfg_.solver;
    if (o.seed.kind == SeedSpec::Kind::translated_q) o.seed.profile = std::make_shared<RadialField>(free_problem().Q);
    const RadialMinimizerResult r = minimize_radial(build_radial_potential(*cfg_.potential, rg), o);
    note_convergence(r.converged, "radial solve");
    const double h1 = radial_h1_norm(r.psi);
    write_radial_csv(path("radial_profile.csv"), r.psi);
    write_json("radial.json", {{"potential", cfg_.potential->describe()},
                               {"energy", energy_json(r.energy)},
                               {"residual", r.residual.residual_norm},
                               {"multiplier", r.residual.multiplier},
                               {"iterations", r.iterations},
                               {"converged", r.converged},
                               {"h1_norm", h1},
                               {"strauss_margin", strauss_bound_check(r.psi, h1)}});
  }

  void solve_full_experiment() {
    const Grid3D grid = cfg_.make_grid();
    const Field3D V = build_potential(*cfg_.potential, grid);
    const MinimizerResult r = solve_full(V);
    write_field_binary(path("psi.bin"), r.psi);
    write_field_binary(path("potential.bin"), V);
    write_energy_row("energy.csv", r.energy);
    write_history("history.csv", r);
    json j = minimizer_json(r);
    j["potential"] = cfg_.potential->describe();
    write_json("full.json", j);
  }

  void sweep_experiment() {
    SweepOptions so;
    so.grid = cfg_.make_grid();
    so.radial = cfg_.make_radial_grid();
    so.solve = cfg_.solver;
    so.workers = cfg_.workers;
    so.keep_fields = true;
    const std::vector<SweepRow> rows = sweep_R(cfg_.R_list, free_problem(), so);
    CsvWriter csv(path("sweep.csv"));
    csv.header({"R", "e_full", "e_rad", "trial_bound", "gap", "well_mass", "anisotropy", "residual_full",
                "residual_rad", "iterations_full", "converged", "note", "config_hash"});
    for (const SweepRow& r : rows) {
      note_convergence(r.converged, "sweep row R=" + fmt(r.R));
      csv.row({fmt(r.R), fmt(r.e_full), fmt(r.e_rad), fmt(r.trial_bound), fmt(r.gap), fmt(r.well_mass),
               fmt(r.anisotropy), fmt(r.residual_full), fmt(r.residual_rad), std::to_string(r.iterations_full),
               r.converged ? "1" : "0", r.note, hash_});
      if (r.full) write_field_binary(path("psi_R" + fmt(r.R) + ".bin"), r.full->psi);
      log_ << "R=" << fmt(r.R) << " e_full=" << fmt(r.e_full) << " e_rad=" << fmt(r.e_rad) << " gap=" << fmt(r.gap)
           << (r.note.empty() ? "" : " [" + r.note + "]") << '\n';
    }
  }

  void perturb_experiment() {
    const Grid3D grid = cfg_.make_grid();
    const MinimizerResult base = solve_full(build_potential(*cfg_.potential, grid));
    const DerivativeReport rep = fd_derivative(*cfg_.potential, *cfg_.perturbation, base, cfg_.deltas, cfg_.solver, cfg_.workers);
    note_convergence(rep.converged, "perturbed solves");
    CsvWriter csv(path("derivative.csv"));
    csv.header({"delta", "e_plus", "e_minus", "central", "forward", "backward", "config_hash"});
    for (std::size_t i = 0; i < rep.deltas.size(); ++i)
      csv.row({fmt(rep.deltas[i]), fmt(rep.e_plus[i]), fmt(rep.e_minus[i]), fmt(rep.central[i]), fmt(rep.forward[i]),
               fmt(rep.backward[i]), hash_});
    write_json("derivative.json", {{"V", rep.V_description},
                                   {"Z", rep.Z_description},
                                   {"e_base", rep.e_base},
                                   {"pairing", rep.pairing},
                                   {"richardson", rep.richardson},
                                   {"defect", rep.defect},
                                   {"relative_defect", rep.pairing != 0.0 ? rep.defect / std::abs(rep.pairing) : rep.defect},
                                   {"bracketed", rep.bracketed},
                                   {"converged", rep.converged}});
    log_ << "derivative " << fmt(rep.richardson) << " vs -pairing " << fmt(-rep.pairing) << '\n';
  }

  void product_experiment() {
    const Grid3D grid = cfg_.make_grid();
    const PotentialSpec Vspec = cfg_.potential.value_or(PotentialSpec::constant_value(0.0));
    const Field3D V = build_potential(Vspec, grid);
    Field3D psi;
    if (cfg_.potential) {
      psi = solve_full(V).psi;
    } else {
      psi = normalize(place_radial(free_problem().Q, grid, Eigen::Vector3d::Zero()));
    }
    const KGrid kgrid(cfg_.kgrid.n_k, cfg_.kgrid.k_max);
    const KField rho_hat = density_fourier(density(psi), kgrid);
    const PhononDisplacement z = optimal_displacement(rho_hat, cfg_.alpha);
    const ProductEnergy pe = product_energy(psi, z, V, rho_hat);
    const EnergyBreakdown pekar = pekar_energy(psi, V);
    write_displacement_csv(path("displacement.csv"), z);

    json j{{"alpha", cfg_.alpha},
           {"kgrid", {{"n_k", kgrid.n_k()}, {"k_max", kgrid.k_max()}, {"dk", kgrid.dk()}}},
           {"product",
            {{"kinetic", pe.kinetic}, {"potential", pe.potential}, {"field", pe.field}, {"coupling", pe.coupling}, {"total", pe.total}}},
           {"pekar", energy_json(pekar)},
           {"phonon_minus_coulomb", (pe.field - pe.coupling) / cfg_.alpha + pekar.coulomb}};
    try {
      const ScalingCheck sc = alpha_scaling_check(psi, cfg_.alpha, Vspec, kgrid);
      j["scaling"] = {{"product", sc.product}, {"alpha2_pekar", cfg_.alpha * cfg_.alpha * sc.pekar}, {"defect", sc.defect}};
    } catch (const PekarError& e) {
      j["scaling"] = {{"error", e.what()}};
    }
    write_json("product.json", j);
  }

  void orbit_experiment() {
    const Grid3D grid = cfg_.make_grid();
    const Field3D V = build_potential(*cfg_.potential, grid);
    OrbitOptions o;
    o.solve = cfg_.solver;
    o.seed_radius = cfg_.seed_radius;
    if (o.seed_radius == 0.0 && cfg_.potential->kind == PotentialSpec::Kind::annular)
      o.seed_radius = well_center(cfg_.potential->R).norm();
    o.recenter = cfg_.recenter;
    o.rng_seed = cfg_.rng_seed;
    o.workers = cfg_.workers;
    const OrbitReport rep = rotation_orbit_evidence(V, free_problem(), cfg_.n_seeds, o);
    CsvWriter csv(path("orbit.csv"));
    csv.header({"seed", "dir_x", "dir_y", "dir_z", "energy", "converged", "config_hash"});
    for (std::size_t i = 0; i < rep.energies.size(); ++i) {
      note_convergence(rep.converged[i], "orbit seed " + std::to_string(i));
      const Eigen::Vector3d& d = rep.directions[i];
      csv.row({std::to_string(i), fmt(d[0]), fmt(d[1]), fmt(d[2]), fmt(rep.energies[i]), rep.converged[i] ? "1" : "0", hash_});
    }
    CsvWriter prof(path("orbit_profiles.csv"));
    std::vector<std::string> head{"r"};
    for (std::size_t i = 0; i < rep.profiles.size(); ++i) head.push_back("seed" + std::to_string(i));
    prof.header(head);
    const RadialGrid& rg = rep.profiles.front().grid;
    for (int k = 0; k < rg.m(); ++k) {
      std::vector<std::string> row{fmt(rg.r(k))};
      for (const auto& p : rep.profiles) row.push_back(fmt(p.values[k]));
      prof.row(row);
    }
    write_json("orbit.json", {{"n_seeds", cfg_.n_seeds},
                              {"seed_radius", o.seed_radius},
                              {"recenter", o.recenter},
                              {"max_energy_spread", rep.max_energy_spread},
                              {"max_profile_defect", rep.max_profile_defect}});
  }

  void write_manifest() {
    json j{{"tool", "pekar"},
           {"versions", {{"pekar", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                       std::to_string(EIGEN_MINOR_VERSION)}}},
           {"experiment", to_string(cfg_.experiment)},
           {"config", json::parse(cfg_.canonical)},
           {"seed", cfg_.rng_seed},
           {"workers", cfg_.workers},
           {"strict", strict_},
           {"radial_grid", {{"m", cfg_.radial_grid.m}, {"r_max", cfg_.radial_grid.r_max}}},
           {"tolerances", {{"energy", cfg_.solver.tolerance_energy}, {"residual", cfg_.solver.tolerance_residual}}},
           {"wall_seconds", summary_.wall_seconds},
           {"all_converged", summary_.all_converged},
           {"exit_code", summary_.exit_code}};
    if (cfg_.has_grid) j["grid"] = {{"n", cfg_.grid.n}, {"L", cfg_.grid.L}, {"dx", cfg_.grid.L / cfg_.grid.n}};
    j["artifacts"] = summary_.artifacts;
    write_json("manifest.json", j);
    summary_.artifacts.push_back("manifest.json");
  }

  const ExperimentConfig& cfg_;
  bool strict_;
  std::ostream& log_;
  std::string hash_;
  fs::path dir_;
  std::optional<FreeProblem> free_;
  RunSummary summary_;
};

}  // namespace

RunSummary run_experiment(const ExperimentConfig& cfg, bool strict, std::ostream& log) {
  return Run(cfg, strict, log).execute();
}

void describe_config(const ExperimentConfig& cfg, std::ostream& out) {
  validate_config(cfg);
  const ConfigEstimates e = estimate(cfg);
  out << "ok\n";
  out << "experiment: " << to_string(cfg.experiment) << '\n';
  out << "config hash: " << config_hash(cfg) << '\n';
  if (cfg.has_grid) out << "dx: " << fmt(e.dx) << " (n=" << cfg.grid.n << ", L=" << fmt(cfg.grid.L) << ")\n";
  out << "radial h: " << fmt(e.radial_h) << '\n';
  if (cfg.experiment == ExperimentKind::product_energy)
    out << "dk: " << fmt(e.dk) << ", Brillouin zone pi/dx: " << fmt(e.brillouin_zone) << '\n';
  out << "memory estimate: " << std::fixed << std::setprecision(1) << e.memory_bytes / (1024.0 * 1024.0) << " MiB\n";
  out.unsetf(std::ios::floatfield);
  if (e.potential_margin) out << "potential support margin to box face: " << fmt(*e.potential_margin) << '\n';
  if (e.seed_margin) out << "seed center margin to box face: " << fmt(*e.seed_margin) << '\n';
}

}  // namespace pekar
