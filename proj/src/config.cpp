#include "pekar/config.hpp"

#include "pekar/snapshot_io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace pekar {

using nlohmann::json;

namespace {

const std::map<std::string, ExperimentKind>& experiment_names() {
  static const std::map<std::string, ExperimentKind> names{
      {"solve-free", ExperimentKind::solve_free},   {"solve-radial", ExperimentKind::solve_radial},
      {"solve-full", ExperimentKind::solve_full},   {"sweep-R", ExperimentKind::sweep_R},
      {"perturb", ExperimentKind::perturb},         {"product-energy", ExperimentKind::product_energy},
      {"orbit", ExperimentKind::orbit}};
  return names;
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Typed access to one JSON object that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    if (!j_.contains(key)) throw ConfigError("missing field " + join(path_, key));
    return j_.at(key);
  }

  Section section(const std::string& key) { return Section(raw(key), join(path_, key)); }

  double number(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(join(path_, key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(path_, key) + ": must be finite");
    return d;
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : (seen_.insert(key), fallback); }

  long long integer(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(join(path_, key) + ": expected an integer");
    return v.get<long long>();
  }
  long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_unsigned()) throw ConfigError(join(path_, key) + ": expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(join(path_, key) + ": expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(join(path_, key) + ": expected a string");
    return v.get<std::string>();
  }
  std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

  std::vector<double> numbers(const std::string& key) {
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(join(path_, key) + ": expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(join(path_, key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError("unknown field " + join(path_, it.key()));
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

PotentialSpec parse_potential(Section s) {
  const std::string kind = s.string("kind");
  PotentialSpec p;
  if (kind == "annular") {
    p = PotentialSpec::annular(s.number("R"), s.number("strength", 1.0));
  } else if (kind == "radial_bump") {
    p = PotentialSpec::bump(s.number("center"), s.number("half_width"), s.number("amplitude", 1.0));
  } else if (kind == "constant") {
    p = PotentialSpec::constant_value(s.number("value"));
  } else if (kind == "coordinate_square") {
    p = PotentialSpec::coordinate_square(static_cast<int>(s.integer("axis", 0)));
  } else if (kind == "snapshot") {
    const std::string path = s.string("path");
    try {
      p = PotentialSpec::general(read_field_binary(path));
    } catch (const PekarError& e) {
      throw ConfigError(s.where() + ".path: " + e.what());
    }
  } else {
    throw ConfigError(s.where() + ".kind: unknown potential kind '" + kind + "'");
  }
  s.finish();
  return p;
}

SeedSpec parse_seed(Section s) {
  SeedSpec seed;
  const std::string kind = s.string("kind", "radial_gaussian");
  if (kind == "radial_gaussian") seed.kind = SeedSpec::Kind::radial_gaussian;
  else if (kind == "random_perturbed") seed.kind = SeedSpec::Kind::random_perturbed;
  else if (kind == "translated_q") seed.kind = SeedSpec::Kind::translated_q;
  else throw ConfigError(s.where() + ".kind: unknown seed kind '" + kind + "'");
  seed.gaussian_sigma = s.number("sigma", seed.gaussian_sigma);
  seed.perturbation = s.number("perturbation", seed.perturbation);
  if (s.has("center")) {
    const auto c = s.numbers("center");
    if (c.size() != 3) throw ConfigError(s.where() + ".center: expected three numbers");
    seed.center = Eigen::Vector3d(c[0], c[1], c[2]);
  }
  s.finish();
  return seed;
}

SolveOptions parse_solver(Section s) {
  SolveOptions o;
  o.max_iters = static_cast<int>(s.integer("max_iters", o.max_iters));
  o.initial_step = s.number("initial_step", o.initial_step);
  o.max_step = s.number("max_step", o.max_step);
  o.step_growth = s.number("step_growth", o.step_growth);
  o.tolerance_energy = s.number("tolerance_energy", o.tolerance_energy);
  o.tolerance_residual = s.number("tolerance_residual", o.tolerance_residual);
  o.armijo_c1 = s.number("armijo_c1", o.armijo_c1);
  o.backtrack_factor = s.number("backtrack_factor", o.backtrack_factor);
  o.max_backtracks = static_cast<int>(s.integer("max_backtracks", o.max_backtracks));
  o.preconditioner_shift = s.number("preconditioner_shift", o.preconditioner_shift);
  o.model.coulomb = s.boolean("coulomb", true);
  if (s.has("seed")) o.seed = parse_seed(s.section("seed"));
  s.finish();
  return o;
}

bool needs_grid(ExperimentKind k) {
  return k == ExperimentKind::solve_full || k == ExperimentKind::sweep_R || k == ExperimentKind::perturb ||
         k == ExperimentKind::product_energy || k == ExperimentKind::orbit;
}

bool needs_potential(ExperimentKind k) {
  return k == ExperimentKind::solve_radial || k == ExperimentKind::solve_full || k == ExperimentKind::perturb ||
         k == ExperimentKind::orbit;
}

ExperimentConfig parse_document(const json& doc) {
  ExperimentConfig cfg;
  Section top(doc, "");
  const std::string name = top.string("experiment");
  const auto it = experiment_names().find(name);
  if (it == experiment_names().end()) throw ConfigError("experiment: unknown experiment '" + name + "'");
  cfg.experiment = it->second;

  if (needs_grid(cfg.experiment) || top.has("grid")) {
    Section g = top.section("grid");
    cfg.grid.n = static_cast<int>(g.integer("n"));
    cfg.grid.L = g.number("L");
    g.finish();
    cfg.has_grid = true;
  }
  if (top.has("radial_grid")) {
    Section r = top.section("radial_grid");
    cfg.radial_grid.m = static_cast<int>(r.integer("m", cfg.radial_grid.m));
    cfg.radial_grid.r_max = r.number("r_max", cfg.radial_grid.r_max);
    r.finish();
  }
  if (cfg.experiment == ExperimentKind::product_energy || top.has("kgrid")) {
    Section k = top.section("kgrid");
    cfg.kgrid.n_k = static_cast<int>(k.integer("n_k"));
    cfg.kgrid.k_max = k.number("k_max");
    k.finish();
  }
  if (needs_potential(cfg.experiment) || top.has("potential")) cfg.potential = parse_potential(top.section("potential"));
  if (top.has("solver")) {
    cfg.has_seed = doc.at("solver").is_object() && doc.at("solver").contains("seed");
    cfg.solver = parse_solver(top.section("solver"));
  }

  if (cfg.experiment == ExperimentKind::sweep_R || top.has("sweep")) {
    Section s = top.section("sweep");
    cfg.R_list = s.numbers("R_list");
    s.finish();
  }
  if (cfg.experiment == ExperimentKind::perturb || top.has("perturb")) {
    Section s = top.section("perturb");
    cfg.perturbation = parse_potential(s.section("Z"));
    if (s.has("deltas")) cfg.deltas = s.numbers("deltas");
    s.finish();
  }
  if (top.has("product")) {
    Section s = top.section("product");
    cfg.alpha = s.number("alpha", cfg.alpha);
    s.finish();
  }
  if (top.has("orbit")) {
    Section s = top.section("orbit");
    cfg.n_seeds = static_cast<int>(s.integer("n_seeds", cfg.n_seeds));
    cfg.seed_radius = s.number("seed_radius", cfg.seed_radius);
    cfg.recenter = s.boolean("recenter", cfg.recenter);
    s.finish();
  }
  cfg.output_dir = top.string("output_dir", cfg.output_dir);
  cfg.workers = static_cast<int>(top.integer("workers", cfg.workers));
  cfg.rng_seed = top.unsigned_integer("seed", cfg.rng_seed);
  cfg.solver.seed.rng_seed = cfg.rng_seed;
  top.finish();
  cfg.canonical = doc.dump();
  return cfg;
}

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void check_potential(const PotentialSpec& p, const std::string& path) {
  try {
    p.validate();
  } catch (const PekarError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void check_annular_fits(double R, double L, const std::string& path) {
  check(R + 1.0 < 0.5 * L, "grid.L too small for " + path + " = " + format_double(R) + ": the well needs L > 2(R+1) = " +
                                format_double(2.0 * (R + 1.0)));
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [name, k] : experiment_names())
    if (k == kind) return name;
  return "unknown";
}

ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
  if (overrides.output_dir) doc["output_dir"] = *overrides.output_dir;
  if (overrides.workers) doc["workers"] = *overrides.workers;
  if (overrides.rng_seed) doc["seed"] = *overrides.rng_seed;
  return parse_document(doc);
}

ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

void validate_config(const ExperimentConfig& cfg) {
  const bool grid3d = needs_grid(cfg.experiment) || cfg.has_grid;
  if (grid3d) {
    check(cfg.grid.n >= 8 && cfg.grid.n % 2 == 0, "grid.n must be an even integer >= 8");
    check(cfg.grid.L > 0.0, "grid.L must be positive");
  }
  check(cfg.radial_grid.m >= 16, "radial_grid.m must be >= 16");
  check(cfg.radial_grid.r_max > 0.0, "radial_grid.r_max must be positive");

  try {
    cfg.solver.validate();
  } catch (const PekarError& e) {
    throw ConfigError(std::string("solver: ") + e.what());
  }
  check(cfg.solver.max_backtracks >= 1, "solver: max_backtracks must be >= 1");
  check(cfg.solver.step_growth >= 1.0, "solver: step_growth must be >= 1");
  check(cfg.solver.seed.gaussian_sigma > 0.0, "solver.seed.sigma must be positive");
  check(cfg.solver.seed.perturbation >= 0.0, "solver.seed.perturbation must be non-negative");
  check(cfg.workers >= 1, "workers must be >= 1");

  if (cfg.potential) {
    check_potential(*cfg.potential, "potential");
    if (grid3d && cfg.potential->kind == PotentialSpec::Kind::annular) check_annular_fits(cfg.potential->R, cfg.grid.L, "potential.R");
    if (cfg.potential->kind == PotentialSpec::Kind::general_field) {
      check(grid3d && cfg.potential->field->grid == cfg.make_grid(), "potential.path: snapshot grid differs from grid");
      check(cfg.experiment != ExperimentKind::solve_radial, "potential: a snapshot potential cannot drive the radial solver");
    }
    if (cfg.experiment == ExperimentKind::solve_radial)
      check(cfg.potential->is_radial(), "potential: the radial solver needs a radial potential");
  }

  switch (cfg.experiment) {
    case ExperimentKind::sweep_R:
      check(!cfg.R_list.empty(), "sweep.R_list must not be empty");
      for (std::size_t i = 0; i < cfg.R_list.size(); ++i) {
        const std::string path = "sweep.R_list[" + std::to_string(i) + "]";
        check_potential(PotentialSpec::annular(cfg.R_list[i]), path);
        check_annular_fits(cfg.R_list[i], cfg.grid.L, path);
      }
      break;
    case ExperimentKind::perturb:
      check_potential(*cfg.perturbation, "perturb.Z");
      check(cfg.perturbation->is_radial(), "perturb.Z must be radial");
      check(!cfg.deltas.empty(), "perturb.deltas must not be empty");
      for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
        check(cfg.deltas[i] > 0.0, "perturb.deltas[" + std::to_string(i) + "] must be positive");
        check(i == 0 || cfg.deltas[i] < cfg.deltas[i - 1], "perturb.deltas must be strictly decreasing");
      }
      break;
    case ExperimentKind::product_energy: {
      check(cfg.kgrid.n_k >= 3 && cfg.kgrid.n_k % 2 == 1, "kgrid.n_k must be an odd integer >= 3");
      check(cfg.kgrid.k_max > 0.0, "kgrid.k_max must be positive");
      check(cfg.alpha > 0.0, "product.alpha must be positive");
      const double zone = std::numbers::pi / (cfg.grid.L / cfg.grid.n);
      check(cfg.kgrid.k_max * std::max(1.0, cfg.alpha) <= zone * (1.0 + 1e-12),
            "kgrid.k_max exceeds the Brillouin zone pi/dx = " + format_double(zone) + " of the grid");
      break;
    }
    case ExperimentKind::orbit:
      check(cfg.n_seeds >= 1, "orbit.n_seeds must be >= 1");
      check(cfg.seed_radius >= 0.0, "orbit.seed_radius must be non-negative");
      check(cfg.seed_radius < 0.5 * cfg.grid.L, "orbit.seed_radius must lie inside the box");
      break;
    default:
      break;
  }
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : cfg.canonical) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ConfigEstimates estimate(const ExperimentConfig& cfg) {
  ConfigEstimates e;
  const double n = cfg.grid.n;
  e.dx = cfg.grid.L / n;
  e.radial_h = cfg.radial_grid.r_max / (cfg.radial_grid.m - 1);
  e.brillouin_zone = std::numbers::pi / e.dx;
  if (cfg.kgrid.n_k >= 3) e.dk = cfg.kgrid.k_max / ((cfg.kgrid.n_k - 1) / 2);

  if (needs_grid(cfg.experiment)) {
    // Per worker: about a dozen grid fields, the padded Coulomb buffers and kernel.
    const double field = 8.0 * n * n * n;
    const double padded = 8.0 * 8.0 * n * n * n;
    const double per_worker = 12.0 * field + 2.2 * padded;
    const double kernel_setup = 8.0 * std::pow(2.0 * n + 1.0, 3);
    e.memory_bytes = cfg.workers * per_worker + kernel_setup;
    if (cfg.experiment == ExperimentKind::product_energy) e.memory_bytes += 48.0 * std::pow(cfg.kgrid.n_k, 3);
  } else {
    e.memory_bytes = 16.0 * 8.0 * cfg.radial_grid.m;
  }

  std::optional<double> R;
  if (cfg.potential && cfg.potential->kind == PotentialSpec::Kind::annular) R = cfg.potential->R;
  if (cfg.experiment == ExperimentKind::sweep_R && !cfg.R_list.empty())
    R = *std::max_element(cfg.R_list.begin(), cfg.R_list.end());
  if (R && needs_grid(cfg.experiment)) {
    e.potential_margin = 0.5 * cfg.grid.L - (*R + 1.0);
    e.seed_margin = 0.5 * cfg.grid.L - well_center(*R).norm();
  }
  return e;
}

}  // namespace pekar
