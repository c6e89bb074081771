#pragma once

#include "pekar/experiments.hpp"
#include "pekar/grid.hpp"
#include "pekar/optimizer.hpp"
#include "pekar/potentials.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pekar {

/// Config rejected before any solve; `what()` names the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { solve_free, solve_radial, solve_full, sweep_R, perturb, product_energy, orbit };

std::string to_string(ExperimentKind kind);

struct GridConfig {
  int n = 64;
  double L = 24.0;
};

struct RadialGridConfig {
  int m = 4096;
  double r_max = 24.0;
};

struct KGridConfig {
  int n_k = 81;
  double k_max = 4.0;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::solve_free;
  GridConfig grid;
  /// The document carried a "grid" section.
  bool has_grid = false;
  RadialGridConfig radial_grid;
  KGridConfig kgrid;
  std::optional<PotentialSpec> potential;
  SolveOptions solver;
  /// The document carried a "solver.seed" section.
  bool has_seed = false;

  std::vector<double> R_list{6.0, 8.0, 10.0};
  std::optional<PotentialSpec> perturbation;
  std::vector<double> deltas{0.04, 0.02, 0.01};
  double alpha = 1.0;
  int n_seeds = 3;
  double seed_radius = 0.0;
  bool recenter = false;

  std::string output_dir = "out";
  int workers = 1;
  std::uint64_t rng_seed = 1;

  /// Canonical JSON text of the parsed document (sorted keys); hashed for manifests.
  std::string canonical;

  Grid3D make_grid() const { return Grid3D(grid.n, grid.L); }
  RadialGrid make_radial_grid() const { return RadialGrid(radial_grid.m, radial_grid.r_max); }
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::string> output_dir;
  std::optional<int> workers;
  std::optional<std::uint64_t> rng_seed;
};

/// Parses a JSON document. Unknown keys, wrong types and missing required
/// fields throw ConfigError with the field path. Overrides are merged into
/// the document first, so they are part of the hash.
ExperimentConfig parse_config(const std::string& text, const ConfigOverrides& overrides = {});
ExperimentConfig load_config(const std::string& path, const ConfigOverrides& overrides = {});

/// Cross-field checks (grid constraints, potential domain, tolerances).
/// Throws ConfigError naming the first violation.
void validate_config(const ExperimentConfig& cfg);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

/// Derived quantities reported by `validate`.
struct ConfigEstimates {
  double dx = 0.0;
  double radial_h = 0.0;
  double dk = 0.0;
  double brillouin_zone = 0.0;
  double memory_bytes = 0.0;
  /// Distance from the edge of the potential's support to the box face (annular only).
  std::optional<double> potential_margin;
  /// Distance from the translated seed center to the box face (annular only).
  std::optional<double> seed_margin;
};

ConfigEstimates estimate(const ExperimentConfig& cfg);

}  // namespace pekar
