#include "pekar/config.hpp"
#include "pekar/snapshot_io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

using namespace pekar;

namespace {

std::string error_of(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::filesystem::path scratch_dir() {
  const auto p = std::filesystem::temp_directory_path() / "pekar_test_config";
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("minimal config takes defaults") {
  const ExperimentConfig c = parse_config(R"({"experiment": "solve-free"})");
  CHECK(c.experiment == ExperimentKind::solve_free);
  CHECK(c.radial_grid.m == 4096);
  CHECK(c.workers == 1);
  CHECK_FALSE(c.has_grid);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config errors name the field") {
  CHECK(error_of(R"({"experiment": "solve-full", "grid": {"n": 32, "L": 24}, "potential": {"kind": "annular", "R": 1.5}})")
            .find("R must exceed 2") != std::string::npos);
  CHECK(error_of(R"({"experiment": "solve-free", "solver": {"tolerance_energy": -1}})").find("tolerance_energy") !=
        std::string::npos);
  CHECK(error_of(R"({"experiment": "solve-free", "grdi": {}})").find("grdi") != std::string::npos);
  CHECK(error_of(R"({"experiment": "solve-free", "grid": {"n": 32, "L": 24, "dx": 1}})").find("grid.dx") != std::string::npos);
  CHECK(error_of(R"({"experiment": "explode"})").find("experiment") != std::string::npos);
  CHECK(error_of(R"({"grid": {"n": 32}})").find("experiment") != std::string::npos);
  CHECK(error_of(R"({"experiment": "solve-free", "grid": {"n": "big"}})").find("grid.n") != std::string::npos);
  CHECK(error_of(R"({"experiment": "solve-full", "grid": {"n": 32, "L": 12}, "potential": {"kind": "annular", "R": 8}})")
            .find("grid.L") != std::string::npos);
  CHECK(error_of(R"({"experiment": "product-energy", "grid": {"n": 16, "L": 16}, "kgrid": {"n_k": 11, "k_max": 5}})")
            .find("k_max") != std::string::npos);
  CHECK_THROWS_AS(parse_config("{not json"), ConfigError);
}

TEST_CASE("hash is stable and tracks overrides") {
  const std::string a = R"({"experiment": "solve-free", "radial_grid": {"m": 512, "r_max": 20}})";
  const std::string b = R"({"radial_grid": {"r_max": 20, "m": 512}, "experiment": "solve-free"})";
  CHECK(config_hash(parse_config(a)) == config_hash(parse_config(b)));
  CHECK(config_hash(parse_config(a)).size() == 16);
  ConfigOverrides o;
  o.workers = 4;
  const ExperimentConfig c = parse_config(a, o);
  CHECK(c.workers == 4);
  CHECK(config_hash(c) != config_hash(parse_config(a)));
  o = {};
  o.output_dir = "elsewhere";
  CHECK(parse_config(a, o).output_dir == "elsewhere");
}

TEST_CASE("estimates") {
  const ExperimentConfig c = parse_config(
      R"({"experiment": "solve-full", "grid": {"n": 64, "L": 24}, "potential": {"kind": "annular", "R": 6}})");
  const ConfigEstimates e = estimate(c);
  CHECK(e.dx == 0.375);
  REQUIRE(e.potential_margin.has_value());
  CHECK(*e.potential_margin == doctest::Approx(5.0));
  CHECK(e.memory_bytes > 0.0);
}

TEST_CASE("load_config reads files") {
  const auto p = scratch_dir() / "c.json";
  std::ofstream(p) << R"({"experiment": "orbit", "grid": {"n": 32, "L": 24}, "potential": {"kind": "annular", "R": 4}, "orbit": {"n_seeds": 2}})";
  const ExperimentConfig c = load_config(p.string());
  CHECK(c.experiment == ExperimentKind::orbit);
  CHECK(c.n_seeds == 2);
  CHECK_THROWS_AS(load_config((scratch_dir() / "missing.json").string()), ConfigError);
}

TEST_CASE("snapshot round trips") {
  const Grid3D g(8, 5.0);
  const Field3D f = Field3D::from_function(g, [](const Eigen::Vector3d& x) { return std::sin(x[0]) + x[1] * x[2] / 3.0; });
  const auto bin = (scratch_dir() / "f.bin").string();
  const auto csv = (scratch_dir() / "f.csv").string();
  write_field_binary(bin, f);
  write_field_csv(csv, f);
  for (const Field3D& back : {read_field_binary(bin), read_field_csv(csv)}) {
    CHECK(back.grid == g);
    CHECK((back.values - f.values).abs().maxCoeff() == 0.0);
  }
  const RadialField u = RadialField::from_function(RadialGrid(33, 4.0), [](double r) { return std::exp(-r) / 3.0; });
  const auto rcsv = (scratch_dir() / "u.csv").string();
  write_radial_csv(rcsv, u);
  const RadialField ub = read_radial_csv(rcsv);
  CHECK(ub.grid == u.grid);
  CHECK((ub.values - u.values).abs().maxCoeff() == 0.0);
  std::ofstream(scratch_dir() / "junk.bin") << "nonsense";
  CHECK_THROWS_AS(read_field_binary((scratch_dir() / "junk.bin").string()), PekarError);
}

TEST_CASE("csv quoting and number formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  const auto p = scratch_dir() / "q.csv";
  CsvWriter(p.string()).header({"a", "b"}).row({"x,y", "say \"hi\""});
  std::ifstream in(p);
  std::string head, line;
  std::getline(in, head);
  std::getline(in, line);
  CHECK(head == "a,b");
  CHECK(line == "\"x,y\",\"say \"\"hi\"\"\"");
}
