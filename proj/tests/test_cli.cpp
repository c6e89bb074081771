#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path& work() {
  static const fs::path p = [] {
    const fs::path d = fs::temp_directory_path() / "pekar_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return p;
}

std::string write_config(const std::string& name, const std::string& text) {
  const fs::path p = work() / name;
  std::ofstream(p) << text;
  return p.string();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(PEKAR_CLI) + " " + args + " > " + (work() / "last.log").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("validate accepts good configs and rejects bad ones with exit 2") {
  const auto good = write_config("good.json", R"({"experiment": "solve-full", "grid": {"n": 32, "L": 24}, "potential": {"kind": "annular", "R": 4}})");
  CHECK(cli("validate --config " + good) == 0);
  const auto bad = write_config("bad.json", R"({"experiment": "solve-full", "grid": {"n": 32, "L": 24}, "potential": {"kind": "annular", "R": 1.5}})");
  CHECK(cli("validate --config " + bad) == 2);
  CHECK(cli("run --config " + bad) == 2);
  const auto unknown = write_config("unknown.json", R"({"experiment": "solve-free", "colour": "blue"})");
  CHECK(cli("validate --config " + unknown) == 2);
  CHECK(cli("run") == 2);
  CHECK(cli("run --config " + (work() / "nope.json").string()) == 2);
}

TEST_CASE("run writes artifacts and a manifest") {
  const auto cfg = write_config("free.json", R"({"experiment": "solve-free", "radial_grid": {"m": 512, "r_max": 20}})");
  const fs::path out = work() / "free_out";
  CHECK(cli("run --config " + cfg + " --out " + out.string() + " --seed 9 --workers 2") == 0);
  const auto manifest = read_json(out / "manifest.json");
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["workers"] == 2);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);
  for (const auto& a : manifest["artifacts"]) CHECK(fs::exists(out / a.get<std::string>()));
  const auto free = read_json(out / "free.json");
  CHECK(free["config_hash"] == manifest["config_hash"]);
  CHECK(free["converged"] == true);
  CHECK(free["strauss_margin"].get<double>() >= 0.0);
}

TEST_CASE("strict mode turns non-convergence into exit 3") {
  const auto cfg = write_config("short.json",
                                R"({"experiment": "solve-full", "grid": {"n": 24, "L": 24}, "radial_grid": {"m": 512, "r_max": 20},
                                    "potential": {"kind": "annular", "R": 4}, "solver": {"max_iters": 3}})");
  CHECK(cli("run --config " + cfg + " --out " + (work() / "short_lax").string()) == 0);
  CHECK(cli("run --config " + cfg + " --out " + (work() / "short_strict").string() + " --strict") == 3);
  CHECK(fs::exists(work() / "short_strict" / "full.json"));
  CHECK(read_json(work() / "short_strict" / "manifest.json")["all_converged"] == false);
}

TEST_CASE("sweep and orbit outputs") {
  const auto sweep = write_config("sweep.json",
                                  R"({"experiment": "sweep-R", "grid": {"n": 24, "L": 24}, "radial_grid": {"m": 512, "r_max": 20},
                                      "sweep": {"R_list": [4, 5]}})");
  CHECK(cli("run --config " + sweep + " --out " + (work() / "sweep").string()) == 0);
  std::ifstream in(work() / "sweep" / "sweep.csv");
  std::string header, line;
  std::getline(in, header);
  CHECK(header.rfind("R,e_full,e_rad,trial_bound,gap,well_mass", 0) == 0);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 2);

  const auto orbit = write_config("orbit.json",
                                  R"({"experiment": "orbit", "grid": {"n": 24, "L": 24}, "radial_grid": {"m": 512, "r_max": 20},
                                      "potential": {"kind": "annular", "R": 4}, "orbit": {"n_seeds": 2}})");
  CHECK(cli("run --config " + orbit + " --out " + (work() / "orbit").string()) == 0);
  CHECK(fs::exists(work() / "orbit" / "orbit.csv"));
  CHECK(read_json(work() / "orbit" / "orbit.json")["max_energy_spread"].get<double>() < 1e-6);
}
