#include "pekar/field_core.hpp"
#include "pekar/optimizer.hpp"
#include "pekar/pekar_energy.hpp"
#include "pekar/potentials.hpp"

#include <doctest.h>

#include <cmath>

using namespace pekar;

namespace {

template <class R>
void check_history(const R& r) {
  REQUIRE(r.history.size() >= 2);
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
  for (double d : r.norm_defects) CHECK(d <= 1e-12);
}

}  // namespace

TEST_CASE("radial free minimizer") {
  const RadialMinimizerResult r = solve_free(RadialGrid(2048, 24.0));
  CHECK(r.converged);
  check_history(r);
  // ground-state energy of the free problem, -0.108513 to six digits
  CHECK(r.energy.total == doctest::Approx(-0.108513).epsilon(1e-5));
  CHECK(std::abs(r.energy.coulomb - 2 * r.energy.kinetic) <= 1e-3 * r.energy.coulomb);
  CHECK(r.residual.multiplier == doctest::Approx(r.energy.kinetic - 2 * r.energy.coulomb).epsilon(1e-6));
  CHECK(r.psi.values[0] > 0.0);
  CHECK(radial_norm_squared(r.psi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("lattice minimizer in a well") {
  const Grid3D g(32, 24.0);
  const Field3D V = build_VR(4.0, g);
  SolveOptions o;
  o.max_iters = 2000;
  const MinimizerResult r = minimize(V, o);
  CHECK(r.converged);
  check_history(r);
  CHECK(l2_norm(r.psi) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.residual.residual_norm <= o.tolerance_residual);
  CHECK(r.energy.total < -0.5);
}

TEST_CASE("seeds") {
  const Grid3D g(32, 16.0);
  SeedSpec s;
  s.gaussian_sigma = 1.0;
  s.center = Eigen::Vector3d(1.0, 0.0, 0.0);
  const Field3D f = normalize(make_seed(s, g));
  CHECK((center_of_mass(density(f)) - s.center).norm() < 1e-8);
  s.kind = SeedSpec::Kind::random_perturbed;
  s.rng_seed = 11;
  const Field3D a = make_seed(s, g), b = make_seed(s, g);
  CHECK((a.values - b.values).abs().maxCoeff() == 0.0);
  s.rng_seed = 12;
  CHECK((a.values - make_seed(s, g).values).abs().maxCoeff() > 0.0);
}

TEST_CASE("translated seed sits at the well center") {
  const RadialMinimizerResult q = solve_free(RadialGrid(1024, 20.0));
  const Grid3D g(48, 24.0);
  const Field3D s = translate_seed(q.psi, 4.0, g);
  CHECK(l2_norm(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((center_of_mass(density(s)) - well_center(4.0)).norm() < 0.05);
  CHECK(well_center(8.0)[0] == 5.0);
  CHECK_THROWS_AS(translate_seed(q.psi, 9.0, Grid3D(32, 16.0)), PekarError);
}

TEST_CASE("solver option validation") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.tolerance_energy = -1.0;
  CHECK_THROWS_AS(o.validate(), PekarError);
  o = SolveOptions{};
  o.backtrack_factor = 1.5;
  CHECK_THROWS_AS(o.validate(), PekarError);
}
