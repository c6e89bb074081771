#include "pekar/field_core.hpp"
#include "pekar/potentials.hpp"

#include <doctest.h>

#include <cmath>

using namespace pekar;

TEST_CASE("smooth ramp") {
  CHECK(smooth_ramp(-0.5) == 0.0);
  CHECK(smooth_ramp(0.0) == 0.0);
  CHECK(smooth_ramp(1.0) == 1.0);
  CHECK(smooth_ramp(2.0) == 1.0);
  CHECK(smooth_ramp(0.5) == doctest::Approx(0.5).epsilon(1e-15));
  for (double t = 0.05; t < 1.0; t += 0.05) {
    CHECK(smooth_ramp(t) + smooth_ramp(1.0 - t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(smooth_ramp(t + 0.01) > smooth_ramp(t));
  }
}

TEST_CASE("annular profile shape") {
  const double R = 6.0;
  CHECK(annular_profile(0.0, R) == 0.0);
  CHECK(annular_profile(1.0, R) == 0.0);
  CHECK(annular_profile(2.0, R) == 1.0);
  CHECK(annular_profile(4.0, R) == 1.0);
  CHECK(annular_profile(R, R) == 1.0);
  CHECK(annular_profile(R + 1.0, R) == 0.0);
  CHECK(annular_profile(R + 5.0, R) == 0.0);
  for (double r = 0.0; r < R + 2.0; r += 0.01) {
    const double v = annular_profile(r, R);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("radial bump") {
  CHECK(radial_bump(3.0, 3.0, 1.0) == doctest::Approx(1.0));
  CHECK(radial_bump(4.0, 3.0, 1.0) == 0.0);
  CHECK(radial_bump(1.9, 3.0, 1.0) == 0.0);
  CHECK(radial_bump(2.5, 3.0, 1.0) == doctest::Approx(radial_bump(3.5, 3.0, 1.0)));
}

TEST_CASE("potential spec validation") {
  CHECK_THROWS_AS(PotentialSpec::annular(2.0).validate(), PekarError);
  CHECK_THROWS_AS(PotentialSpec::annular(1.5).validate(), PekarError);
  CHECK_NOTHROW(PotentialSpec::annular(2.5).validate());
  CHECK_THROWS_AS(PotentialSpec::bump(3.0, 0.0).validate(), PekarError);
  CHECK_THROWS_AS(PotentialSpec::coordinate_square(3).validate(), PekarError);
  CHECK(PotentialSpec::coordinate_square(1)(Eigen::Vector3d(1.0, 2.0, 3.0)) == 4.0);
  CHECK(PotentialSpec::constant_value(0.3)(Eigen::Vector3d(5.0, 2.0, 3.0)) == 0.3);
  CHECK(PotentialSpec::annular(6.0, 0.5)(Eigen::Vector3d(0.0, 3.0, 0.0)) == 0.5);
}

TEST_CASE("build_VR checks the box") {
  const Grid3D g(32, 16.0);
  CHECK_THROWS_AS(build_VR(2.0, g), PekarError);
  CHECK_THROWS_AS(build_VR(7.0, g), PekarError);
  const Field3D V = build_VR(5.0, g);
  CHECK(V.values.minCoeff() == 0.0);
  CHECK(V.values.maxCoeff() == 1.0);
}

TEST_CASE("radial and lattice sampling agree") {
  const PotentialSpec spec = PotentialSpec::annular(5.0);
  const Grid3D g(32, 16.0);
  const RadialGrid rg(801, 16.0);
  const Field3D V = build_potential(spec, g);
  const RadialField Vr = build_radial_potential(spec, rg);
  for (int j = 0; j < rg.m(); j += 50) CHECK(Vr.values[j] == doctest::Approx(annular_profile(rg.r(j), 5.0)));
  CHECK(V(16, 16, 16) == doctest::Approx(annular_profile(g.point(16, 16, 16).norm(), 5.0)));
}

TEST_CASE("potential energy and well mass") {
  const Grid3D g(32, 16.0);
  const Field3D rho = Field3D::from_function(g, [&](const Eigen::Vector3d&) { return 1.0 / std::pow(g.L(), 3); });
  CHECK(potential_energy(Field3D::from_function(g, [](const Eigen::Vector3d&) { return 2.0; }), rho) ==
        doctest::Approx(2.0));
  const double shell = 4.0 / 3.0 * M_PI * (125.0 - 8.0) / std::pow(g.L(), 3);
  CHECK(mass_in_well(rho, 5.0) == doctest::Approx(shell).epsilon(2e-2));
}

TEST_CASE("rotational average of radial and coordinate potentials") {
  const Grid3D g(32, 16.0);
  const Field3D c = build_potential(PotentialSpec::constant_value(1.5), g);
  // spheres leaving the box see zero outside it, so compare inside the inscribed ball
  const Field3D cavg = rotational_average(c);
  double worst = 0.0;
  for (int i = 0; i < g.n(); ++i)
    for (int j = 0; j < g.n(); ++j)
      for (int k = 0; k < g.n(); ++k)
        if (g.point(i, j, k).norm() < 0.5 * g.L() - g.dx()) worst = std::max(worst, std::abs(cavg(i, j, k) - 1.5));
  CHECK(worst < 1e-10);
  // <x^2> over the sphere of radius r is r^2 / 3
  const Field3D x2 = build_potential(PotentialSpec::coordinate_square(0), g);
  const Field3D avg = rotational_average(x2);
  for (int i : {10, 16, 20}) {
    const Eigen::Vector3d p = g.point(i, 12, 19);
    CHECK(avg(i, 12, 19) == doctest::Approx(p.squaredNorm() / 3.0).epsilon(1e-6));
  }
}
