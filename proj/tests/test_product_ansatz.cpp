#include "pekar/field_core.hpp"
#include "pekar/pekar_energy.hpp"
#include "pekar/product_ansatz.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace pekar;

namespace {

Field3D gaussian_state(const Grid3D& g, double sigma, const Eigen::Vector3d& c = Eigen::Vector3d::Zero()) {
  const double amp = std::pow(2.0 * M_PI * sigma * sigma, -0.75);
  return Field3D::from_function(g, [&](const Eigen::Vector3d& x) { return amp * std::exp(-(x - c).squaredNorm() / (4 * sigma * sigma)); });
}

// Regularized sum over Z^3 \ {0} of 1/|m|^2 by Ewald splitting at the
// self-dual point.
double ewald_lattice_sum() {
  double s = 0.0;
  const int M = 6;
  for (int a = -M; a <= M; ++a)
    for (int b = -M; b <= M; ++b)
      for (int c = -M; c <= M; ++c) {
        const double m2 = a * a + b * b + c * c;
        if (m2 == 0) continue;
        s += std::exp(-M_PI * m2) / (M_PI * m2) + std::erfc(std::sqrt(M_PI * m2)) / std::sqrt(m2);
      }
  return M_PI * (s - 3.0);
}

PhononDisplacement random_displacement(const KGrid& kg, double alpha, std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  PhononDisplacement z{kg, Eigen::ArrayXcd(kg.size()), alpha};
  for (Eigen::Index i = 0; i < z.z.size(); ++i) z.z[i] = scale * std::complex<double>(nd(rng), nd(rng));
  return z;
}

}  // namespace

TEST_CASE("first shell correction from an independent lattice sum") {
  CHECK(first_shell_correction() == doctest::Approx(-ewald_lattice_sum() / 6.0).epsilon(1e-12));
}

TEST_CASE("k-grid layout") {
  const KGrid kg(5, 2.0);
  CHECK(kg.half() == 2);
  CHECK(kg.dk() == 1.0);
  CHECK(kg.wave(0) == -2.0);
  CHECK(kg.weights()[kg.index(2, 2, 2)] == 0.0);
  CHECK(kg.norms()[kg.index(2, 2, 2)] == 0.0);
  CHECK(kg.weights()[kg.index(3, 2, 2)] == doctest::Approx(1.0 + first_shell_correction()));
  CHECK(kg.weights()[kg.index(3, 3, 2)] == 1.0);
  CHECK((kg.k(kg.index(4, 1, 2)) - Eigen::Vector3d(2.0, -1.0, 0.0)).norm() == 0.0);
  CHECK(kg.scaled(2.0).k_max() == 4.0);
  CHECK(KGrid::from_spacing(4.0, 0.05).dk() == doctest::Approx(0.05));
  CHECK_THROWS_AS(KGrid(4, 1.0), PekarError);
  CHECK_THROWS_AS(KGrid(1, 1.0), PekarError);
}

TEST_CASE("density transform of a gaussian") {
  const Grid3D g(32, 16.0);
  const double sigma = 1.1;
  const Field3D rho = density(gaussian_state(g, sigma, {0.5, 0.0, -0.25}));
  const KGrid kg(9, 2.0);
  const KField rh = density_fourier(rho, kg);
  for (std::size_t i = 0; i < kg.size(); i += 37) {
    const Eigen::Vector3d k = kg.k(i);
    const std::complex<double> exact =
        std::exp(-0.5 * sigma * sigma * k.squaredNorm()) * std::exp(std::complex<double>(0.0, -(0.5 * k[0] - 0.25 * k[2])));
    CHECK(std::abs(rh.values[i] - exact) < 1e-10);
  }
}

TEST_CASE("optimal displacement completes the square") {
  const Grid3D g(32, 16.0);
  const Field3D psi = gaussian_state(g, 1.3);
  const Field3D V(g);
  const KGrid kg = KGrid::from_spacing(2.0, 0.1);
  const KField rh = density_fourier(density(psi), kg);
  const double alpha = 1.7;
  const PhononDisplacement zo = optimal_displacement(rh, alpha);
  const ProductEnergy eo = product_energy(psi, zo, V, rh);
  // phonon part equals -alpha sum w |rho_hat|^2 / (2 pi^2 k^2)
  double lattice_d = 0.0;
  for (std::size_t i = 0; i < kg.size(); ++i)
    if (kg.norms()[i] > 0) lattice_d += kg.weights()[i] * std::norm(rh.values[i]) / (2 * M_PI * M_PI * kg.norms()[i] * kg.norms()[i]);
  CHECK(eo.field - eo.coupling == doctest::Approx(-alpha * lattice_d).epsilon(1e-12));
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const PhononDisplacement z = random_displacement(kg, alpha, seed, 0.01);
    const ProductEnergy e = product_energy(psi, z, V, rh);
    CHECK(e.total >= eo.total);
    double excess = 0.0;
    for (std::size_t i = 0; i < kg.size(); ++i) excess += kg.weights()[i] * std::norm(z.z[i] - zo.z[i]);
    CHECK(std::abs((e.total - eo.total) - excess) <= 1e-10);
  }
}

TEST_CASE("product energy approaches the Pekar energy as k_max grows") {
  // narrow enough that truncation at k_max, not the dk^3 quadrature term, dominates
  const Grid3D g(64, 12.0);
  const Field3D psi = gaussian_state(g, 0.55);
  const double D = pekar_energy(psi, Field3D(g)).coulomb;
  double prev = 1e9;
  for (double km : {1.0, 2.0, 4.0}) {
    const KGrid kg = KGrid::from_spacing(km, 0.05);
    const ProductEnergy e = optimal_product_energy(psi, Field3D(g), kg, 1.0);
    const double eps = std::abs((e.field - e.coupling) + D) / D;
    CHECK(eps <= 0.5 * prev);
    prev = eps;
  }
  CHECK(prev < 2e-3);
}

TEST_CASE("coupling scales with alpha") {
  const Grid3D g(24, 12.0);
  const Field3D psi = gaussian_state(g, 1.2);
  const KGrid kg(21, 2.0);
  const ProductEnergy e1 = optimal_product_energy(psi, Field3D(g), kg, 1.0);
  const ProductEnergy e2 = optimal_product_energy(psi, Field3D(g), kg, 2.0);
  CHECK(e2.field - e2.coupling == doctest::Approx(2.0 * (e1.field - e1.coupling)).epsilon(1e-12));
  CHECK(e2.kinetic == e1.kinetic);
  CHECK(phonon_coupling(2.0) == doctest::Approx(std::sqrt(2.0) * phonon_coupling(1.0)));
  CHECK_THROWS_AS(optimal_product_energy(psi, Field3D(g), kg, 0.0), PekarError);
}

TEST_CASE("k-grid must stay inside the Brillouin zone") {
  const Grid3D g(16, 16.0);
  const Field3D psi = gaussian_state(g, 1.5);
  CHECK_THROWS_AS(optimal_product_energy(psi, Field3D(g), KGrid(21, 4.0), 1.0), PekarError);
  CHECK_NOTHROW(optimal_product_energy(psi, Field3D(g), KGrid(21, 3.0), 1.0));
}

TEST_CASE("dilation scaling") {
  const Grid3D g(64, 16.0);
  const Field3D phi = gaussian_state(g, 0.8);
  for (double a : {0.8, 1.5, 2.0}) {
    const ScalingCheck sc = alpha_scaling_check(phi, a, PotentialSpec::constant_value(0.0), KGrid::from_spacing(3.0, 0.05));
    CHECK(sc.defect < 2e-4);
  }
  const Field3D wide = gaussian_state(g, 3.0);
  CHECK_THROWS_AS(alpha_scaling_check(wide, 1.5, PotentialSpec::constant_value(0.0), KGrid(11, 1.0)), PekarError);
}
