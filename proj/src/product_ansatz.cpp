#include "pekar/product_ansatz.hpp"

#include "pekar/field_core.hpp"
#include "pekar/pekar_energy.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>

namespace pekar {

namespace {

using cd = std::complex<double>;
using RowMatrixXcd = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Regularized sum over Z^3 \ {0} of 1/|m|^2.
constexpr double kLatticeSum = -8.91363291758515;

void check_compatible(const Grid3D& grid, const KGrid& kgrid) {
  const double zone = std::numbers::pi / grid.dx();
  if (kgrid.k_max() > zone * (1.0 + 1e-12))
    throw PekarError("k-grid cutoff " + std::to_string(kgrid.k_max()) + " exceeds the Brillouin zone " +
                     std::to_string(zone) + " of the real-space grid");
}

}  // namespace

double first_shell_correction() { return -kLatticeSum / 6.0; }

KGrid::KGrid(int n_k, double k_max) : n_k_(n_k), k_max_(k_max) {
  if (n_k < 3 || n_k % 2 == 0) throw PekarError("KGrid: n_k must be odd and >= 3 (got " + std::to_string(n_k) + ")");
  if (!(k_max > 0.0) || !std::isfinite(k_max)) throw PekarError("KGrid: k_max must be positive");
  build();
}

KGrid KGrid::from_spacing(double k_max, double dk) {
  if (!(dk > 0.0)) throw PekarError("KGrid: dk must be positive");
  const int half = std::max(1, static_cast<int>(std::lround(k_max / dk)));
  return KGrid(2 * half + 1, k_max);
}

void KGrid::build() {
  const int M = half();
  const double h = dk();
  const double w = h * h * h;
  weights_ = Eigen::ArrayXd::Constant(static_cast<Eigen::Index>(size()), w);
  norms_.resize(static_cast<Eigen::Index>(size()));
  for (int a = 0; a < n_k_; ++a)
    for (int b = 0; b < n_k_; ++b)
      for (int c = 0; c < n_k_; ++c) {
        const int ia = a - M, ib = b - M, ic = c - M;
        const std::size_t idx = index(a, b, c);
        const int m2 = ia * ia + ib * ib + ic * ic;
        norms_[idx] = h * std::sqrt(static_cast<double>(m2));
        if (m2 == 0) weights_[idx] = 0.0;
        else if (m2 == 1) weights_[idx] = w * (1.0 + first_shell_correction());
      }
}

Eigen::Vector3d KGrid::k(std::size_t idx) const {
  const std::size_t nk = n_k_;
  const int c = static_cast<int>(idx % nk);
  const int b = static_cast<int>((idx / nk) % nk);
  const int a = static_cast<int>(idx / (nk * nk));
  return {wave(a), wave(b), wave(c)};
}

KGrid KGrid::scaled(double s) const {
  if (!(s > 0.0)) throw PekarError("KGrid::scaled: factor must be positive");
  return KGrid(n_k_, k_max_ * s);
}

double phonon_coupling(double alpha) { return std::sqrt(alpha) / (std::sqrt(2.0) * std::numbers::pi); }

KField density_fourier(const Field3D& rho, const KGrid& kgrid) {
  const Grid3D& g = rho.grid;
  const int n = g.n();
  const int nk = kgrid.n_k();

  Eigen::MatrixXcd E(nk, n);
  for (int a = 0; a < nk; ++a)
    for (int i = 0; i < n; ++i) E(a, i) = std::polar(1.0, -kgrid.wave(a) * g.coord(i));

  // Contract z, then y, then x.
  const Eigen::Map<const RowMatrixXd> R(rho.values.data(), static_cast<Eigen::Index>(n) * n, n);
  const Eigen::MatrixXcd A = R.cast<cd>() * E.transpose();
  RowMatrixXcd B(n, static_cast<Eigen::Index>(nk) * nk);
  for (int i = 0; i < n; ++i) {
    Eigen::Map<RowMatrixXcd> Bi(B.row(i).data(), nk, nk);
    Bi = E * A.middleRows(static_cast<Eigen::Index>(i) * n, n);
  }
  const RowMatrixXcd C = E * B;

  KField out{kgrid, Eigen::Map<const Eigen::ArrayXcd>(C.data(), C.size()) * g.cell_volume()};
  return out;
}

PhononDisplacement optimal_displacement(const KField& rho_hat, double alpha) {
  if (!(alpha > 0.0)) throw PekarError("optimal_displacement: alpha must be positive");
  const KGrid& kg = rho_hat.kgrid;
  const double c = phonon_coupling(alpha);
  PhononDisplacement out{kg, Eigen::ArrayXcd::Zero(static_cast<Eigen::Index>(kg.size())), alpha};
  const Eigen::ArrayXd& k = kg.norms();
  for (Eigen::Index i = 0; i < out.z.size(); ++i)
    if (k[i] > 0.0) out.z[i] = c * rho_hat.values[i] / k[i];
  return out;
}

ProductEnergy product_energy(const Field3D& psi, const PhononDisplacement& z, const Field3D& V, const KField& rho_hat) {
  if (!(psi.grid == V.grid)) throw PekarError("product_energy: psi and V live on different grids");
  if (!(z.kgrid == rho_hat.kgrid)) throw PekarError("product_energy: displacement and density use different k-grids");
  if (z.z.size() != static_cast<Eigen::Index>(z.kgrid.size())) throw PekarError("product_energy: displacement size mismatch");
  if (!(z.alpha > 0.0)) throw PekarError("product_energy: alpha must be positive");
  check_compatible(psi.grid, z.kgrid);

  ProductEnergy e;
  e.kinetic = kinetic_energy(psi);
  e.potential = (V.values * psi.values.square()).sum() * psi.grid.cell_volume();
  const Eigen::ArrayXd& w = z.kgrid.weights();
  const Eigen::ArrayXd& k = z.kgrid.norms();
  const double c = phonon_coupling(z.alpha);
  double field = 0.0, coupling = 0.0;
  for (Eigen::Index i = 0; i < z.z.size(); ++i) {
    if (w[i] == 0.0) continue;
    field += w[i] * std::norm(z.z[i]);
    coupling += w[i] * 2.0 * (z.z[i] * std::conj(rho_hat.values[i])).real() / k[i];
  }
  e.field = field;
  e.coupling = c * coupling;
  e.total = e.kinetic - e.potential + e.field - e.coupling;
  return e;
}

ProductEnergy product_energy(const Field3D& psi, const PhononDisplacement& z, const Field3D& V) {
  check_compatible(psi.grid, z.kgrid);
  return product_energy(psi, z, V, density_fourier(density(psi), z.kgrid));
}

ProductEnergy optimal_product_energy(const Field3D& psi, const Field3D& V, const KGrid& kgrid, double alpha) {
  check_compatible(psi.grid, kgrid);
  const KField rho_hat = density_fourier(density(psi), kgrid);
  return product_energy(psi, optimal_displacement(rho_hat, alpha), V, rho_hat);
}

ScalingCheck alpha_scaling_check(const Field3D& phi, double alpha, const PotentialSpec& V, const KGrid& kgrid) {
  if (!(alpha > 0.0)) throw PekarError("alpha_scaling_check: alpha must be positive");
  V.validate();
  const Grid3D& g = phi.grid;
  const Field3D rho = density(phi);
  const Eigen::Vector3d c = center_of_mass(rho);

  // psi_a samples phi at y = c + a (x - c) for x in the box; phi's mass at points
  // whose preimage leaves the box is lost, and phi vanishes outside its own box.
  const double L2 = 0.5 * g.L();
  auto in_box = [&](const Eigen::Vector3d& p) { return p.cwiseAbs().maxCoeff() <= L2; };
  double lost = 0.0;
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (!in_box(c + (g.point(i, j, k) - c) / alpha)) lost += rho(i, j, k);
  lost *= g.cell_volume();
  if (lost > 1e-6)
    throw PekarError("alpha_scaling_check: dilated state leaves the box (lost mass " + std::to_string(lost) + ")");
  // For alpha > 1 psi_a sees phi's cut at the box face as a jump.
  if (alpha > 1.0) {
    double edge = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (g.point(i, j, k).cwiseAbs().maxCoeff() > 0.4 * g.L()) edge += rho(i, j, k);
    edge *= g.cell_volume();
    if (edge > 1e-6)
      throw PekarError("alpha_scaling_check: phi is not localized in its box (edge mass " + std::to_string(edge) + ")");
  }

  const double amp = std::pow(alpha, 1.5);
  const Field3D psi = Field3D::from_function(g, [&](const Eigen::Vector3d& x) {
    const Eigen::Vector3d y = c + alpha * (x - c);
    return in_box(y) ? amp * interpolate(phi, y) : 0.0;
  });
  const Field3D Va = Field3D::from_function(g, [&](const Eigen::Vector3d& x) { return alpha * alpha * V(c + alpha * (x - c)); });

  ScalingCheck out;
  out.product = optimal_product_energy(psi, Va, kgrid.scaled(alpha), alpha).total;
  out.pekar = pekar_energy(phi, build_potential(V, g)).total;
  const double target = alpha * alpha * out.pekar;
  out.defect = std::abs(out.product - target) / std::abs(target);
  return out;
}

}  // namespace pekar
