#pragma once

#include "pekar/grid.hpp"
#include "pekar/potentials.hpp"

#include <Eigen/Core>

namespace pekar {

/// Symmetric cube of phonon modes k = dk * (a, b, c), |a|,|b|,|c| <= M,
/// with n_k = 2M + 1 modes per axis. The k = 0 mode carries zero weight.
class KGrid {
 public:
  KGrid() = default;
  /// n_k must be odd and at least 3; k_max > 0.
  KGrid(int n_k, double k_max);
  /// Grid with the given cutoff and (approximately) the given spacing.
  static KGrid from_spacing(double k_max, double dk);

  int n_k() const { return n_k_; }
  int half() const { return (n_k_ - 1) / 2; }
  double k_max() const { return k_max_; }
  double dk() const { return k_max_ / half(); }
  std::size_t size() const { return static_cast<std::size_t>(n_k_) * n_k_ * n_k_; }
  double wave(int a) const { return dk() * (a - half()); }
  std::size_t index(int a, int b, int c) const { return (static_cast<std::size_t>(a) * n_k_ + b) * n_k_ + c; }
  Eigen::Vector3d k(std::size_t idx) const;

  /// Quadrature weight of each mode. Plain dk^3, except the six modes next to
  /// the origin, which absorb the leading lattice-sum error of 1/|k|^2
  /// integrands, and the origin itself, which gets 0.
  const Eigen::ArrayXd& weights() const { return weights_; }
  /// |k| of every mode (0 at the origin).
  const Eigen::ArrayXd& norms() const { return norms_; }

  /// Same mode pattern with every wave vector multiplied by s.
  KGrid scaled(double s) const;

  bool operator==(const KGrid& o) const { return n_k_ == o.n_k_ && k_max_ == o.k_max_; }

 private:
  void build();

  int n_k_ = 0;
  double k_max_ = 0.0;
  Eigen::ArrayXd weights_;
  Eigen::ArrayXd norms_;
};

/// Coefficient of the first-shell weight correction, minus one sixth of the
/// regularized lattice sum over Z^3 \ {0} of 1/|m|^2.
double first_shell_correction();

struct KField {
  KGrid kgrid;
  Eigen::ArrayXcd values;
};

struct PhononDisplacement {
  KGrid kgrid;
  Eigen::ArrayXcd z;
  double alpha = 1.0;
};

/// sqrt(alpha) / (sqrt(2) pi): coupling of the phonon field to the density in
/// the reduced units where min_z of the phonon terms equals -alpha D(rho, rho).
double phonon_coupling(double alpha);

/// rho_hat(k) = sum_x dx^3 rho(x) e^{-ik.x}, evaluated separably axis by axis.
KField density_fourier(const Field3D& rho, const KGrid& kgrid);

/// z(k) = sqrt(alpha/2) rho_hat(k) / (pi |k|), zero at k = 0. Throws if alpha <= 0.
PhononDisplacement optimal_displacement(const KField& rho_hat, double alpha);

struct ProductEnergy {
  double kinetic = 0.0;
  double potential = 0.0;   ///< integral V |psi|^2
  double field = 0.0;       ///< sum_k w |z|^2
  double coupling = 0.0;    ///< c sum_k w 2 Re(z conj(rho_hat)) / |k|
  double total = 0.0;       ///< kinetic - potential + field - coupling
};

/// Product-state energy of (psi, z). V must live on psi's grid and z's
/// k-grid must not extend past the Brillouin zone of that grid.
ProductEnergy product_energy(const Field3D& psi, const PhononDisplacement& z, const Field3D& V);

/// Same, reusing a precomputed transform of |psi|^2 on z's k-grid.
ProductEnergy product_energy(const Field3D& psi, const PhononDisplacement& z, const Field3D& V, const KField& rho_hat);

/// product_energy at the optimal displacement for psi.
ProductEnergy optimal_product_energy(const Field3D& psi, const Field3D& V, const KGrid& kgrid, double alpha);

struct ScalingCheck {
  double product = 0.0;       ///< product-state energy of the dilated state at coupling alpha
  double pekar = 0.0;         ///< Pekar energy of phi
  double defect = 0.0;        ///< |product - alpha^2 pekar| / |alpha^2 pekar|
};

/// Dilates phi about its center of mass c, psi_a(x) = a^{3/2} phi(c + a (x - c)),
/// together with V_a(x) = a^2 V(c + a (x - c)), and compares the product-state
/// energy on the k-grid scaled by alpha with alpha^2 times the Pekar energy of phi.
/// Throws when the dilated state loses more than 1e-6 of its mass to the box,
/// or, for alpha > 1, when phi carries more than 1e-6 in the layer max_i |x_i| > 0.4 L.
ScalingCheck alpha_scaling_check(const Field3D& phi, double alpha, const PotentialSpec& V, const KGrid& kgrid);

}  // namespace pekar
