#pragma once

#include "pekar/grid.hpp"

#include <Eigen/Core>

#include <memory>

namespace pekar {

/// Free-space Coulomb convolution on a Grid3D.
///
/// The density is zero-padded to a 2n^3 box and convolved with the
/// band-limited kernel of 1/|x| truncated at Rc = sqrt(3) L, which covers
/// every pair of points in the box, so no periodic image ever interacts.
/// The padded-box kernel is precomputed once from the analytic transform
/// 8 pi sin^2(|k| Rc / 2) / |k|^2 (value 2 pi Rc^2 at k = 0) sampled on a
/// 4n grid and restricted to the 2n box.
class FreeSpaceCoulomb {
 public:
  explicit FreeSpaceCoulomb(const Grid3D& grid);
  ~FreeSpaceCoulomb();
  FreeSpaceCoulomb(const FreeSpaceCoulomb&) = delete;
  FreeSpaceCoulomb& operator=(const FreeSpaceCoulomb&) = delete;

  struct Result {
    double energy = 0.0;       ///< sum_x rho Phi dx^3
    Eigen::ArrayXd potential;  ///< Phi on the original grid, empty unless requested
  };

  Result solve(const Eigen::ArrayXd& rho, bool with_potential);

  double truncation_radius() const { return std::sqrt(3.0) * grid_.L(); }

  /// Real-space kernel value at lattice offset (i, j, k) * dx, |i|,|j|,|k| <= n.
  double kernel_at(int i, int j, int k) const;

 private:
  struct Plans;

  Grid3D grid_;
  std::unique_ptr<Plans> plans_;
  Eigen::ArrayXd kernel_hat_;      ///< padded half-spectrum multiplier
  Eigen::ArrayXd multiplicity_;
  Eigen::ArrayXd kernel_octant_;   ///< (n+1)^3 real-space samples
};

/// Real-to-complex FFT workspace for one Grid3D.
///
/// Spectra use the continuum convention f_hat(k) = dx^3 sum_x e^{-ik.x} f(x)
/// on the half-spectrum n x n x (n/2+1). Plans and buffers are owned per
/// instance; one instance must not be shared between threads.
class SpectralWorkspace {
 public:
  using Spectrum = Eigen::ArrayXcd;

  explicit SpectralWorkspace(const Grid3D& grid);
  ~SpectralWorkspace();
  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  const Grid3D& grid() const { return grid_; }
  std::size_t spectrum_size() const { return spectrum_size_; }

  void forward(const Eigen::ArrayXd& f, Spectrum& out);
  /// Inverse of forward(): f(x) = L^{-3} sum_k f_hat(k) e^{ik.x}.
  void inverse(const Spectrum& s, Eigen::ArrayXd& out);

  /// |k|^2 of every half-spectrum mode (Nyquist taken as (pi/dx)^2 per axis).
  const Eigen::ArrayXd& k2() const { return k2_; }
  /// 1 for self-conjugate planes (k_z = 0 or Nyquist), 2 otherwise.
  const Eigen::ArrayXd& multiplicity() const { return multiplicity_; }
  /// (s + |k|^2)^{-1}, cached for the most recent shift.
  const Eigen::ArrayXd& resolvent(double shift);

  /// Parseval pairing sum_x a(x) b(x) dx^3 weighted by a real Fourier multiplier.
  double pairing(const Spectrum& a, const Spectrum& b, const Eigen::ArrayXd& multiplier) const;

  /// Lazily constructed free-space Coulomb solver for this grid.
  FreeSpaceCoulomb& coulomb();

 private:
  struct Plans;

  Grid3D grid_;
  std::size_t spectrum_size_;
  std::unique_ptr<Plans> plans_;
  std::unique_ptr<FreeSpaceCoulomb> coulomb_;
  Eigen::ArrayXd k2_;
  Eigen::ArrayXd multiplicity_;
  Eigen::ArrayXd resolvent_;
  double resolvent_shift_ = -1.0;
};

/// Thread-local workspace cache keyed by grid.
SpectralWorkspace& spectral_workspace(const Grid3D& grid);

}  // namespace pekar
