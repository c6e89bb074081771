#include "pekar/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

namespace pekar {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// Owns one r2c/c2r plan pair on a cubic grid of side `n`.
struct R2CPair {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  std::size_t nreal = 0;
  std::size_t ncplx = 0;

  explicit R2CPair(int n)
      : nreal(static_cast<std::size_t>(n) * n * n), ncplx(static_cast<std::size_t>(n) * n * (n / 2 + 1)) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(nreal);
    cplx = fftw_alloc_complex(ncplx);
    if (!real || !cplx) throw PekarError("FFT buffer allocation failed");
    r2c = fftw_plan_dft_r2c_3d(n, n, n, real, cplx, FFTW_ESTIMATE);
    c2r = fftw_plan_dft_c2r_3d(n, n, n, cplx, real, FFTW_ESTIMATE);
  }
  ~R2CPair() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(r2c);
    fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(cplx);
  }
  R2CPair(const R2CPair&) = delete;
  R2CPair& operator=(const R2CPair&) = delete;

  std::complex<double>* spectrum() { return reinterpret_cast<std::complex<double>*>(cplx); }
};

// Unnormalized 3D type-I DCT of an N^3 array, in place.
void dct1_3d(std::vector<double>& data, int N) {
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_r2r_3d(N, N, N, data.data(), data.data(), FFTW_REDFT00, FFTW_REDFT00, FFTW_REDFT00,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

Eigen::ArrayXd half_spectrum_multiplicity(int n) {
  const int nh = n / 2 + 1;
  Eigen::ArrayXd m(static_cast<Eigen::Index>(n) * n * nh);
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < nh; ++k, ++idx) m[idx] = (k == 0 || k == n / 2) ? 1.0 : 2.0;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

struct FreeSpaceCoulomb::Plans : R2CPair {
  using R2CPair::R2CPair;
};

FreeSpaceCoulomb::FreeSpaceCoulomb(const Grid3D& grid) : grid_(grid) {
  const int n = grid.n();
  const double L = grid.L();
  const double dx = grid.dx();
  const double rc = truncation_radius();

  // 1. Band-limited truncated kernel in real space on the 4L torus. The kernel
  //    is even in every axis, so a (2n+1)^3 DCT-I of the spectral octant suffices.
  {
    const int N = 2 * n + 1;
    const double dk = 2.0 * std::numbers::pi / (4.0 * L);
    std::vector<double> buf(static_cast<std::size_t>(N) * N * N);
    std::size_t idx = 0;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c < N; ++c, ++idx) {
          const double kk = dk * dk * (double(a) * a + double(b) * b + double(c) * c);
          if (kk == 0.0) {
            buf[idx] = 2.0 * std::numbers::pi * rc * rc;
          } else {
            const double s = std::sin(0.5 * std::sqrt(kk) * rc);
            buf[idx] = 8.0 * std::numbers::pi * s * s / kk;
          }
        }
    dct1_3d(buf, N);
    const double scale = 1.0 / std::pow(4.0 * L, 3);
    const int M = n + 1;
    kernel_octant_.resize(static_cast<Eigen::Index>(M) * M * M);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b)
        for (int c = 0; c < M; ++c)
          kernel_octant_[(static_cast<Eigen::Index>(a) * M + b) * M + c] =
              scale * buf[(static_cast<std::size_t>(a) * N + b) * N + c];
  }

  // 2. Its transform on the 2n^3 padded torus, again by an even-symmetric DCT-I.
  const int M = n + 1;
  std::vector<double> oct(kernel_octant_.data(), kernel_octant_.data() + kernel_octant_.size());
  dct1_3d(oct, M);
  const int P = 2 * n;
  const int ph = n + 1;
  kernel_hat_.resize(static_cast<Eigen::Index>(P) * P * ph);
  const double vol = dx * dx * dx;
  auto fold = [&](int i) { return i <= n ? i : P - i; };
  std::size_t idx = 0;
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      for (int k = 0; k < ph; ++k, ++idx)
        kernel_hat_[idx] = vol * oct[(static_cast<std::size_t>(fold(i)) * M + fold(j)) * M + k];
  multiplicity_ = half_spectrum_multiplicity(P);

  plans_ = std::make_unique<Plans>(P);
}

FreeSpaceCoulomb::~FreeSpaceCoulomb() = default;

double FreeSpaceCoulomb::kernel_at(int i, int j, int k) const {
  const int n = grid_.n();
  i = std::abs(i), j = std::abs(j), k = std::abs(k);
  if (i > n || j > n || k > n) throw PekarError("kernel_at: offset outside the padded box");
  const int M = n + 1;
  return kernel_octant_[(static_cast<Eigen::Index>(i) * M + j) * M + k];
}

FreeSpaceCoulomb::Result FreeSpaceCoulomb::solve(const Eigen::ArrayXd& rho, bool with_potential) {
  const int n = grid_.n();
  const int P = 2 * n;
  double* pad = plans_->real;
  std::memset(pad, 0, sizeof(double) * plans_->nreal);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      std::memcpy(pad + (static_cast<std::size_t>(i) * P + j) * P, rho.data() + grid_.index(i, j, 0),
                  sizeof(double) * n);
  fftw_execute(plans_->r2c);

  auto* s = plans_->spectrum();
  const double vol = grid_.cell_volume();
  const double box = std::pow(2.0 * grid_.L(), 3);
  double acc = 0.0;
  for (std::size_t i = 0; i < plans_->ncplx; ++i) {
    acc += multiplicity_[i] * kernel_hat_[i] * std::norm(s[i]);
    s[i] *= kernel_hat_[i];
  }
  Result out;
  out.energy = acc * vol * vol / box;
  if (!with_potential) return out;

  fftw_execute(plans_->c2r);
  // c2r returns the unnormalized sum; Phi = (2L)^{-3} sum_k K_hat(k) rho_hat(k) e^{ik.x}
  const double scale = vol / box;
  out.potential.resize(static_cast<Eigen::Index>(grid_.size()));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double* src = pad + (static_cast<std::size_t>(i) * P + j) * P;
      double* dst = out.potential.data() + grid_.index(i, j, 0);
      for (int k = 0; k < n; ++k) dst[k] = scale * src[k];
    }
  return out;
}

// ---------------------------------------------------------------------------

struct SpectralWorkspace::Plans : R2CPair {
  using R2CPair::R2CPair;
};

SpectralWorkspace::SpectralWorkspace(const Grid3D& grid)
    : grid_(grid), spectrum_size_(static_cast<std::size_t>(grid.n()) * grid.n() * (grid.n() / 2 + 1)) {
  const int n = grid.n();
  plans_ = std::make_unique<Plans>(n);

  const double dk = 2.0 * std::numbers::pi / grid.L();
  const int nh = n / 2 + 1;
  k2_.resize(spectrum_size_);
  auto wave = [&](int i) { return dk * (i <= n / 2 ? i : i - n); };
  std::size_t idx = 0;
  for (int i = 0; i < n; ++i) {
    const double kx = wave(i);
    for (int j = 0; j < n; ++j) {
      const double ky = wave(j);
      for (int k = 0; k < nh; ++k, ++idx) {
        const double kz = dk * k;
        k2_[idx] = kx * kx + ky * ky + kz * kz;
      }
    }
  }
  multiplicity_ = half_spectrum_multiplicity(n);
}

SpectralWorkspace::~SpectralWorkspace() = default;

void SpectralWorkspace::forward(const Eigen::ArrayXd& f, Spectrum& out) {
  std::memcpy(plans_->real, f.data(), sizeof(double) * grid_.size());
  fftw_execute(plans_->r2c);
  out.resize(spectrum_size_);
  const double scale = grid_.cell_volume();
  const auto* c = plans_->spectrum();
  for (std::size_t i = 0; i < spectrum_size_; ++i) out[i] = scale * c[i];
}

void SpectralWorkspace::inverse(const Spectrum& s, Eigen::ArrayXd& out) {
  auto* c = plans_->spectrum();
  for (std::size_t i = 0; i < spectrum_size_; ++i) c[i] = s[i];
  fftw_execute(plans_->c2r);
  const double L = grid_.L();
  const double scale = 1.0 / (L * L * L);
  out.resize(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = scale * plans_->real[i];
}

const Eigen::ArrayXd& SpectralWorkspace::resolvent(double shift) {
  if (shift != resolvent_shift_) {
    resolvent_ = (shift + k2_).inverse();
    resolvent_shift_ = shift;
  }
  return resolvent_;
}

double SpectralWorkspace::pairing(const Spectrum& a, const Spectrum& b, const Eigen::ArrayXd& multiplier) const {
  const double L = grid_.L();
  const Eigen::ArrayXd re = (a * b.conjugate()).real();
  return (multiplicity_ * multiplier * re).sum() / (L * L * L);
}

FreeSpaceCoulomb& SpectralWorkspace::coulomb() {
  if (!coulomb_) coulomb_ = std::make_unique<FreeSpaceCoulomb>(grid_);
  return *coulomb_;
}

SpectralWorkspace& spectral_workspace(const Grid3D& grid) {
  thread_local std::map<std::pair<int, double>, std::unique_ptr<SpectralWorkspace>> cache;
  auto& slot = cache[{grid.n(), grid.L()}];
  if (!slot) slot = std::make_unique<SpectralWorkspace>(grid);
  return *slot;
}

}  // namespace pekar
