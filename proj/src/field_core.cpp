#include "pekar/field_core.hpp"

#include "pekar/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace pekar {

namespace {

void require_same_grid(const Field3D& a, const Field3D& b, const char* what) {
  if (!(a.grid == b.grid)) throw PekarError(std::string(what) + ": fields live on different grids");
}

void require_finite(const Eigen::ArrayXd& v, const char* what) {
  if (!v.allFinite()) throw PekarError(std::string(what) + ": non-finite input");
}

int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

}  // namespace

double inner(const Field3D& a, const Field3D& b) {
  require_same_grid(a, b, "inner");
  return (a.values * b.values).sum() * a.grid.cell_volume();
}

double l2_norm(const Field3D& f) { return std::sqrt(inner(f, f)); }

double total_mass(const Field3D& rho) { return rho.values.sum() * rho.grid.cell_volume(); }

Field3D normalize(const Field3D& psi) {
  require_finite(psi.values, "normalize");
  const double nrm = l2_norm(psi);
  if (!(nrm > 0.0)) throw PekarError("degenerate normalization");
  return Field3D(psi.grid, psi.values / nrm);
}

Field3D density(const Field3D& psi) { return Field3D(psi.grid, psi.values.square()); }

double kinetic_energy(const Field3D& psi) {
  require_finite(psi.values, "kinetic_energy");
  auto& ws = spectral_workspace(psi.grid);
  SpectralWorkspace::Spectrum s;
  ws.forward(psi.values, s);
  return ws.pairing(s, s, ws.k2());
}

Field3D apply_negative_laplacian(const Field3D& psi) {
  auto& ws = spectral_workspace(psi.grid);
  SpectralWorkspace::Spectrum s;
  ws.forward(psi.values, s);
  s *= ws.k2();
  Field3D out(psi.grid);
  ws.inverse(s, out.values);
  return out;
}

Eigen::Vector3d center_of_mass(const Field3D& rho) {
  const Grid3D& g = rho.grid;
  const int n = g.n();
  Eigen::Vector3d m = Eigen::Vector3d::Zero();
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = rho(i, j, k);
        m += v * g.point(i, j, k);
        total += v;
      }
  if (total == 0.0) return Eigen::Vector3d::Zero();
  return m / total;
}

double mass_outside_ball(const Field3D& rho, const Eigen::Vector3d& center, double radius) {
  const Grid3D& g = rho.grid;
  const int n = g.n();
  const double r2 = radius * radius;
  double out = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if ((g.point(i, j, k) - center).squaredNorm() > r2) out += rho(i, j, k);
  return out * g.cell_volume();
}

CoulombEnergy coulomb_self_energy(const Field3D& rho) {
  require_finite(rho.values, "coulomb_self_energy");
  if (rho.values.minCoeff() < -1e-12) throw PekarError("coulomb_self_energy: density has negative entries");
  CoulombEnergy out;
  out.value = spectral_workspace(rho.grid).coulomb().solve(rho.values, false).energy;
  const Grid3D& g = rho.grid;
  const int n = g.n();
  const double edge = 0.4 * g.L();
  double layer = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (g.point(i, j, k).cwiseAbs().maxCoeff() > edge) layer += rho(i, j, k);
  out.outside_mass = layer * g.cell_volume();
  out.support_warning = out.outside_mass > 1e-6;
  return out;
}

Field3D coulomb_potential(const Field3D& rho) {
  return Field3D(rho.grid, spectral_workspace(rho.grid).coulomb().solve(rho.values, true).potential);
}

Field3D translate_cells(const Field3D& f, const Eigen::Vector3i& shift) {
  const int n = f.grid.n();
  Field3D out(f.grid);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out(wrap(i + shift[0], n), wrap(j + shift[1], n), wrap(k + shift[2], n)) = f(i, j, k);
  return out;
}

Field3D apply_cubic_symmetry(const Field3D& f, int op) {
  if (op < 0 || op >= 48) throw PekarError("apply_cubic_symmetry: op must be in [0, 48)");
  static constexpr std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}}};
  const auto& p = perms[op / 8];
  const int signs = op % 8;
  const int n = f.grid.n();
  Field3D out(f.grid);
  std::array<int, 3> src{};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::array<int, 3> idx{i, j, k};
        for (int a = 0; a < 3; ++a) {
          const int v = idx[p[a]];
          src[a] = (signs >> a) & 1 ? n - 1 - v : v;
        }
        out(i, j, k) = f(src[0], src[1], src[2]);
      }
  return out;
}

// ---------------------------------------------------------------------------

double radial_norm_squared(const RadialField& u) {
  return 4.0 * std::numbers::pi * (u.grid.weights() * u.values.square()).sum();
}

double radial_mass(const RadialField& rho) {
  return 4.0 * std::numbers::pi * (rho.grid.weights() * rho.values).sum();
}

RadialField normalize(const RadialField& u) {
  require_finite(u.values, "normalize");
  const double n2 = radial_norm_squared(u);
  if (!(n2 > 0.0)) throw PekarError("degenerate normalization");
  return RadialField(u.grid, u.values / std::sqrt(n2));
}

double radial_kinetic(const RadialField& u) {
  const RadialGrid& g = u.grid;
  const double h = g.h();
  double t = 0.0;
  for (int j = 0; j + 1 < g.m(); ++j) {
    const double du = (u.values[j + 1] - u.values[j]) / h;
    const double r0 = g.r(j), r1 = g.r(j + 1);
    t += du * du * (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
  }
  return 4.0 * std::numbers::pi * t;
}

RadialField radial_coulomb_potential(const RadialField& rho) {
  const RadialGrid& g = rho.grid;
  const int m = g.m();
  const Eigen::ArrayXd q = 4.0 * std::numbers::pi * g.weights() * rho.values;
  RadialField phi(g);
  // outer[i] = sum_{j > i} q_j / r_j
  double outer = 0.0;
  Eigen::ArrayXd tail(m);
  for (int j = m - 1; j >= 0; --j) {
    tail[j] = outer;
    if (j > 0) outer += q[j] / g.r(j);
  }
  double inner_sum = 0.0;
  for (int i = 0; i < m; ++i) {
    inner_sum += q[i];
    // node 0 stands for the ball r < h/2
    const double ri = i == 0 ? 0.5 * g.h() : g.r(i);
    phi.values[i] = inner_sum / ri + tail[i];
  }
  return phi;
}

double radial_coulomb(const RadialField& rho) {
  require_finite(rho.values, "radial_coulomb");
  if (rho.values.minCoeff() < -1e-12) throw PekarError("radial_coulomb: density has negative entries");
  const RadialField phi = radial_coulomb_potential(rho);
  return 4.0 * std::numbers::pi * (rho.grid.weights() * rho.values * phi.values).sum();
}

double radial_h1_norm(const RadialField& u) { return std::sqrt(radial_kinetic(u) + radial_norm_squared(u)); }

double strauss_bound(double r, double h1_norm) {
  return std::sqrt(2.0) / std::sqrt(4.0 * std::numbers::pi) * h1_norm / r;
}

double strauss_bound_check(const RadialField& u, double h1_norm) {
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < u.grid.m(); ++j) {
    const double r = u.grid.r(j);
    if (r < 2.0) continue;
    margin = std::min(margin, strauss_bound(r, h1_norm) - std::abs(u.values[j]));
  }
  return margin;
}

// ---------------------------------------------------------------------------

double interpolate(const Field3D& f, const Eigen::Vector3d& p, Interpolation scheme) {
  const Grid3D& g = f.grid;
  const int n = g.n();
  const double dx = g.dx();
  std::array<int, 3> base{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    const double s = (p[a] + 0.5 * g.L()) / dx - 0.5;
    const double fl = std::floor(s);
    base[a] = static_cast<int>(fl);
    t[a] = s - fl;
  }
  if (scheme == Interpolation::trilinear) {
    double acc = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          const double w = (a ? t[0] : 1 - t[0]) * (b ? t[1] : 1 - t[1]) * (c ? t[2] : 1 - t[2]);
          acc += w * f(wrap(base[0] + a, n), wrap(base[1] + b, n), wrap(base[2] + c, n));
        }
    return acc;
  }
  // 4-point Lagrange weights on offsets -1, 0, 1, 2
  std::array<std::array<double, 4>, 3> w{};
  for (int a = 0; a < 3; ++a) {
    const double x = t[a];
    w[a][0] = -x * (x - 1.0) * (x - 2.0) / 6.0;
    w[a][1] = (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0;
    w[a][2] = -(x + 1.0) * x * (x - 2.0) / 2.0;
    w[a][3] = (x + 1.0) * x * (x - 1.0) / 6.0;
  }
  double acc = 0.0;
  for (int a = 0; a < 4; ++a) {
    const int i = wrap(base[0] + a - 1, n);
    double acc_j = 0.0;
    for (int b = 0; b < 4; ++b) {
      const int j = wrap(base[1] + b - 1, n);
      double acc_k = 0.0;
      for (int c = 0; c < 4; ++c) acc_k += w[2][c] * f(i, j, wrap(base[2] + c - 1, n));
      acc_j += w[1][b] * acc_k;
    }
    acc += w[0][a] * acc_j;
  }
  return acc;
}

RadialGrid covering_radial_grid(const Grid3D& grid) {
  const double r_max = 0.5 * std::sqrt(3.0) * grid.L() * (1.0 + 1e-9);
  const int m = static_cast<int>(std::ceil(r_max / (0.25 * grid.dx()))) + 1;
  return RadialGrid(m, r_max);
}

SphericalAverage spherical_average(const Field3D& f, const RadialGrid& rgrid, const SphereAverageOptions& opts) {
  require_finite(f.values, "spherical_average");
  const SphereRule rule = lebedev_rule(opts.rule_points);
  SphericalAverage out{RadialField(rgrid), std::vector<bool>(rgrid.m(), false)};
  const double half = 0.5 * f.grid.L();
  for (int j = 0; j < rgrid.m(); ++j) {
    const double r = rgrid.r(j);
    out.extrapolated[j] = r + opts.center.cwiseAbs().maxCoeff() > half;
    if (r == 0.0) {
      out.profile.values[j] = interpolate(f, opts.center, opts.interpolation);
      continue;
    }
    double acc = 0.0;
    for (std::size_t a = 0; a < rule.size(); ++a) {
      const Eigen::Vector3d p = opts.center + r * rule.points[a];
      if (p.cwiseAbs().maxCoeff() <= half) acc += rule.weights[a] * interpolate(f, p, opts.interpolation);
    }
    out.profile.values[j] = acc;
  }
  return out;
}

SphericalAverage spherical_average(const Field3D& f) {
  return spherical_average(f, covering_radial_grid(f.grid));
}

double evaluate_radial_cubic(const RadialField& u, double r) {
  const RadialGrid& rg = u.grid;
  const int m = rg.m();
  r = std::abs(r);
  const double s = r / rg.h();
  const int j = static_cast<int>(std::floor(s));
  if (j + 2 >= m) return u.at(r);
  // even extension across r = 0
  auto node = [&](int i) { return u.values[i < 0 ? -i : i]; };
  const double x = s - j;
  return -x * (x - 1.0) * (x - 2.0) / 6.0 * node(j - 1) + (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0 * node(j) -
         (x + 1.0) * x * (x - 2.0) / 2.0 * node(j + 1) + (x + 1.0) * x * (x - 1.0) / 6.0 * node(j + 2);
}

Field3D lift_radial(const RadialField& u, const Grid3D& grid) {
  require_finite(u.values, "lift_radial");
  const double needed = 0.5 * std::sqrt(3.0) * grid.L();
  if (u.grid.r_max() < needed * (1.0 - 1e-12))
    throw PekarError("lift_radial: r_max " + std::to_string(u.grid.r_max()) + " is below sqrt(3) L / 2 = " +
                     std::to_string(needed));
  return Field3D::from_function(grid, [&](const Eigen::Vector3d& x) { return evaluate_radial_cubic(u, x.norm()); });
}

}  // namespace pekar
