#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace pekar {

/// Raised when an input violates a documented precondition.
class PekarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform periodic box [-L/2, L/2)^3 with n cells per axis.
///
/// Cell centers sit at (i + 1/2) dx - L/2 so the box is symmetric under the
/// 48 cubic lattice operations about the origin.
class Grid3D {
 public:
  Grid3D() = default;
  Grid3D(int n, double L);

  int n() const { return n_; }
  double L() const { return L_; }
  double dx() const { return L_ / n_; }
  double cell_volume() const { return dx() * dx() * dx(); }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  double coord(int i) const { return (i + 0.5) * dx() - 0.5 * L_; }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
  }
  Eigen::Vector3d point(int i, int j, int k) const {
    return {coord(i), coord(j), coord(k)};
  }

  bool operator==(const Grid3D& o) const { return n_ == o.n_ && L_ == o.L_; }

 private:
  int n_ = 0;
  double L_ = 0.0;
};

/// Real scalar field sampled at cell centers, row-major (x fastest-varying last).
struct Field3D {
  Grid3D grid;
  Eigen::ArrayXd values;

  Field3D() = default;
  explicit Field3D(const Grid3D& g) : grid(g), values(Eigen::ArrayXd::Zero(g.size())) {}
  Field3D(const Grid3D& g, Eigen::ArrayXd v);

  double& operator()(int i, int j, int k) { return values[grid.index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return values[grid.index(i, j, k)]; }

  template <class F>
  static Field3D from_function(const Grid3D& g, F&& f) {
    Field3D out(g);
    const int n = g.n();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          out(i, j, k) = f(Eigen::Vector3d(g.coord(i), g.coord(j), g.coord(k)));
    return out;
  }
};

/// Uniform radial nodes r_j = j h on [0, r_max] with P1 lumped weights.
///
/// weights()[j] = integral of hat_j(r) r^2 dr, so sum_j f_j w_j reproduces
/// integral f(r) r^2 dr exactly for piecewise-linear f.
class RadialGrid {
 public:
  RadialGrid() = default;
  RadialGrid(int m, double r_max);

  int m() const { return m_; }
  double r_max() const { return r_max_; }
  double h() const { return r_max_ / (m_ - 1); }
  double r(int j) const { return j * h(); }
  const Eigen::ArrayXd& nodes() const { return nodes_; }
  const Eigen::ArrayXd& weights() const { return weights_; }

  bool operator==(const RadialGrid& o) const { return m_ == o.m_ && r_max_ == o.r_max_; }

 private:
  int m_ = 0;
  double r_max_ = 0.0;
  Eigen::ArrayXd nodes_;
  Eigen::ArrayXd weights_;
};

struct RadialField {
  RadialGrid grid;
  Eigen::ArrayXd values;

  RadialField() = default;
  explicit RadialField(const RadialGrid& g) : grid(g), values(Eigen::ArrayXd::Zero(g.m())) {}
  RadialField(const RadialGrid& g, Eigen::ArrayXd v);

  template <class F>
  static RadialField from_function(const RadialGrid& g, F&& f) {
    RadialField out(g);
    for (int j = 0; j < g.m(); ++j) out.values[j] = f(g.r(j));
    return out;
  }

  /// Piecewise-linear evaluation; zero beyond r_max.
  double at(double r) const;
};

/// Components of the Pekar functional. `coulomb` and `potential` are stored
/// as positive magnitudes; total = kinetic - coulomb - potential.
struct EnergyBreakdown {
  double kinetic = 0.0;
  double coulomb = 0.0;
  double potential = 0.0;
  double total = 0.0;

  static EnergyBreakdown make(double kinetic, double coulomb, double potential) {
    return {kinetic, coulomb, potential, kinetic - coulomb - potential};
  }
};

}  // namespace pekar
