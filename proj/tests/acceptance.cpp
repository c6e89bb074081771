// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail N]... [--workers N]
//
// Exits 0 when the set of failing criteria equals the expected set.

#include "pekar/experiments.hpp"
#include "pekar/field_core.hpp"
#include "pekar/pekar_energy.hpp"
#include "pekar/product_ansatz.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

using namespace pekar;

namespace {

std::set<int> failed;
int workers = 1;

void report(int id, bool pass, const std::string& detail, double seconds) {
  std::printf("criterion %2d: %s  %s  [%.0f s]\n", id, pass ? "PASS" : "FAIL", detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) failed.insert(id);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Recorded {
  std::string name;
  std::vector<double> history;
  std::vector<double> norm_defects;
};
std::vector<Recorded> runs;

template <class R>
void record(const std::string& name, const R& r) {
  runs.push_back({name, r.history, r.norm_defects});
}

Field3D gaussian_state(const Grid3D& g, double sigma) {
  const double amp = std::pow(2.0 * M_PI * sigma * sigma, -0.75);
  return Field3D::from_function(g, [&](const Eigen::Vector3d& x) { return amp * std::exp(-x.squaredNorm() / (4 * sigma * sigma)); });
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  workers = std::max(1u, std::thread::hardware_concurrency());
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--expect-fail") && i + 1 < argc) {
      expected.insert(std::atoi(argv[++i]));
    } else if (!std::strcmp(argv[i], "--workers") && i + 1 < argc) {
      workers = std::max(1, std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N]... [--workers N]\n");
      return 2;
    }
  }

  const Grid3D grid(128, 24.0);
  const RadialGrid radial(4096, 24.0);
  const SolveOptions solve;

  // 1, 2: free problem
  auto t0 = std::chrono::steady_clock::now();
  const RadialMinimizerResult q = solve_free(radial, solve);
  record("free radial", q);
  const FreeProblem free{q.psi, q.energy, q.converged};
  const MinimizerResult q3 = minimize(Field3D(grid), solve);
  record("free 3D", q3);
  {
    const double rel = std::abs(q.energy.total - q3.energy.total) / std::abs(q.energy.total);
    const bool pass = q.converged && q3.converged && q.energy.total < 0 && q3.energy.total < 0 && rel <= 1e-3;
    report(1, pass,
           "e0 radial " + sci(q.energy.total) + ", 3D " + sci(q3.energy.total) + ", relative difference " + sci(rel) +
               " (tolerance 1e-3)",
           seconds_since(t0));
  }
  t0 = std::chrono::steady_clock::now();
  {
    const double v = std::abs(q.energy.coulomb - 2 * q.energy.kinetic) / q.energy.coulomb;
    report(2, v <= 1e-3, "virial defect " + sci(v) + " (tolerance 1e-3)", seconds_since(t0));
  }

  // 3: Newton's theorem
  t0 = std::chrono::steady_clock::now();
  {
    double worst = 0.0;
    std::ostringstream d;
    const Grid3D g3(128, 12.0);
    {
      const double sigma = 1.0;
      const double amp = std::pow(2.0 * M_PI * sigma * sigma, -0.75);
      RadialField rho = RadialField::from_function(radial, [&](double r) { return std::pow(amp * std::exp(-r * r / (4 * sigma * sigma)), 2); });
      const double dr = radial_coulomb(rho);
      const double d3 = coulomb_self_energy(density(gaussian_state(g3, sigma))).value;
      const double exact = 1.0 / (sigma * std::sqrt(M_PI));
      worst = std::max({worst, std::abs(dr - d3) / exact, std::abs(dr - exact) / exact, std::abs(d3 - exact) / exact});
      d << "gaussian radial " << sci(dr) << " 3D " << sci(d3) << " exact " << sci(exact) << "; ";
    }
    {
      const double a = 2.0;
      RadialField rho = RadialField::from_function(radial, [&](double r) { return r <= a ? 1.0 : 0.0; });
      rho.values /= radial_mass(rho);
      Field3D rho3 = Field3D::from_function(g3, [&](const Eigen::Vector3d& x) { return x.norm() <= a ? 1.0 : 0.0; });
      rho3.values /= total_mass(rho3);
      const double dr = radial_coulomb(rho);
      const double d3 = coulomb_self_energy(rho3).value;
      const double exact = 6.0 / (5.0 * a);
      worst = std::max({worst, std::abs(dr - d3) / exact, std::abs(dr - exact) / exact, std::abs(d3 - exact) / exact});
      d << "ball radial " << sci(dr) << " 3D " << sci(d3) << " exact " << sci(exact) << "; ";
    }
    d << "worst relative " << sci(worst) << " (tolerance 5e-3)";
    report(3, worst <= 5e-3, d.str(), seconds_since(t0));
  }

  // 4, 5: sweep
  t0 = std::chrono::steady_clock::now();
  SweepOptions so;
  so.grid = grid;
  so.radial = radial;
  so.solve = solve;
  so.workers = workers;
  so.keep_fields = true;
  const std::vector<SweepRow> rows = sweep_R({6.0, 8.0, 10.0}, free, so);
  for (const SweepRow& r : rows) {
    if (r.full) record("sweep full R=" + sci(r.R), *r.full);
    if (r.radial) record("sweep radial R=" + sci(r.R), *r.radial);
  }
  const double sweep_seconds = seconds_since(t0);
  const SweepRow& r8 = rows[1];
  {
    const double tol = 10.0 * 2.0 * solve.tolerance_energy;
    const bool pass = r8.converged && r8.e_full <= r8.trial_bound + 1e-3 && r8.gap > tol && r8.anisotropy > 0.5;
    report(4, pass,
           "R=8: e " + sci(r8.e_full) + " <= trial " + sci(r8.trial_bound) + " + 1e-3, gap " + sci(r8.gap) + " > " + sci(tol) +
               ", COM displacement " + sci(r8.anisotropy) + " > 0.5" + (r8.note.empty() ? "" : " [" + r8.note + "]"),
           sweep_seconds);
  }
  {
    const bool pass = rows[0].converged && rows[1].converged && rows[2].converged && rows[0].well_mass < rows[1].well_mass &&
                      rows[1].well_mass < rows[2].well_mass && rows[2].well_mass > 0.9;
    report(5, pass,
           "well mass R=6 " + sci(rows[0].well_mass) + ", R=8 " + sci(rows[1].well_mass) + ", R=10 " + sci(rows[2].well_mass) +
               " (increasing, > 0.9 at R=10)",
           0.0);
  }

  // 6: derivative
  t0 = std::chrono::steady_clock::now();
  if (r8.full) {
    const PotentialSpec Z = PotentialSpec::bump(5.0, 2.0);
    const DerivativeReport rep = fd_derivative(PotentialSpec::annular(8.0), Z, *r8.full, {0.04, 0.02, 0.01}, solve, workers);
    const double rel = rep.defect / std::abs(rep.pairing);
    std::ostringstream d;
    d << "Richardson " << sci(rep.richardson) << " vs -pairing " << sci(-rep.pairing) << ", relative " << sci(rel)
      << " (tolerance 1e-2), bracketed " << (rep.bracketed ? "yes" : "no");
    report(6, rep.converged && rel <= 1e-2 && rep.bracketed, d.str(), seconds_since(t0));
  } else {
    report(6, false, "no R=8 minimizer", 0.0);
  }

  // 7: rotational averages
  t0 = std::chrono::steady_clock::now();
  if (r8.full) {
    double worst = 0.0;
    for (const PotentialSpec& W : {PotentialSpec::coordinate_square(0), PotentialSpec::bump(5.0, 2.0), PotentialSpec::constant_value(1.0)}) {
      const RotationalDefects d = rotational_density_check(r8.full->psi, build_potential(W, grid));
      worst = std::max({worst, d.fubini, d.averaged});
    }
    report(7, worst <= 1e-4, "worst defect " + sci(worst) + " (tolerance 1e-4)", seconds_since(t0));
  } else {
    report(7, false, "no R=8 minimizer", 0.0);
  }

  // 8: completing the square
  t0 = std::chrono::steady_clock::now();
  {
    // widths keep the k_max truncation above the dk^3 quadrature floor up to k_max = 4
    const Grid3D g(64, 12.0);
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(-1.5, 1.5), width(0.45, 0.65), amp(0.5, 1.5);
    std::normal_distribution<double> nd;
    const std::vector<double> kmax{1.0, 2.0, 4.0};
    std::vector<double> eps(kmax.size(), 0.0);
    double quad = 0.0;
    for (int s = 0; s < 10; ++s) {
      struct Bump { Eigen::Vector3d c; double w, a; };
      std::vector<Bump> bumps;
      for (int b = 0; b < 3; ++b) bumps.push_back({{pos(rng), pos(rng), pos(rng)}, width(rng), amp(rng)});
      const Field3D psi = normalize(Field3D::from_function(g, [&](const Eigen::Vector3d& x) {
        double v = 0.0;
        for (const Bump& b : bumps) v += b.a * std::exp(-(x - b.c).squaredNorm() / (4 * b.w * b.w));
        return v;
      }));
      const double e_free = free_energy(psi);
      for (std::size_t i = 0; i < kmax.size(); ++i) {
        const KGrid kg = KGrid::from_spacing(kmax[i], 0.05);
        const KField rh = density_fourier(density(psi), kg);
        const PhononDisplacement zo = optimal_displacement(rh, 1.0);
        const ProductEnergy eo = product_energy(psi, zo, Field3D(g), rh);
        eps[i] = std::max(eps[i], std::abs(eo.total - e_free));
        if (i == 0) {
          PhononDisplacement z = zo;
          for (Eigen::Index m = 0; m < z.z.size(); ++m) z.z[m] += 0.01 * std::complex<double>(nd(rng), nd(rng));
          const ProductEnergy e = product_energy(psi, z, Field3D(g), rh);
          double excess = 0.0;
          for (std::size_t m = 0; m < kg.size(); ++m) excess += kg.weights()[m] * std::norm(z.z[m] - zo.z[m]);
          quad = std::max(quad, std::abs((e.total - eo.total) - excess));
        }
      }
    }
    bool halving = true;
    for (std::size_t i = 1; i < eps.size(); ++i) halving = halving && eps[i] <= 0.5 * eps[i - 1];
    std::ostringstream d;
    d << "eps(k_max=1,2,4) " << sci(eps[0]) << ", " << sci(eps[1]) << ", " << sci(eps[2]) << " (halving), quadratic identity "
      << sci(quad) << " (tolerance 1e-10)";
    report(8, halving && quad <= 1e-10, d.str(), seconds_since(t0));
  }

  // 9: Strauss bound on every converged radial minimizer
  t0 = std::chrono::steady_clock::now();
  {
    double worst = strauss_bound_check(q.psi, radial_h1_norm(q.psi));
    int checked = q.converged ? 1 : 0;
    for (const SweepRow& r : rows)
      if (r.radial && r.radial->converged) {
        worst = std::min(worst, strauss_bound_check(r.radial->psi, radial_h1_norm(r.radial->psi)));
        ++checked;
      }
    report(9, checked == 4 && worst >= 0.0, std::to_string(checked) + " minimizers, smallest margin " + sci(worst), seconds_since(t0));
  }

  // 10: invariances, monotone descent, norm preservation
  t0 = std::chrono::steady_clock::now();
  {
    // cubic operations map the box onto itself; lattice shifts wrap cells, so
    // they are applied to states whose density vanishes at the faces
    double inv = 0.0;
    if (r8.full) {
      const Field3D& psi = r8.full->psi;
      const double e = free_energy(psi);
      for (int op = 0; op < 48; op += 7) inv = std::max(inv, std::abs(free_energy(apply_cubic_symmetry(psi, op)) - e) / std::abs(e));
    }
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> pos(-2.0, 2.0);
    for (int s = 0; s < 3; ++s) {
      const Eigen::Vector3d c(pos(rng), pos(rng), pos(rng));
      const Field3D psi = normalize(Field3D::from_function(grid, [&](const Eigen::Vector3d& x) {
        return std::exp(-(x - c).squaredNorm() / 2.0) * (1.0 + 0.3 * std::sin(x[0] - 0.5 * x[2]));
      }));
      const double e = free_energy(psi);
      for (const Eigen::Vector3i sh : {Eigen::Vector3i(1, 0, 0), Eigen::Vector3i(3, -5, 7), Eigen::Vector3i(0, -8, 2)})
        inv = std::max(inv, std::abs(free_energy(translate_cells(psi, sh)) - e) / std::abs(e));
      for (int op = 3; op < 48; op += 11) inv = std::max(inv, std::abs(free_energy(apply_cubic_symmetry(psi, op)) - e) / std::abs(e));
    }
    bool monotone = true;
    double norm_worst = 0.0;
    for (const Recorded& r : runs) {
      for (std::size_t i = 1; i < r.history.size(); ++i) monotone = monotone && r.history[i] <= r.history[i - 1];
      for (double d : r.norm_defects) norm_worst = std::max(norm_worst, d);
    }
    std::ostringstream d;
    d << "invariance " << sci(inv) << " (tolerance 1e-12), " << runs.size() << " runs monotone " << (monotone ? "yes" : "no")
      << ", worst norm defect " << sci(norm_worst) << " (tolerance 1e-12)";
    report(10, r8.full && inv <= 1e-12 && monotone && norm_worst <= 1e-12, d.str(), seconds_since(t0));
  }

  std::printf("%zu of 10 criteria passed\n", 10 - failed.size());
  if (failed == expected) {
    if (!expected.empty()) std::printf("failing set matches the expected set\n");
    return 0;
  }
  std::printf("failing set differs from the expected set\n");
  return 1;
}
