#include "pekar/pekar_energy.hpp"

#include "pekar/field_core.hpp"
#include "pekar/spectral.hpp"

#include <cmath>
#include <numbers>

namespace pekar {

PekarEvaluation evaluate_pekar(const Field3D& psi, const Field3D& V, bool with_gradient, const EnergyModel& model) {
  if (!(psi.grid == V.grid)) throw PekarError("evaluate_pekar: psi and V live on different grids");
  if (!psi.values.allFinite()) throw PekarError("evaluate_pekar: non-finite wave function");
  auto& ws = spectral_workspace(psi.grid);

  SpectralWorkspace::Spectrum s_psi;
  ws.forward(psi.values, s_psi);
  const double kinetic = ws.pairing(s_psi, s_psi, ws.k2());

  const Eigen::ArrayXd rho = psi.values.square();
  FreeSpaceCoulomb::Result hartree;
  if (model.coulomb) hartree = ws.coulomb().solve(rho, with_gradient);
  const double coulomb = hartree.energy;
  const double potential = (V.values * rho).sum() * psi.grid.cell_volume();

  PekarEvaluation out{EnergyBreakdown::make(kinetic, coulomb, potential), Field3D()};
  if (!with_gradient) return out;

  out.h_psi = Field3D(psi.grid);
  s_psi *= ws.k2();
  ws.inverse(s_psi, out.h_psi.values);
  out.h_psi.values -= V.values * psi.values;
  if (model.coulomb) out.h_psi.values -= 2.0 * hartree.potential * psi.values;
  return out;
}

EnergyBreakdown pekar_energy(const Field3D& psi, const Field3D& V, const EnergyModel& model) {
  return evaluate_pekar(psi, V, false, model).energy;
}

double free_energy(const Field3D& psi) {
  return kinetic_energy(psi) - coulomb_self_energy(density(psi)).value;
}

ELResidual el_residual(const Field3D& psi, const Field3D& V, const EnergyModel& model) {
  const PekarEvaluation ev = evaluate_pekar(psi, V, true, model);
  ELResidual out;
  out.multiplier = inner(psi, ev.h_psi);
  out.residual_norm = l2_norm(Field3D(psi.grid, ev.h_psi.values - out.multiplier * psi.values));
  return out;
}

// ---------------------------------------------------------------------------

RadialPekarEvaluation evaluate_radial_pekar(const RadialField& u, const RadialField& V, bool with_gradient,
                                            const EnergyModel& model) {
  if (!(u.grid == V.grid)) throw PekarError("evaluate_radial_pekar: u and V live on different grids");
  if (!u.values.allFinite()) throw PekarError("evaluate_radial_pekar: non-finite wave function");
  const RadialGrid& g = u.grid;
  const double four_pi = 4.0 * std::numbers::pi;

  const RadialField rho(g, u.values.square());
  const double kinetic = radial_kinetic(u);
  RadialField phi(g);
  double coulomb = 0.0;
  if (model.coulomb) {
    phi = radial_coulomb_potential(rho);
    coulomb = four_pi * (g.weights() * rho.values * phi.values).sum();
  }
  const double potential = four_pi * (g.weights() * V.values * rho.values).sum();

  RadialPekarEvaluation out{EnergyBreakdown::make(kinetic, coulomb, potential), RadialField()};
  if (!with_gradient) return out;

  const int m = g.m();
  const double h = g.h();
  Eigen::ArrayXd lap = Eigen::ArrayXd::Zero(m);
  for (int j = 0; j + 1 < m; ++j) {
    const double r0 = g.r(j), r1 = g.r(j + 1);
    const double c = (r1 * r1 * r1 - r0 * r0 * r0) / (3.0 * h * h);
    const double flux = c * (u.values[j + 1] - u.values[j]);
    lap[j] -= flux;
    lap[j + 1] += flux;
  }
  out.h_psi = RadialField(g, lap / g.weights() - V.values * u.values);
  if (model.coulomb) out.h_psi.values -= 2.0 * phi.values * u.values;
  return out;
}

EnergyBreakdown radial_pekar_energy(const RadialField& u, const RadialField& V, const EnergyModel& model) {
  return evaluate_radial_pekar(u, V, false, model).energy;
}

ELResidual radial_el_residual(const RadialField& u, const RadialField& V, const EnergyModel& model) {
  const RadialPekarEvaluation ev = evaluate_radial_pekar(u, V, true, model);
  const Eigen::ArrayXd& w = u.grid.weights();
  const double four_pi = 4.0 * std::numbers::pi;
  ELResidual out;
  out.multiplier = four_pi * (w * u.values * ev.h_psi.values).sum();
  const Eigen::ArrayXd r = ev.h_psi.values - out.multiplier * u.values;
  out.residual_norm = std::sqrt(four_pi * (w * r.square()).sum());
  return out;
}

}  // namespace pekar
