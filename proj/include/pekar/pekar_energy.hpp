#pragma once

#include "pekar/grid.hpp"

namespace pekar {

/// Switches for the functional; disabling Coulomb leaves the linear
/// Schroedinger energy, which is useful for sanity checks.
struct EnergyModel {
  bool coulomb = true;
};

struct ELResidual {
  double residual_norm = 0.0;  ///< || H psi - mu psi ||_2
  double multiplier = 0.0;     ///< mu = <psi, H psi>
};

/// Energy together with the mean-field operator applied to psi,
/// H psi = (-Laplacian - 2 Phi_rho - V) psi. The L2 gradient of the
/// functional is 2 H psi.
struct PekarEvaluation {
  EnergyBreakdown energy;
  Field3D h_psi;
};

struct RadialPekarEvaluation {
  EnergyBreakdown energy;
  RadialField h_psi;
};

/// E_V(psi) = ||grad psi||^2 - D(|psi|^2, |psi|^2) - integral V |psi|^2.
EnergyBreakdown pekar_energy(const Field3D& psi, const Field3D& V, const EnergyModel& model = {});
/// E_0(psi) = kinetic - Coulomb.
double free_energy(const Field3D& psi);
ELResidual el_residual(const Field3D& psi, const Field3D& V, const EnergyModel& model = {});

PekarEvaluation evaluate_pekar(const Field3D& psi, const Field3D& V, bool with_gradient,
                               const EnergyModel& model = {});

/// Radial discretization: P1 kinetic, lumped mass, Newton's-theorem Coulomb.
EnergyBreakdown radial_pekar_energy(const RadialField& u, const RadialField& V, const EnergyModel& model = {});
ELResidual radial_el_residual(const RadialField& u, const RadialField& V, const EnergyModel& model = {});
RadialPekarEvaluation evaluate_radial_pekar(const RadialField& u, const RadialField& V, bool with_gradient,
                                            const EnergyModel& model = {});

}  // namespace pekar
