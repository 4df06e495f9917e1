#pragma once

// Counterdiabatic (transitionless-driving) terms. The numeric construction
// from spectral projectors is the reference; the closed forms are the gate
// families' printed matrices and are cross-checked against it.

#include <functional>
#include <optional>
#include <span>

#include "hqc/qcore.hpp"

namespace hqc {

/// Instantaneous control angles, their rates, and the coupling scale.
struct ControlPoint {
  double theta = 0.0;         ///< rad, in [0, pi]
  double phi = 0.0;           ///< rad, in [0, 2pi)
  double theta_dot = 0.0;     ///< rad per time unit
  double phi_dot = 0.0;       ///< rad per time unit
  double lambda_prime = 0.0;  ///< angular frequency, >= 0

  void validate() const;
};

/// Time-parametrized Hamiltonian on a fixed layout. The generator is assumed
/// twice differentiable in t.
struct ParamHamiltonian {
  HilbertLayout layout;
  std::function<Op(double)> generator;

  Op operator()(double t) const;
};

/// Hamiltonian obtained by moving a control point linearly along its rates:
/// t -> builder(theta + t*theta_dot, phi + t*phi_dot). Its time derivative at
/// t = 0 is the chain-rule derivative at the control point.
ParamHamiltonian along_control_point(const HilbertLayout& layout, std::function<Op(const ControlPoint&)> builder,
                                     const ControlPoint& p);

enum class Gauge { parallel_transport };

struct CdTerm {
  Op matrix;
  Gauge gauge = Gauge::parallel_transport;
};

/// H1 = (i/2) sum_n [dP_n/dt, P_n] with dP_n/dt by central difference. The
/// eigenprojectors at t - h, t, t + h are grouped by eigenvalue; a change in
/// group count raises level_crossing_error.
CdTerm counterdiabatic_numeric(const ParamHamiltonian& h0, double t, double fd_step,
                               std::optional<double> degeneracy_tol = {});

/// Core of counterdiabatic_numeric on pre-assembled projector sets (one entry
/// per eigenvalue group, ascending).
Matrix counterdiabatic_from_projectors(std::span<const Matrix> before, std::span<const Matrix> at,
                                       std::span<const Matrix> after, double fd_step);

/// Bit-phase gate term on {|a1>, |0>_L, |1>_L, |a2>}.
CdTerm cd_bitphase_closed_form(const ControlPoint& p);
/// Phase gate term; acts on {|a1>, |1>_L, |a2>} and vanishes on |0>_L.
CdTerm cd_phase_closed_form(const ControlPoint& p);
/// Controlled-phase term on C2; acts on {|a3>, |11>_L, |a4>}.
CdTerm cd_cp_closed_form(const ControlPoint& p);

/// max_n |P_n H1 P_n|_max over the eigenprojectors of h0.
double parallel_transport_defect(const Op& h0, const Matrix& h1, std::optional<double> degeneracy_tol = {});

}  // namespace hqc
