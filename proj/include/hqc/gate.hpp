#pragma once

// End-to-end gate simulation: builds H0 + H1 on a chosen physical layer,
// propagates a logical input and scores it against the ideal holonomic gate.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hqc/dynamics.hpp"
#include "hqc/holonomy.hpp"
#include "hqc/nvplatform.hpp"

namespace hqc {

/// dfs_abstract: the DFS matrices themselves, closed system only.
/// effective: flip-flop register (one qubit per NV centre), dressed-state
///   decay of the cavity photon folded into qubit operators.
/// full_cavity: the same register tensored with a truncated cavity mode;
///   the cavity Stark shift carries the photon-number dependence and the
///   photon loss acts on the cavity annihilation operator.
enum class Layer { dfs_abstract, effective, full_cavity };
enum class CdSource { numeric, closed_form, none };

std::string to_string(Layer l);
Layer layer_from_string(std::string_view s);
std::string to_string(CdSource c);
CdSource cd_source_from_string(std::string_view s);

struct NoiseRates {
  double kappa = 0.0;      ///< rad/us, cavity decay
  double gamma = 0.0;      ///< rad/us, collective relaxation S^-
  double gamma_phi = 0.0;  ///< rad/us, collective dephasing S^z

  bool any() const { return kappa > 0.0 || gamma > 0.0 || gamma_phi > 0.0; }
};

struct GateSetup {
  GateKind kind = GateKind::phase;
  PulseSchedule schedule;
  Layer layer = Layer::dfs_abstract;
  CdSource counterdiabatic = CdSource::numeric;
  NoiseRates noise;
  /// Detunings and laser phases of the encoding qubits, in register order.
  /// Needed for kappa and for the Stark shift; may stay empty otherwise.
  NvDriveConfig drive;
  std::optional<DfsEncoding> encoding;  ///< defaults to DfsEncoding::for_kind
  Vector psi_in;                        ///< logical amplitudes
  std::string initial_label = "psi_in";
  std::string schedule_id = "schedule";
  std::optional<double> ideal_angle;  ///< overrides the Wilson-loop angle
  std::size_t wilson_steps = 2000;
  std::size_t samples = 100;
  double tol = 1e-9;
  double fd_fraction = 1e-4;  ///< numeric H1 step as a fraction of the shortest segment
};

struct GateReport {
  GateKind kind = GateKind::phase;
  Layer layer = Layer::dfs_abstract;
  double fidelity = 0.0;
  std::string initial_label;
  std::string schedule_id;
  nlohmann::ordered_json parameters;
  double wall_time = 0.0;  ///< seconds
  double total_time = 0.0;
  double ideal_angle = 0.0;
  std::optional<double> berry_phase;      ///< Wilson-loop angle, when computed
  std::optional<double> simulated_angle;  ///< angle read off the final state
  double dark_leakage = 0.0;              ///< at the final time
  double max_dark_leakage = 0.0;
  double logical_population = 0.0;  ///< final population of the computational DFS states
  double max_trace_error = 0.0;
  double max_symmetrization = 0.0;
  double min_eigenvalue = 0.0;
  std::size_t full_dim = 0;
  std::size_t reduced_dim = 0;
  OdeStats stats;
  Matrix logical_state;  ///< final density matrix on the computational states
  Ket ideal_state;       ///< target in the propagation space
  Trajectory trajectory;
};

/// Full-space index of every DFS basis state on the given layer (cavity in
/// vacuum for full_cavity).
std::vector<std::size_t> dfs_embedding(const DfsEncoding& enc, Layer layer, std::size_t fock_cutoff);
HilbertLayout layer_layout(const DfsEncoding& enc, Layer layer, std::size_t fock_cutoff);

/// H0 + H1 on the DFS basis at time t of the schedule.
Matrix dfs_hamiltonian(GateKind kind, const PulseSchedule& schedule, const DfsEncoding& enc, CdSource cd, double t,
                       double fd_step);

/// Angle of the ideal gate realized by the schedule; open bit-phase paths
/// ending at theta = 0 are closed at theta = 0 first.
HolonomyResult schedule_holonomy(GateKind kind, const PulseSchedule& schedule, std::size_t steps);

/// Throws usage_error, layout_error or guard_violation for setups run_gate
/// would reject before propagating.
void validate_setup(const GateSetup& setup);

GateReport run_gate(const GateSetup& setup);

/// Closed-system propagator restricted to the computational states: column k
/// holds the final logical amplitudes for logical basis input k. setup.psi_in
/// and setup.noise are ignored.
Matrix logical_propagator(const GateSetup& setup);

/// Sparse Kronecker product.
SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b);

}  // namespace hqc
