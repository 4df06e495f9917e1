#pragma once

// Decoherence-free encodings, the three target Hamiltonians with their dark
// states, piecewise control schedules and the Wilson-loop holonomy of the
// dark subspace.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hqc/dfs_basis.hpp"
#include "hqc/qcore.hpp"
#include "hqc/tqda.hpp"

namespace hqc {

enum class GateKind { bitphase, phase, cp };
enum class DfsName { C1, C2 };

std::string to_string(GateKind k);
GateKind gate_kind_from_string(std::string_view s);

/// Logical and ancillary labels of a DFS together with their physical
/// product states. Labels are stored in DFS basis order; physical indices
/// refer to the register formed by physical_qubits in listed order, first
/// qubit most significant.
struct DfsEncoding {
  DfsName name = DfsName::C1;
  std::vector<std::string> labels;
  std::vector<std::size_t> physical_qubits;  ///< 1-based NV positions
  std::map<std::string, std::size_t> physical_index;

  static DfsEncoding c1();
  static DfsEncoding c2();
  static DfsEncoding for_kind(GateKind k);

  std::size_t n_qubits() const { return physical_qubits.size(); }
  std::size_t dim() const { return labels.size(); }
  HilbertLayout layout() const;
  /// Qubit register layout, factors labelled nv<k> by physical position.
  HilbertLayout register_layout() const;
  std::size_t basis_position(std::string_view label) const;
  /// Labels of the computational (non-ancillary) states, in logical order.
  std::vector<std::string> computational_labels() const;
  /// Logical amplitudes (in computational_labels order) as a DFS ket.
  Ket logical_to_dfs(const Vector& logical) const;
  Vector dfs_to_logical(const Vector& dfs) const;
  /// DFS ket written on the qubit register.
  Ket to_register(const Ket& dfs) const;
};

/// CP encoding between logical qubits m and n of a register with
/// total_logical logical qubits (four NV centres each).
DfsEncoding cp_encoding_for(std::size_t m, std::size_t n, std::size_t total_logical);

/// Target Hamiltonian on the DFS basis of enc.
Op build_h0(GateKind kind, const ControlPoint& p, const DfsEncoding& enc);
Op build_h0(GateKind kind, const ControlPoint& p);

/// Orthonormal zero-energy eigenvectors of build_h0(kind, p), in the fixed
/// gauge used by the holonomy: bit-phase {D'0, D'1}, phase {D0, D1},
/// cp {D''0 .. D''3}.
std::vector<Ket> dark_states(GateKind kind, const ControlPoint& p);

enum class Ramp { cosine, linear };

struct Segment {
  double theta_start = 0.0;
  double theta_end = 0.0;
  double phi_start = 0.0;
  double phi_end = 0.0;
  double duration = 0.0;
  Ramp ramp = Ramp::cosine;
};

/// Piecewise (theta(t), phi(t)) trajectory. Cosine ramps use
/// s(tau) = (1 - cos(pi tau)) / 2, so both rates vanish at every knot.
class PulseSchedule {
 public:
  PulseSchedule() = default;
  PulseSchedule(std::vector<Segment> segments, double lambda_prime);

  /// Control point at t. Outside [0, T] the first and last segment formulas
  /// are continued, which keeps finite-difference stencils smooth at the ends.
  ControlPoint at(double t) const;
  double total_duration() const;
  std::vector<double> knots() const;
  double shortest_segment() const;
  double lambda_prime() const { return lambda_prime_; }
  const std::vector<Segment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  /// Same path with every duration multiplied by total / total_duration().
  PulseSchedule rescaled(double total) const;

 private:
  std::vector<Segment> segments_;
  double lambda_prime_ = 0.0;
};

/// Bit-phase: three legs are open, four include the closing leg
/// phi: phi_c -> 0 at theta = 0. Phase and cp take three durations.
PulseSchedule make_schedule(GateKind kind, double phi_c, std::span<const double> durations, Ramp ramp,
                            double lambda_prime);

struct HolonomyResult {
  std::vector<std::string> dark_basis_labels;
  Op unitary;
  /// Phase on the single non-trivial dark state (phase, cp) or the rotation
  /// angle beta_2 of U_y (bit-phase).
  std::optional<double> berry_phase;
};

/// Path-ordered exponential of i A dt with A_kl = i <D_k | dD_l/dt>, fourth-order
/// Magnus steps per segment. Raises loop_closure_error when the dark frame does
/// not return to itself.
HolonomyResult wilson_loop(GateKind kind, const PulseSchedule& schedule, std::size_t steps);

/// Connection matrix A at time t of the schedule.
Matrix dark_connection(GateKind kind, const PulseSchedule& schedule, double t);

/// U_y = exp(i a sigma^y) with sigma^y = i(|0><1| - |1><0|), U_z = exp(i a |1><1|),
/// U_cz = exp(i a |11><11|); on the logical basis.
Op ideal_gate(GateKind kind, double angle);

/// Projector onto the instantaneous dark subspace, DFS basis.
Matrix dark_projector(GateKind kind, const ControlPoint& p);

}  // namespace hqc
