#pragma once

// NV-centre / microcavity layer: coupling-strength formulas, the Raman
// interaction Hamiltonian, the dispersive flip-flop Hamiltonian and the
// inverse problem from pair couplings to laser detunings.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SparseCore>

#include "hqc/holonomy.hpp"
#include "hqc/qcore.hpp"

namespace hqc {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::ColMajor>;

struct NvParams {
  double Gamma0 = 0.0;       ///< rad/us, spontaneous decay of |e>
  double field_ratio = 0.0;  ///< |E(r)/E_max|
  double nu = 0.0;           ///< cyclic, 1/us (|e> <-> |0> transition)
  double V_m = 0.0;          ///< um^3
  double Omega_L = 0.0;      ///< rad/us
  double Delta = 0.0;        ///< rad/us
  double omega_c = 0.0;      ///< rad/us
  double omega_10 = 0.0;     ///< rad/us

  void validate() const;
};

/// Vacuum Rabi coupling G = Gamma0 |E/E_max| sqrt(V_a / V_m) with
/// V_a = 3 c^3 / (4 pi nu^2 Gamma0), the mode-volume ratio evaluated with the
/// cyclic decay rate Gamma0 / 2pi.
double coupling_strength_G(const NvParams& p);

/// V_a in um^3.
double atomic_volume(const NvParams& p);

/// g = G Omega_L (1/(Delta + delta) + 1/Delta). Appends a note to warnings
/// when Delta < 10 G or Delta < 10 Omega_L.
double raman_coupling_g(double G, double Omega_L, double Delta, double delta,
                        std::vector<std::string>* warnings = nullptr);

/// lambda' = (g^2 / 2)(1/delta_j + 1/delta_k), signed.
double effective_rabi(double g, double delta_j, double delta_k);

struct NvCenterDrive {
  bool laser_on = true;
  double delta = 0.0;  ///< rad/us, signed two-photon detuning
  double phi = 0.0;    ///< rad
};

struct NvDriveConfig {
  double g = 0.0;  ///< rad/us, common Raman coupling
  std::vector<NvCenterDrive> centers;
  std::size_t fock_cutoff = 2;  ///< highest photon number kept
  bool include_stark = false;
  double dispersive_ratio = 10.0;  ///< guard |delta_j| >= ratio * g
  bool guard_enabled = true;

  std::size_t n_centers() const { return centers.size(); }
  /// Throws guard_violation("dispersive") or usage_error.
  void validate() const;
  /// g_j / delta_j for lasers that are on, 0 otherwise.
  std::vector<double> dispersive_ratios() const;
};

struct PairCoupling {
  double lambda = 0.0;  ///< rad/us
  double phase = 0.0;   ///< rad
};

/// Product of number operators over the listed qubits, times value.
struct LevelShift {
  std::vector<std::size_t> qubits;  ///< 1-based
  double value = 0.0;               ///< rad/us
};

/// H = sum over pairs lambda (e^{i phase} s_j^- s_k^+ + h.c.) plus level shifts.
/// Qubits are 1-based. (j, k) and (k, j) may both be given if their entries
/// are conjugate (equal lambda, opposite phase).
struct PairCouplingProgram {
  std::size_t n_centers = 0;
  std::map<std::pair<std::size_t, std::size_t>, PairCoupling> pairs;
  std::vector<LevelShift> level_shifts;

  void set(std::size_t j, std::size_t k, double lambda, double phase = 0.0);
  /// Coupling in the (j, k) orientation; zero when absent.
  PairCoupling get(std::size_t j, std::size_t k) const;
  /// Throws layout_error on asymmetric entries or out-of-range qubits.
  void validate() const;
  /// Canonical (j < k) form.
  std::map<std::pair<std::size_t, std::size_t>, PairCoupling> canonical() const;
};

/// Qubit register layout nv1 .. nvN.
HilbertLayout nv_register(std::size_t n);

/// Sparse s_j^- s_k^+ (maps an excitation from j to k) on an n-qubit register.
SparseMatrix flip_flop(std::size_t n, std::size_t j, std::size_t k);
/// Sparse product of number operators on an n-qubit register.
SparseMatrix number_product(std::size_t n, const std::vector<std::size_t>& qubits);

/// Flip-flop Hamiltonian on the register. With cfg.include_stark adds
/// (g^2/delta_j) |1><1|_j for every laser-on centre (vacuum cavity).
Op build_effective_hamiltonian(const PairCouplingProgram& prog, const NvDriveConfig& cfg);
SparseMatrix effective_hamiltonian_sparse(const PairCouplingProgram& prog, const NvDriveConfig& cfg);

/// sum_j g a s_j^+ e^{-i(delta_j t - phi_j)} + h.c. on register (x) Fock.
Op build_interaction_hamiltonian(const NvDriveConfig& cfg, double t);
SparseMatrix interaction_hamiltonian_sparse(const NvDriveConfig& cfg, double t);

/// Total excitation number a^dag a + sum_j |1><1|_j on register (x) Fock.
Op excitation_number(std::size_t n_centers, std::size_t fock_cutoff);

/// How two DFS basis states differ on the encoding register: none (same
/// state), a single excitation hop (src -> dst, 1-based local qubits) or
/// something that needs more than two bodies.
struct DfsHop {
  enum class Kind { diagonal, hop, multi } kind = Kind::diagonal;
  std::size_t src = 0;
  std::size_t dst = 0;
};
DfsHop dfs_hop(const DfsEncoding& enc, std::size_t from, std::size_t to);

/// Register program realizing the DFS operator m (in enc's basis order):
/// off-diagonal entries become flip-flops, diagonal entries become products
/// of number operators on the excited qubits. Throws layout_error when an
/// entry needs more than a single excitation hop.
PairCouplingProgram program_from_dfs_operator(const Matrix& m, const DfsEncoding& enc);

struct LaserProgramIssue {
  enum class Kind { phase_inconsistent, guard_violation, singular } kind;
  std::string message;
};

struct LaserProgramResult {
  bool feasible = false;
  std::vector<LaserProgramIssue> issues;
  NvDriveConfig config;
  double residual = 0.0;  ///< max |effective_rabi - target| over constrained pairs, rad/us
};

struct LaserGuards {
  double dispersive_ratio = 10.0;
  double residual_tol = 1e-10;  ///< relative to the largest target
};

/// Detunings x_j = 1/delta_j solving (g^2/2)(x_j + x_k) = lambda_jk over the
/// active centres (least squares, minimum norm), with laser phases
/// phi_j - phi_k = phase_jk. Pairs among active centres without a target are
/// constrained to zero.
LaserProgramResult solve_laser_program(const PairCouplingProgram& targets, double g, const LaserGuards& guards = {});

}  // namespace hqc
