#pragma once

// Schrodinger and Lindblad propagation with per-sample diagnostics.
//
// Two front ends share one engine. The dense one takes a ParamHamiltonian and
// Op channels. The structured one takes sparse terms with time-dependent
// coefficients; it restricts the problem to the smallest coordinate subspace
// that contains the initial state and is closed under the Hamiltonian terms
// and jump operators, which keeps the eight-qubit register cheap.

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hqc/nvplatform.hpp"
#include "hqc/ode.hpp"
#include "hqc/qcore.hpp"
#include "hqc/tqda.hpp"

namespace hqc {

struct Channel {
  Op op;
  double rate = 0.0;  ///< rad/us
  std::string name;
};

/// d rho/dt = -i[H, rho] + sum rate (L rho L^dag - {L^dag L, rho}/2).
struct LindbladModel {
  ParamHamiltonian hamiltonian;
  std::vector<Channel> channels;

  void validate() const;
};

/// H(t) = sum_k c_k(t) T_k with fixed sparse T_k. The coefficient callback
/// fills one value per term; the sum must be Hermitian.
struct TermHamiltonian {
  HilbertLayout layout;
  std::vector<SparseMatrix> terms;
  std::function<void(double, std::span<cplx>)> coefficients;

  SparseMatrix at(double t) const;
};

struct SparseChannel {
  SparseMatrix op;
  double rate = 0.0;  ///< rad/us
  std::string name;
};

struct TermLindbladModel {
  TermHamiltonian hamiltonian;
  std::vector<SparseChannel> channels;

  void validate() const;
};

struct SampleDiagnostics {
  double trace_error = 0.0;        ///< |tr rho - 1|, or |<psi|psi> - 1| for kets
  double hermiticity_error = 0.0;  ///< after symmetrization
  double min_eigenvalue = 0.0;
  double dark_leakage = std::numeric_limits<double>::quiet_NaN();
};

/// Named operator whose expectation value is exported with a trajectory.
struct Observable {
  std::string name;
  SparseMatrix op;
};

/// Diagnostics bounds. Violations raise integration_error at the offending time.
inline constexpr double kTraceBound = 1e-8;
inline constexpr double kSymmetrizationBound = 1e-10;
inline constexpr double kMinEigenvalueBound = -1e-7;

struct PropagationOptions {
  double tol = 1e-9;  ///< relative tolerance per step
  double atol = 1e-12;
  /// Columns spanning the instantaneous dark subspace in the full space. When
  /// set, dark_leakage is recorded at every sample.
  std::function<Matrix(double)> dark_basis;
  /// Structured front end only: restrict to the invariant coordinate subspace.
  bool reduce = true;
  /// Largest tolerated norm (ket) or trace (density) drift at a sample.
  double trace_bound = kTraceBound;
};

/// Time-sampled states. States are stored on the coordinate subspace listed
/// in support (full-space basis indices); amplitudes outside it are zero.
struct Trajectory {
  HilbertLayout layout;
  std::vector<std::size_t> support;
  bool density = false;
  std::vector<double> times;
  std::vector<Matrix> states;  ///< column vectors (kets) or square matrices
  std::vector<SampleDiagnostics> diagnostics;
  double max_symmetrization = 0.0;  ///< largest Hermiticity correction applied
  OdeStats stats;

  std::size_t size() const { return times.size(); }
  Ket ket(std::size_t i) const;
  DensityMatrix density_matrix(std::size_t i) const;
  const Matrix& final_state() const { return states.back(); }
  /// <psi|rho|psi> at sample i; psi is given in the full space.
  double fidelity(std::size_t i, const Ket& psi) const;
  double expectation(std::size_t i, const SparseMatrix& op) const;
  /// Header: t,trace_error,hermiticity_error,min_eigenvalue,dark_leakage
  /// followed by one column per observable, in the given order.
  void write_csv(std::ostream& out, std::span<const Observable> observables = {}) const;
};

Trajectory propagate_unitary(const ParamHamiltonian& h, const Ket& psi0, std::span<const double> t_grid,
                             const PropagationOptions& opt = {});
Trajectory propagate_unitary(const TermHamiltonian& h, const Ket& psi0, std::span<const double> t_grid,
                             const PropagationOptions& opt = {});
Trajectory propagate_lindblad(const LindbladModel& m, const DensityMatrix& rho0, std::span<const double> t_grid,
                              const PropagationOptions& opt = {});
Trajectory propagate_lindblad(const TermLindbladModel& m, const DensityMatrix& rho0, std::span<const double> t_grid,
                              const PropagationOptions& opt = {});

/// Smallest set of basis indices containing seed and closed under the
/// sparsity patterns of the given operators.
std::vector<std::size_t> invariant_support(std::size_t dim, std::span<const std::size_t> seed,
                                           std::span<const SparseMatrix* const> generators);

/// n + 1 evenly spaced times on [0, total].
std::vector<double> uniform_grid(double total, std::size_t n);

}  // namespace hqc
