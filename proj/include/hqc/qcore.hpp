#pragma once

// Dense complex linear algebra and state bookkeeping shared by every module.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hqc/errors.hpp"

namespace hqc {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx iu{0.0, 1.0};

struct Factor {
  std::string label;
  std::size_t dim = 0;
  bool operator==(const Factor&) const = default;
};

/// Ordered tensor-factor structure of a Hilbert space. The leftmost factor is
/// the slowest-varying index.
class HilbertLayout {
 public:
  HilbertLayout() = default;
  explicit HilbertLayout(std::vector<Factor> factors);

  static HilbertLayout single(std::string label, std::size_t dim);
  /// n qubit factors labelled prefix1 .. prefixN.
  static HilbertLayout qubits(std::size_t n, const std::string& prefix = "q");

  const std::vector<Factor>& factors() const noexcept { return factors_; }
  std::size_t total_dim() const noexcept { return total_dim_; }
  std::optional<std::size_t> position(const std::string& label) const;
  bool empty() const noexcept { return factors_.empty(); }

  /// Concatenation; labels must stay unique.
  HilbertLayout operator*(const HilbertLayout& rhs) const;
  bool operator==(const HilbertLayout& rhs) const { return factors_ == rhs.factors_; }

 private:
  std::vector<Factor> factors_;
  std::size_t total_dim_ = 0;
};

struct Ket {
  HilbertLayout layout;
  Vector amplitudes;

  Ket() = default;
  Ket(HilbertLayout l, Vector a);

  static Ket basis(const HilbertLayout& l, std::size_t index);
  double norm() const { return amplitudes.norm(); }
  Ket normalized() const;
  bool is_normalized(double tol = 1e-12) const { return std::abs(norm() - 1.0) <= tol; }
};

/// Operator on a layout. Hamiltonians are in angular-frequency units, gates
/// are dimensionless. A Hermitian-flagged Op is checked on construction.
struct Op {
  HilbertLayout layout;
  Matrix matrix;
  bool hermitian = false;

  Op() = default;
  Op(HilbertLayout l, Matrix m, bool is_hermitian = false);

  static Op hermitian_op(HilbertLayout l, Matrix m) { return Op(std::move(l), std::move(m), true); }
  static Op identity(const HilbertLayout& l);
  static Op zero(const HilbertLayout& l, bool is_hermitian = true);
  std::size_t dim() const { return static_cast<std::size_t>(matrix.rows()); }
};

struct DensityMatrix {
  HilbertLayout layout;
  Matrix matrix;

  DensityMatrix() = default;
  DensityMatrix(HilbertLayout l, Matrix m);

  static DensityMatrix pure(const Ket& psi);
  cplx trace() const { return matrix.trace(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  /// Throws layout_error when Hermiticity (1e-10), trace (1e-8) or
  /// positivity (-1e-7) bounds are broken.
  void validate() const;
};

using Tensorable = std::variant<Op, Ket>;

Op tensor_product(std::span<const Op> factors);
Ket tensor_product(std::span<const Ket> factors);
/// Variant form; rejects mixed kinds.
Tensorable tensor_product(std::span<const Tensorable> factors);

struct Eigenspace {
  double value = 0.0;
  Matrix vectors;  ///< orthonormal columns

  std::size_t multiplicity() const { return static_cast<std::size_t>(vectors.cols()); }
  Matrix projector() const { return vectors * vectors.adjoint(); }
  std::vector<Ket> kets(const HilbertLayout& l) const;
};

/// Ascending eigenvalues; neighbours closer than degeneracy_tol share an
/// eigenspace. The default tolerance is 1e-9 of the spectral range.
std::vector<Eigenspace> eig_hermitian(const Op& h, std::optional<double> degeneracy_tol = {});

/// exp(-i h dt) via the spectral decomposition of h.
Op propagator_step(const Op& h, double dt);

/// <psi|rho|psi>, clamped to [0, 1].
double state_fidelity(const DensityMatrix& rho, const Ket& psi);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep);

double max_abs(const Matrix& m);
double hermiticity_defect(const Matrix& m);

// Elementary operators on a single factor. sigma_plus = |1><0|, and
// sigma_z = |0><0| - |1><1|.
Op sigma_x(const std::string& label = "q");
Op sigma_y(const std::string& label = "q");
Op sigma_z(const std::string& label = "q");
Op sigma_plus(const std::string& label = "q");
Op sigma_minus(const std::string& label = "q");
Op annihilation(std::size_t dim, const std::string& label = "cavity");
Op creation(std::size_t dim, const std::string& label = "cavity");

}  // namespace hqc
