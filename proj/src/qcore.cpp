#include "hqc/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

namespace hqc {

namespace {

constexpr double kHermitianOpTol = 1e-12;

void check_unique(const std::vector<Factor>& factors) {
  std::set<std::string> seen;
  for (const auto& f : factors) {
    if (f.dim == 0) throw layout_error("zero-dimension factor '" + f.label + "'");
    if (!seen.insert(f.label).second) throw layout_error("duplicate factor label '" + f.label + "'");
  }
}

// Relabels clashing factors with their 1-based position so that products such
// as sigma_z (x) identity built from default labels stay well formed.
std::vector<Factor> merged_factors(const std::vector<const HilbertLayout*>& layouts) {
  std::vector<Factor> out;
  std::set<std::string> seen;
  for (const auto* l : layouts) {
    for (const auto& f : l->factors()) {
      Factor g = f;
      if (seen.count(g.label)) g.label += "_" + std::to_string(out.size() + 1);
      if (!seen.insert(g.label).second) throw layout_error("cannot disambiguate factor label '" + f.label + "'");
      out.push_back(std::move(g));
    }
  }
  return out;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

HilbertLayout::HilbertLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  check_unique(factors_);
  total_dim_ = factors_.empty() ? 0 : 1;
  for (const auto& f : factors_) total_dim_ *= f.dim;
}

HilbertLayout HilbertLayout::single(std::string label, std::size_t dim) {
  return HilbertLayout({Factor{std::move(label), dim}});
}

HilbertLayout HilbertLayout::qubits(std::size_t n, const std::string& prefix) {
  std::vector<Factor> f;
  for (std::size_t i = 1; i <= n; ++i) f.push_back({prefix + std::to_string(i), 2});
  return HilbertLayout(std::move(f));
}

std::optional<std::size_t> HilbertLayout::position(const std::string& label) const {
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].label == label) return i;
  return std::nullopt;
}

HilbertLayout HilbertLayout::operator*(const HilbertLayout& rhs) const {
  auto f = factors_;
  f.insert(f.end(), rhs.factors_.begin(), rhs.factors_.end());
  return HilbertLayout(std::move(f));
}

Ket::Ket(HilbertLayout l, Vector a) : layout(std::move(l)), amplitudes(std::move(a)) {
  if (static_cast<std::size_t>(amplitudes.size()) != layout.total_dim())
    throw layout_error("ket length " + std::to_string(amplitudes.size()) + " does not match layout dimension " +
                       std::to_string(layout.total_dim()));
  if (!amplitudes.allFinite()) throw layout_error("ket has non-finite amplitudes");
}

Ket Ket::basis(const HilbertLayout& l, std::size_t index) {
  if (index >= l.total_dim()) throw layout_error("basis index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(l.total_dim()));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return Ket(l, std::move(v));
}

Ket Ket::normalized() const {
  const double n = norm();
  if (n == 0.0) throw layout_error("cannot normalize the zero ket");
  return Ket(layout, amplitudes / n);
}

Op::Op(HilbertLayout l, Matrix m, bool is_hermitian) : layout(std::move(l)), matrix(std::move(m)), hermitian(is_hermitian) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  if (matrix.rows() != d || matrix.cols() != d)
    throw layout_error("operator shape " + std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) +
                       " does not match layout dimension " + std::to_string(d));
  if (hermitian && hermiticity_defect(matrix) > kHermitianOpTol * std::max(1.0, max_abs(matrix)))
    throw not_hermitian_error("operator flagged Hermitian has |A - A^dag|_max = " +
                              std::to_string(hermiticity_defect(matrix)));
}

Op Op::identity(const HilbertLayout& l) {
  const auto d = static_cast<Eigen::Index>(l.total_dim());
  return Op(l, Matrix::Identity(d, d), true);
}

Op Op::zero(const HilbertLayout& l, bool is_hermitian) {
  const auto d = static_cast<Eigen::Index>(l.total_dim());
  return Op(l, Matrix::Zero(d, d), is_hermitian);
}

DensityMatrix::DensityMatrix(HilbertLayout l, Matrix m) : layout(std::move(l)), matrix(std::move(m)) {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  if (matrix.rows() != d || matrix.cols() != d) throw layout_error("density matrix shape does not match layout");
}

DensityMatrix DensityMatrix::pure(const Ket& psi) {
  return DensityMatrix(psi.layout, psi.amplitudes * psi.amplitudes.adjoint());
}

double DensityMatrix::hermiticity_error() const { return hermiticity_defect(matrix); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  if (hermiticity_error() > 1e-10) throw layout_error("density matrix is not Hermitian within 1e-10");
  if (std::abs(trace() - 1.0) > 1e-8) throw layout_error("density matrix trace differs from 1 by more than 1e-8");
  if (min_eigenvalue() < -1e-7) throw layout_error("density matrix has eigenvalue below -1e-7");
}

Op tensor_product(std::span<const Op> factors) {
  if (factors.empty()) throw layout_error("tensor product of an empty list");
  std::vector<const HilbertLayout*> layouts;
  Matrix m = factors.front().matrix;
  bool herm = factors.front().hermitian;
  layouts.push_back(&factors.front().layout);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    m = kron(m, factors[i].matrix);
    herm = herm && factors[i].hermitian;
    layouts.push_back(&factors[i].layout);
  }
  return Op(HilbertLayout(merged_factors(layouts)), std::move(m), herm);
}

Ket tensor_product(std::span<const Ket> factors) {
  if (factors.empty()) throw layout_error("tensor product of an empty list");
  std::vector<const HilbertLayout*> layouts;
  Matrix v = factors.front().amplitudes;
  layouts.push_back(&factors.front().layout);
  for (std::size_t i = 1; i < factors.size(); ++i) {
    v = kron(v, factors[i].amplitudes);
    layouts.push_back(&factors[i].layout);
  }
  return Ket(HilbertLayout(merged_factors(layouts)), v.col(0));
}

Tensorable tensor_product(std::span<const Tensorable> factors) {
  if (factors.empty()) throw layout_error("tensor product of an empty list");
  const bool ops = std::holds_alternative<Op>(factors.front());
  for (const auto& f : factors)
    if (std::holds_alternative<Op>(f) != ops) throw layout_error("tensor product of mixed operator and ket factors");
  if (ops) {
    std::vector<Op> v;
    for (const auto& f : factors) v.push_back(std::get<Op>(f));
    return tensor_product(std::span<const Op>(v));
  }
  std::vector<Ket> v;
  for (const auto& f : factors) v.push_back(std::get<Ket>(f));
  return tensor_product(std::span<const Ket>(v));
}

std::vector<Ket> Eigenspace::kets(const HilbertLayout& l) const {
  std::vector<Ket> out;
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) out.emplace_back(l, vectors.col(c));
  return out;
}

std::vector<Eigenspace> eig_hermitian(const Op& h, std::optional<double> degeneracy_tol) {
  const double scale = std::max(1.0, max_abs(h.matrix));
  if (hermiticity_defect(h.matrix) > kHermitianOpTol * scale)
    throw not_hermitian_error("eig_hermitian: input is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  if (es.info() != Eigen::Success) throw not_hermitian_error("eig_hermitian: eigensolver failed");
  const Eigen::VectorXd& w = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  const Eigen::Index n = w.size();
  const double range = n > 0 ? w(n - 1) - w(0) : 0.0;
  const double tol = degeneracy_tol.value_or(1e-9 * range);

  std::vector<Eigenspace> out;
  Eigen::Index start = 0;
  while (start < n) {
    Eigen::Index end = start + 1;
    while (end < n && w(end) - w(end - 1) <= tol) ++end;
    Eigenspace e;
    e.value = w.segment(start, end - start).mean();
    e.vectors = v.middleCols(start, end - start);
    out.push_back(std::move(e));
    start = end;
  }
  return out;
}

Op propagator_step(const Op& h, double dt) {
  if (hermiticity_defect(h.matrix) > kHermitianOpTol * std::max(1.0, max_abs(h.matrix)))
    throw not_hermitian_error("propagator_step: generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.matrix);
  const Eigen::VectorXd& w = es.eigenvalues();
  Vector phases(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) phases(i) = std::exp(-iu * w(i) * dt);
  const Matrix& v = es.eigenvectors();
  return Op(h.layout, v * phases.asDiagonal() * v.adjoint());
}

double state_fidelity(const DensityMatrix& rho, const Ket& psi) {
  if (!(rho.layout == psi.layout)) throw layout_error("state_fidelity: layout mismatch");
  const cplx f = psi.amplitudes.dot(rho.matrix * psi.amplitudes);
  if (std::abs(f.imag()) > 1e-10) throw not_hermitian_error("state_fidelity: imaginary residue above 1e-10");
  return std::clamp(f.real(), 0.0, 1.0);
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::string> keep) {
  const auto& factors = rho.layout.factors();
  if (keep.empty()) throw layout_error("partial_trace: nothing to keep");
  std::vector<bool> kept(factors.size(), false);
  for (const auto& label : keep) {
    auto pos = rho.layout.position(label);
    if (!pos) throw layout_error("partial_trace: unknown factor label '" + label + "'");
    kept[*pos] = true;
  }
  std::vector<Factor> kept_factors;
  std::vector<std::size_t> kept_pos, traced_pos;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (kept[i]) {
      kept_factors.push_back(factors[i]);
      kept_pos.push_back(i);
    } else {
      traced_pos.push_back(i);
    }
  }
  // Row-major strides of the full index.
  std::vector<std::size_t> stride(factors.size(), 1);
  for (std::size_t i = factors.size(); i-- > 1;) stride[i - 1] = stride[i] * factors[i].dim;

  auto expand = [&](std::size_t idx, const std::vector<std::size_t>& positions) {
    std::size_t full = 0;
    for (std::size_t k = positions.size(); k-- > 0;) {
      const auto d = factors[positions[k]].dim;
      full += (idx % d) * stride[positions[k]];
      idx /= d;
    }
    return full;
  };

  HilbertLayout out_layout(kept_factors);
  const std::size_t dk = out_layout.total_dim();
  const std::size_t dt = rho.layout.total_dim() / dk;
  std::vector<std::size_t> keep_off(dk), trace_off(dt);
  for (std::size_t i = 0; i < dk; ++i) keep_off[i] = expand(i, kept_pos);
  for (std::size_t k = 0; k < dt; ++k) trace_off[k] = traced_pos.empty() ? 0 : expand(k, traced_pos);

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t i = 0; i < dk; ++i)
    for (std::size_t j = 0; j < dk; ++j) {
      cplx s = 0.0;
      for (std::size_t k = 0; k < dt; ++k)
        s += rho.matrix(static_cast<Eigen::Index>(keep_off[i] + trace_off[k]),
                        static_cast<Eigen::Index>(keep_off[j] + trace_off[k]));
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s;
    }
  return DensityMatrix(std::move(out_layout), std::move(out));
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix& m) { return max_abs(m - m.adjoint()); }

namespace {
Op qubit_op(const std::string& label, cplx a00, cplx a01, cplx a10, cplx a11, bool herm) {
  Matrix m(2, 2);
  m << a00, a01, a10, a11;
  return Op(HilbertLayout::single(label, 2), std::move(m), herm);
}
}  // namespace

Op sigma_x(const std::string& label) { return qubit_op(label, 0.0, 1.0, 1.0, 0.0, true); }
Op sigma_y(const std::string& label) { return qubit_op(label, 0.0, -iu, iu, 0.0, true); }
Op sigma_z(const std::string& label) { return qubit_op(label, 1.0, 0.0, 0.0, -1.0, true); }
Op sigma_plus(const std::string& label) { return qubit_op(label, 0.0, 0.0, 1.0, 0.0, false); }
Op sigma_minus(const std::string& label) { return qubit_op(label, 0.0, 1.0, 0.0, 0.0, false); }

Op annihilation(std::size_t dim, const std::string& label) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  for (Eigen::Index n = 1; n < d; ++n) m(n - 1, n) = std::sqrt(static_cast<double>(n));
  return Op(HilbertLayout::single(label, dim), std::move(m));
}

Op creation(std::size_t dim, const std::string& label) {
  auto a = annihilation(dim, label);
  return Op(a.layout, a.matrix.adjoint());
}

}  // namespace hqc
