#include "hqc/tqda.hpp"

#include <array>
#include <cmath>

#include "hqc/dfs_basis.hpp"

namespace hqc {

void ControlPoint::validate() const {
  constexpr double slack = 1e-12;
  if (!(theta >= -slack && theta <= pi + slack)) throw layout_error("ControlPoint: theta outside [0, pi]");
  if (!(phi >= -slack && phi < 2.0 * pi + slack)) throw layout_error("ControlPoint: phi outside [0, 2pi)");
  if (!(lambda_prime >= 0.0)) throw layout_error("ControlPoint: lambda_prime must be non-negative");
  if (!std::isfinite(theta_dot) || !std::isfinite(phi_dot)) throw layout_error("ControlPoint: non-finite rate");
}

Op ParamHamiltonian::operator()(double t) const {
  Op h = generator(t);
  if (!(h.layout == layout)) throw layout_error("ParamHamiltonian: generator returned a foreign layout");
#ifndef NDEBUG
  if (hermiticity_defect(h.matrix) > 1e-12 * std::max(1.0, max_abs(h.matrix)))
    throw not_hermitian_error("ParamHamiltonian: generator is not Hermitian");
#endif
  return h;
}

ParamHamiltonian along_control_point(const HilbertLayout& layout, std::function<Op(const ControlPoint&)> builder,
                                     const ControlPoint& p) {
  return ParamHamiltonian{layout, [builder = std::move(builder), p](double t) {
                            ControlPoint q = p;
                            q.theta += t * p.theta_dot;
                            q.phi += t * p.phi_dot;
                            return builder(q);
                          }};
}

namespace {

std::vector<Matrix> projectors(const Op& h, std::optional<double> tol) {
  std::vector<Matrix> out;
  for (const auto& e : eig_hermitian(h, tol)) out.push_back(e.projector());
  return out;
}

}  // namespace

Matrix counterdiabatic_from_projectors(std::span<const Matrix> before, std::span<const Matrix> at,
                                       std::span<const Matrix> after, double fd_step) {
  if (before.size() != at.size() || after.size() != at.size())
    throw level_crossing_error("eigenvalue group count changes across the finite-difference stencil (" +
                               std::to_string(before.size()) + ", " + std::to_string(at.size()) + ", " +
                               std::to_string(after.size()) + ")");
  const auto d = at.front().rows();
  Matrix h1 = Matrix::Zero(d, d);
  for (std::size_t n = 0; n < at.size(); ++n) {
    // Projector rank is the multiplicity; a change means groups were reshuffled.
    const double rank = at[n].trace().real();
    if (std::abs(before[n].trace().real() - rank) > 0.5 || std::abs(after[n].trace().real() - rank) > 0.5)
      throw level_crossing_error("eigenspace multiplicity changes across the finite-difference stencil");
    const Matrix dp = (after[n] - before[n]) / (2.0 * fd_step);
    h1 += 0.5 * iu * (dp * at[n] - at[n] * dp);
  }
  // Remove rounding-level anti-Hermitian residue.
  return 0.5 * (h1 + h1.adjoint());
}

CdTerm counterdiabatic_numeric(const ParamHamiltonian& h0, double t, double fd_step,
                               std::optional<double> degeneracy_tol) {
  if (!(fd_step > 0.0)) throw layout_error("counterdiabatic_numeric: fd_step must be positive");
  const Op h_at = h0(t);
  const auto p_before = projectors(h0(t - fd_step), degeneracy_tol);
  const auto p_at = projectors(h_at, degeneracy_tol);
  const auto p_after = projectors(h0(t + fd_step), degeneracy_tol);
  Matrix h1 = counterdiabatic_from_projectors(p_before, p_at, p_after, fd_step);
  return CdTerm{Op(h0.layout, std::move(h1), true)};
}

CdTerm cd_bitphase_closed_form(const ControlPoint& p) {
  const double ct = std::cos(p.theta), st = std::sin(p.theta);
  const double cf = std::cos(p.phi), sf = std::sin(p.phi);
  const double td = p.theta_dot, fd = p.phi_dot;
  using namespace c1;
  Matrix first = Matrix::Zero(4, 4);
  first(zero, one) = ct;
  first(zero, a2) = -st * sf;
  first(one, zero) = -ct;
  first(one, a2) = st * cf;
  first(a2, zero) = st * sf;
  first(a2, one) = -st * cf;
  first *= iu * ct * fd;

  Matrix second = Matrix::Zero(4, 4);
  second(zero, one) = -fd;
  second(zero, a2) = cf * td;
  second(one, zero) = fd;
  second(one, a2) = sf * td;
  second(a2, zero) = -cf * td;
  second(a2, one) = -sf * td;
  second *= iu;
  return CdTerm{Op(c1_layout(), first + second, true)};
}

namespace {

// Printed 3x3 phase-gate term on an ordered triple {ancilla, logical, ancilla}.
Eigen::Matrix3cd phase_block(const ControlPoint& p) {
  const double s2 = std::pow(std::sin(p.theta / 2.0), 2);
  const double c2 = std::pow(std::cos(p.theta / 2.0), 2);
  const double st = std::sin(p.theta);
  const cplx e = std::exp(iu * p.phi);
  const double td = p.theta_dot, fd = p.phi_dot;

  Eigen::Matrix3cd first;
  first << -1.0, 0.0, 0.0,
           0.0, 3.0 * c2 - 1.0, -1.5 * st * std::conj(e),
           0.0, -1.5 * st * e, 3.0 * s2 - 1.0;
  first *= 0.5 * fd * s2;

  Eigen::Matrix3cd second;
  second << 0.0, 0.0, 0.0,
            0.0, s2 * fd, 0.5 * std::conj(e) * (iu * td + st * fd),
            0.0, 0.5 * e * (-iu * td + st * fd), -s2 * fd;
  return first + second;
}

Matrix place(const Eigen::Matrix3cd& block, std::size_t dim, const std::array<std::size_t, 3>& where) {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      m(static_cast<Eigen::Index>(where[i]), static_cast<Eigen::Index>(where[j])) =
          block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return m;
}

}  // namespace

CdTerm cd_phase_closed_form(const ControlPoint& p) {
  return CdTerm{Op(c1_layout(), place(phase_block(p), c1::dim, {c1::a1, c1::one, c1::a2}), true)};
}

CdTerm cd_cp_closed_form(const ControlPoint& p) {
  return CdTerm{Op(c2_layout(), place(phase_block(p), c2::dim, {c2::a3, c2::l11, c2::a4}), true)};
}

double parallel_transport_defect(const Op& h0, const Matrix& h1, std::optional<double> degeneracy_tol) {
  double worst = 0.0;
  for (const auto& e : eig_hermitian(h0, degeneracy_tol)) {
    const Matrix p = e.projector();
    worst = std::max(worst, max_abs(p * h1 * p));
  }
  return worst;
}

}  // namespace hqc
