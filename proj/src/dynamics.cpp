#include "hqc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <ostream>

#include <fmt/format.h>

#include "hqc/csv.hpp"

namespace hqc {

void LindbladModel::validate() const {
  if (!hamiltonian.generator) throw usage_error("Lindblad model without a Hamiltonian");
  const auto d = hamiltonian.layout.total_dim();
  for (const auto& c : channels) {
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw usage_error("channel '" + c.name + "' has a negative rate");
    if (c.op.dim() != d) throw layout_error("channel '" + c.name + "' does not match the Hamiltonian dimension");
  }
}

SparseMatrix TermHamiltonian::at(double t) const {
  const auto d = static_cast<Eigen::Index>(layout.total_dim());
  SparseMatrix out(d, d);
  std::vector<cplx> c(terms.size());
  coefficients(t, c);
  for (std::size_t k = 0; k < terms.size(); ++k)
    if (c[k] != cplx{}) out += c[k] * terms[k];
  return out;
}

void TermLindbladModel::validate() const {
  const auto d = static_cast<Eigen::Index>(hamiltonian.layout.total_dim());
  if (!hamiltonian.coefficients) throw usage_error("term Hamiltonian without coefficients");
  for (const auto& t : hamiltonian.terms)
    if (t.rows() != d || t.cols() != d) throw layout_error("Hamiltonian term does not match the layout");
  for (const auto& c : channels) {
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) throw usage_error("channel '" + c.name + "' has a negative rate");
    if (c.op.rows() != d || c.op.cols() != d)
      throw layout_error("channel '" + c.name + "' does not match the Hamiltonian dimension");
  }
}

std::vector<double> uniform_grid(double total, std::size_t n) {
  if (!(total >= 0.0)) throw usage_error("negative total time");
  if (total == 0.0 || n == 0) return {0.0};
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = total * double(i) / double(n);
  g.back() = total;
  return g;
}

std::vector<std::size_t> invariant_support(std::size_t dim, std::span<const std::size_t> seed,
                                           std::span<const SparseMatrix* const> generators) {
  // Column-major storage: iterating column j lists the rows reachable from j.
  std::vector<char> in(dim, 0);
  std::deque<std::size_t> queue;
  for (auto s : seed) {
    if (s >= dim) throw layout_error("support seed outside the space");
    if (!in[s]) {
      in[s] = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const auto j = static_cast<Eigen::Index>(queue.front());
    queue.pop_front();
    for (const SparseMatrix* g : generators) {
      for (SparseMatrix::InnerIterator it(*g, j); it; ++it) {
        if (it.value() == cplx{}) continue;
        const auto r = static_cast<std::size_t>(it.row());
        if (!in[r]) {
          in[r] = 1;
          queue.push_back(r);
        }
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < dim; ++i)
    if (in[i]) out.push_back(i);
  return out;
}

namespace {

struct Engine {
  HilbertLayout layout;
  std::vector<std::size_t> support;
  std::function<void(double, Matrix&)> hamiltonian;  ///< reduced H(t)
  std::vector<Matrix> jumps;                         ///< sqrt(rate) L, reduced
  Matrix decay;                                      ///< (1/2) sum rate L^dag L, reduced
  bool has_decay = false;
};

Matrix reduce_sparse(const SparseMatrix& m, const std::vector<long>& pos, Eigen::Index r) {
  Matrix out = Matrix::Zero(r, r);
  for (Eigen::Index j = 0; j < m.outerSize(); ++j) {
    if (pos[std::size_t(j)] < 0) continue;
    for (SparseMatrix::InnerIterator it(m, j); it; ++it) {
      const long pr = pos[std::size_t(it.row())];
      if (pr >= 0) out(pr, pos[std::size_t(j)]) += it.value();
    }
  }
  return out;
}

std::vector<long> positions(std::size_t dim, const std::vector<std::size_t>& support) {
  std::vector<long> pos(dim, -1);
  for (std::size_t k = 0; k < support.size(); ++k) pos[support[k]] = long(k);
  return pos;
}

std::vector<std::size_t> all_indices(std::size_t d) {
  std::vector<std::size_t> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = i;
  return v;
}

void check_grid(std::span<const double> grid) {
  if (grid.empty()) throw usage_error("empty time grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw usage_error("time grid must be strictly increasing");
}

double dark_leakage_of(const Engine& e, const PropagationOptions& opt, double t, const Matrix& state, bool density) {
  if (!opt.dark_basis) return std::numeric_limits<double>::quiet_NaN();
  const Matrix basis = opt.dark_basis(t);
  if (static_cast<std::size_t>(basis.rows()) != e.layout.total_dim())
    throw layout_error("dark basis does not match the propagation space");
  Matrix b(static_cast<Eigen::Index>(e.support.size()), basis.cols());
  for (std::size_t k = 0; k < e.support.size(); ++k) b.row(Eigen::Index(k)) = basis.row(Eigen::Index(e.support[k]));
  double pop = 0.0;
  if (density) {
    pop = (b.adjoint() * state * b).trace().real();
  } else {
    pop = (b.adjoint() * state).squaredNorm();
  }
  return 1.0 - pop;
}

Trajectory run_ket(const Engine& e, const Ket& psi0, std::span<const double> grid, const PropagationOptions& opt) {
  check_grid(grid);
  if (!psi0.is_normalized(1e-10)) throw usage_error("initial ket is not normalized");
  const auto r = static_cast<Eigen::Index>(e.support.size());
  Matrix y(r, 1);
  for (Eigen::Index k = 0; k < r; ++k) y(k, 0) = psi0.amplitudes(Eigen::Index(e.support[std::size_t(k)]));

  Trajectory tr;
  tr.layout = e.layout;
  tr.support = e.support;
  tr.density = false;
  Matrix h(r, r);
  auto rhs = [&](double t, const Matrix& psi) -> Matrix {
    e.hamiltonian(t, h);
    return (-iu) * (h * psi);
  };
  auto observe = [&](std::size_t, double t, const Matrix& psi) {
    SampleDiagnostics d;
    d.trace_error = std::abs(psi.squaredNorm() - 1.0);
    d.dark_leakage = dark_leakage_of(e, opt, t, psi, false);
    if (d.trace_error > opt.trace_bound)
      throw integration_error(t, fmt::format("norm drift {:.3e} exceeds {:.0e}", d.trace_error, opt.trace_bound));
    tr.times.push_back(t);
    tr.states.push_back(psi);
    tr.diagnostics.push_back(d);
  };
  OdeOptions o;
  o.rtol = opt.tol;
  o.atol = opt.atol;
  tr.stats = integrate_on_grid(rhs, y, grid, o, observe, [](double, Matrix&) {});
  return tr;
}

Trajectory run_density(const Engine& e, const DensityMatrix& rho0, std::span<const double> grid,
                       const PropagationOptions& opt) {
  check_grid(grid);
  rho0.validate();
  const auto r = static_cast<Eigen::Index>(e.support.size());
  Matrix y(r, r);
  for (Eigen::Index a = 0; a < r; ++a)
    for (Eigen::Index b = 0; b < r; ++b)
      y(a, b) = rho0.matrix(Eigen::Index(e.support[std::size_t(a)]), Eigen::Index(e.support[std::size_t(b)]));

  Trajectory tr;
  tr.layout = e.layout;
  tr.support = e.support;
  tr.density = true;
  Matrix h(r, r);
  auto rhs = [&](double t, const Matrix& rho) -> Matrix {
    e.hamiltonian(t, h);
    Matrix heff = h;
    if (e.has_decay) heff -= iu * e.decay;
    Matrix x = (-iu) * (heff * rho);
    Matrix out = x + x.adjoint();
    for (const auto& j : e.jumps) out.noalias() += j * rho * j.adjoint();
    return out;
  };
  auto after = [&](double t, Matrix& rho) {
    double defect = 0.0;
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index b = a; b < r; ++b) {
        const cplx u = rho(a, b), l = rho(b, a);
        defect = std::max(defect, 0.5 * std::abs(u - std::conj(l)));
        const cplx m = 0.5 * (u + std::conj(l));
        rho(a, b) = m;
        rho(b, a) = std::conj(m);
      }
    tr.max_symmetrization = std::max(tr.max_symmetrization, defect);
    if (defect > kSymmetrizationBound)
      throw integration_error(t, fmt::format("Hermiticity correction {:.3e} exceeds {:.0e}", defect,
                                             kSymmetrizationBound));
  };
  auto observe = [&](std::size_t, double t, const Matrix& rho) {
    SampleDiagnostics d;
    d.trace_error = std::abs(rho.trace() - cplx{1.0});
    d.hermiticity_error = hermiticity_defect(rho);
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    d.min_eigenvalue = r > 0 ? es.eigenvalues()(0) : 0.0;
    d.dark_leakage = dark_leakage_of(e, opt, t, rho, true);
    if (d.trace_error > opt.trace_bound)
      throw integration_error(t, fmt::format("trace error {:.3e} exceeds {:.0e}", d.trace_error, opt.trace_bound));
    if (d.min_eigenvalue < kMinEigenvalueBound)
      throw integration_error(t, fmt::format("negative eigenvalue {:.3e} below {:.0e}", d.min_eigenvalue,
                                             kMinEigenvalueBound));
    tr.times.push_back(t);
    tr.states.push_back(rho);
    tr.diagnostics.push_back(d);
  };
  OdeOptions o;
  o.rtol = opt.tol;
  o.atol = opt.atol;
  tr.stats = integrate_on_grid(rhs, y, grid, o, observe, after);
  return tr;
}

Engine dense_engine(const ParamHamiltonian& h) {
  if (!h.generator) throw usage_error("Hamiltonian without a generator");
  Engine e;
  e.layout = h.layout;
  e.support = all_indices(h.layout.total_dim());
  const auto d = static_cast<Eigen::Index>(h.layout.total_dim());
  e.hamiltonian = [h, d](double t, Matrix& out) {
    Op op = h.generator(t);
    if (op.matrix.rows() != d || op.matrix.cols() != d) throw layout_error("generator changed dimension");
    out = op.matrix;
  };
  e.decay = Matrix::Zero(d, d);
  return e;
}

Engine term_engine(const TermHamiltonian& h, std::span<const SparseChannel> channels, std::vector<std::size_t> seed,
                   bool reduce, double t0) {
  const std::size_t dim = h.layout.total_dim();
  std::vector<SparseMatrix> extra;
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    extra.push_back(c.op);
    extra.push_back(SparseMatrix(c.op.adjoint() * c.op));
  }
  Engine e;
  e.layout = h.layout;
  if (reduce) {
    std::vector<const SparseMatrix*> gens;
    for (const auto& t : h.terms) gens.push_back(&t);
    for (const auto& t : extra) gens.push_back(&t);
    e.support = invariant_support(dim, seed, gens);
  } else {
    e.support = all_indices(dim);
  }
  const auto pos = positions(dim, e.support);
  const auto r = static_cast<Eigen::Index>(e.support.size());

  std::vector<Matrix> reduced;
  reduced.reserve(h.terms.size());
  for (const auto& t : h.terms) reduced.push_back(reduce_sparse(t, pos, r));
  e.decay = Matrix::Zero(r, r);
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    Matrix l = reduce_sparse(c.op, pos, r);
    e.decay += 0.5 * c.rate * (l.adjoint() * l);
    e.jumps.push_back(std::sqrt(c.rate) * l);
    e.has_decay = true;
  }
  auto coeffs = h.coefficients;
  e.hamiltonian = [reduced = std::move(reduced), coeffs, r](double t, Matrix& out) {
    std::vector<cplx> c(reduced.size());
    coeffs(t, c);
    out.setZero(r, r);
    for (std::size_t k = 0; k < reduced.size(); ++k)
      if (c[k] != cplx{}) out += c[k] * reduced[k];
  };
  Matrix probe;
  e.hamiltonian(t0, probe);
  const double scale = std::max(1.0, max_abs(probe));
  if (hermiticity_defect(probe) > 1e-10 * scale) throw not_hermitian_error("term Hamiltonian is not Hermitian");
  return e;
}

std::vector<std::size_t> ket_seed(const Ket& psi) {
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < psi.amplitudes.size(); ++i)
    if (psi.amplitudes(i) != cplx{}) s.push_back(std::size_t(i));
  return s;
}

std::vector<std::size_t> density_seed(const DensityMatrix& rho) {
  std::vector<std::size_t> s;
  for (Eigen::Index i = 0; i < rho.matrix.rows(); ++i)
    if (rho.matrix.row(i).cwiseAbs().maxCoeff() > 0.0) s.push_back(std::size_t(i));
  return s;
}

}  // namespace

Trajectory propagate_unitary(const ParamHamiltonian& h, const Ket& psi0, std::span<const double> t_grid,
                             const PropagationOptions& opt) {
  if (!(psi0.layout == h.layout)) throw layout_error("initial ket does not match the Hamiltonian layout");
  return run_ket(dense_engine(h), psi0, t_grid, opt);
}

Trajectory propagate_unitary(const TermHamiltonian& h, const Ket& psi0, std::span<const double> t_grid,
                             const PropagationOptions& opt) {
  if (!(psi0.layout == h.layout)) throw layout_error("initial ket does not match the Hamiltonian layout");
  if (!h.coefficients) throw usage_error("term Hamiltonian without coefficients");
  check_grid(t_grid);
  return run_ket(term_engine(h, {}, ket_seed(psi0), opt.reduce, t_grid.front()), psi0, t_grid, opt);
}

Trajectory propagate_lindblad(const LindbladModel& m, const DensityMatrix& rho0, std::span<const double> t_grid,
                              const PropagationOptions& opt) {
  m.validate();
  if (!(rho0.layout == m.hamiltonian.layout)) throw layout_error("initial state does not match the model layout");
  Engine e = dense_engine(m.hamiltonian);
  const auto d = static_cast<Eigen::Index>(m.hamiltonian.layout.total_dim());
  e.decay = Matrix::Zero(d, d);
  for (const auto& c : m.channels) {
    if (c.rate == 0.0) continue;
    e.decay += 0.5 * c.rate * (c.op.matrix.adjoint() * c.op.matrix);
    e.jumps.push_back(std::sqrt(c.rate) * c.op.matrix);
    e.has_decay = true;
  }
  return run_density(e, rho0, t_grid, opt);
}

Trajectory propagate_lindblad(const TermLindbladModel& m, const DensityMatrix& rho0, std::span<const double> t_grid,
                              const PropagationOptions& opt) {
  m.validate();
  if (!(rho0.layout == m.hamiltonian.layout)) throw layout_error("initial state does not match the model layout");
  check_grid(t_grid);
  return run_density(term_engine(m.hamiltonian, m.channels, density_seed(rho0), opt.reduce, t_grid.front()), rho0,
                     t_grid, opt);
}

Ket Trajectory::ket(std::size_t i) const {
  if (density) throw usage_error("trajectory holds density matrices");
  Vector a = Vector::Zero(Eigen::Index(layout.total_dim()));
  for (std::size_t k = 0; k < support.size(); ++k) a(Eigen::Index(support[k])) = states.at(i)(Eigen::Index(k), 0);
  return Ket(layout, std::move(a));
}

DensityMatrix Trajectory::density_matrix(std::size_t i) const {
  if (!density) return DensityMatrix::pure(ket(i));
  const auto d = Eigen::Index(layout.total_dim());
  Matrix m = Matrix::Zero(d, d);
  const Matrix& s = states.at(i);
  for (std::size_t a = 0; a < support.size(); ++a)
    for (std::size_t b = 0; b < support.size(); ++b)
      m(Eigen::Index(support[a]), Eigen::Index(support[b])) = s(Eigen::Index(a), Eigen::Index(b));
  return DensityMatrix(layout, std::move(m));
}

double Trajectory::fidelity(std::size_t i, const Ket& psi) const {
  if (static_cast<std::size_t>(psi.amplitudes.size()) != layout.total_dim())
    throw layout_error("fidelity target does not match the trajectory space");
  Vector p(Eigen::Index(support.size()));
  for (std::size_t k = 0; k < support.size(); ++k) p(Eigen::Index(k)) = psi.amplitudes(Eigen::Index(support[k]));
  const Matrix& s = states.at(i);
  if (density) return (p.adjoint() * s * p)(0, 0).real();
  return std::norm(p.dot(s.col(0)));
}

double Trajectory::expectation(std::size_t i, const SparseMatrix& op) const {
  const auto pos = positions(layout.total_dim(), support);
  const Matrix o = reduce_sparse(op, pos, Eigen::Index(support.size()));
  const Matrix& s = states.at(i);
  if (density) return (o * s).trace().real();
  return (s.col(0).adjoint() * o * s.col(0))(0, 0).real();
}

void Trajectory::write_csv(std::ostream& out, std::span<const Observable> observables) const {
  std::vector<std::string> head{"t", "trace_error", "hermiticity_error", "min_eigenvalue", "dark_leakage"};
  for (const auto& o : observables) head.push_back(o.name);
  out << csv_row(head);
  std::vector<Matrix> reduced;
  const auto pos = positions(layout.total_dim(), support);
  for (const auto& o : observables) reduced.push_back(reduce_sparse(o.op, pos, Eigen::Index(support.size())));
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& d = diagnostics[i];
    std::vector<std::string> row{csv_number(times[i]), csv_number(d.trace_error), csv_number(d.hermiticity_error),
                                 csv_number(d.min_eigenvalue), csv_number(d.dark_leakage)};
    const Matrix& s = states[i];
    for (const auto& o : reduced) {
      const double v = density ? (o * s).trace().real() : (s.col(0).adjoint() * o * s.col(0))(0, 0).real();
      row.push_back(csv_number(v));
    }
    out << csv_row(row);
  }
}

}  // namespace hqc
