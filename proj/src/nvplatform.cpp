#include "hqc/nvplatform.hpp"

#include <bit>
#include <cmath>
#include <queue>

#include "hqc/units.hpp"

namespace hqc {

void NvParams::validate() const {
  if (!(Gamma0 > 0.0 && nu > 0.0 && V_m > 0.0)) throw usage_error("NvParams: Gamma0, nu and V_m must be positive");
  if (!(field_ratio >= 0.0 && field_ratio <= 1.0)) throw usage_error("NvParams: field_ratio outside [0, 1]");
  if (Omega_L < 0.0 || Delta < 0.0 || omega_c < 0.0 || omega_10 < 0.0)
    throw usage_error("NvParams: frequencies must be non-negative");
}

double atomic_volume(const NvParams& p) {
  const double c = units::speed_of_light;
  const double gamma_cyclic = p.Gamma0 / units::two_pi;
  return 3.0 * c * c * c / (4.0 * pi * p.nu * p.nu * gamma_cyclic);
}

double coupling_strength_G(const NvParams& p) {
  p.validate();
  return p.Gamma0 * p.field_ratio * std::sqrt(atomic_volume(p) / p.V_m);
}

double raman_coupling_g(double G, double Omega_L, double Delta, double delta, std::vector<std::string>* warnings) {
  if (Delta == 0.0) throw usage_error("raman_coupling_g: Delta must be nonzero");
  if (Delta + delta == 0.0) throw usage_error("raman_coupling_g: Delta + delta must be nonzero");
  if (warnings) {
    if (std::abs(Delta) < 10.0 * G) warnings->push_back("Delta < 10 G: large-detuning elimination is marginal");
    if (std::abs(Delta) < 10.0 * Omega_L)
      warnings->push_back("Delta < 10 Omega_L: large-detuning elimination is marginal");
  }
  return G * Omega_L * (1.0 / (Delta + delta) + 1.0 / Delta);
}

double effective_rabi(double g, double delta_j, double delta_k) {
  if (delta_j == 0.0 || delta_k == 0.0) throw usage_error("effective_rabi: detunings must be nonzero");
  return 0.5 * g * g * (1.0 / delta_j + 1.0 / delta_k);
}

void NvDriveConfig::validate() const {
  if (!(g >= 0.0) || !std::isfinite(g)) throw usage_error("NvDriveConfig: g must be finite and non-negative");
  if (fock_cutoff < 1) throw usage_error("NvDriveConfig: fock_cutoff must be at least 1");
  for (std::size_t j = 0; j < centers.size(); ++j) {
    const auto& c = centers[j];
    if (!c.laser_on) continue;
    if (c.delta == 0.0 || !std::isfinite(c.delta))
      throw usage_error("NvDriveConfig: centre " + std::to_string(j + 1) + " has zero or non-finite detuning");
    if (guard_enabled && std::abs(c.delta) < dispersive_ratio * g)
      throw guard_violation("dispersive", "centre " + std::to_string(j + 1) + ": |delta| = " +
                                              std::to_string(std::abs(c.delta)) + " rad/us is below " +
                                              std::to_string(dispersive_ratio) + " g");
  }
}

std::vector<double> NvDriveConfig::dispersive_ratios() const {
  std::vector<double> r;
  for (const auto& c : centers) r.push_back(c.laser_on ? g / c.delta : 0.0);
  return r;
}

void PairCouplingProgram::set(std::size_t j, std::size_t k, double lambda, double phase) {
  pairs[{j, k}] = PairCoupling{lambda, phase};
}

PairCoupling PairCouplingProgram::get(std::size_t j, std::size_t k) const {
  if (auto it = pairs.find({j, k}); it != pairs.end()) return it->second;
  if (auto it = pairs.find({k, j}); it != pairs.end()) return {it->second.lambda, -it->second.phase};
  return {};
}

void PairCouplingProgram::validate() const {
  for (const auto& [key, c] : pairs) {
    const auto [j, k] = key;
    if (j == k || j < 1 || k < 1 || j > n_centers || k > n_centers)
      throw layout_error("PairCouplingProgram: invalid pair (" + std::to_string(j) + ", " + std::to_string(k) + ")");
    if (auto it = pairs.find({k, j}); it != pairs.end()) {
      const cplx a = c.lambda * std::exp(iu * c.phase);
      const cplx b = it->second.lambda * std::exp(-iu * it->second.phase);
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw layout_error("PairCouplingProgram: entries (" + std::to_string(j) + ", " + std::to_string(k) +
                           ") and its reverse are not conjugate");
    }
  }
  for (const auto& s : level_shifts)
    for (auto q : s.qubits)
      if (q < 1 || q > n_centers) throw layout_error("PairCouplingProgram: level shift on unknown qubit");
}

std::map<std::pair<std::size_t, std::size_t>, PairCoupling> PairCouplingProgram::canonical() const {
  std::map<std::pair<std::size_t, std::size_t>, PairCoupling> out;
  for (const auto& [key, c] : pairs) {
    const auto [j, k] = key;
    if (j < k)
      out[{j, k}] = c;
    else if (!pairs.contains({k, j}))
      out[{k, j}] = {c.lambda, -c.phase};
  }
  return out;
}

HilbertLayout nv_register(std::size_t n) { return HilbertLayout::qubits(n, "nv"); }

namespace {

std::size_t bit_of(std::size_t n, std::size_t qubit) { return std::size_t{1} << (n - qubit); }

void check_qubit(std::size_t n, std::size_t q) {
  if (q < 1 || q > n) throw layout_error("qubit index " + std::to_string(q) + " outside register of " +
                                         std::to_string(n));
}

}  // namespace

SparseMatrix flip_flop(std::size_t n, std::size_t j, std::size_t k) {
  check_qubit(n, j);
  check_qubit(n, k);
  if (j == k) throw layout_error("flip_flop: qubits must differ");
  const std::size_t dim = std::size_t{1} << n, bj = bit_of(n, j), bk = bit_of(n, k);
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 0; b < dim; ++b)
    if ((b & bj) && !(b & bk)) t.emplace_back(static_cast<int>(b ^ bj ^ bk), static_cast<int>(b), 1.0);
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix number_product(std::size_t n, const std::vector<std::size_t>& qubits) {
  std::size_t mask = 0;
  for (auto q : qubits) {
    check_qubit(n, q);
    mask |= bit_of(n, q);
  }
  const std::size_t dim = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 0; b < dim; ++b)
    if ((b & mask) == mask) t.emplace_back(static_cast<int>(b), static_cast<int>(b), 1.0);
  SparseMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix effective_hamiltonian_sparse(const PairCouplingProgram& prog, const NvDriveConfig& cfg) {
  prog.validate();
  const std::size_t n = prog.n_centers;
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  SparseMatrix h(dim, dim);
  for (const auto& [key, c] : prog.canonical()) {
    if (c.lambda == 0.0) continue;
    SparseMatrix ff = flip_flop(n, key.first, key.second);
    const cplx amp = c.lambda * std::exp(iu * c.phase);
    h += amp * ff;
    h += std::conj(amp) * SparseMatrix(ff.adjoint());
  }
  for (const auto& s : prog.level_shifts)
    if (s.value != 0.0) h += cplx(s.value) * number_product(n, s.qubits);
  if (cfg.include_stark) {
    if (cfg.n_centers() != n) throw layout_error("drive config and program disagree on the number of centres");
    for (std::size_t j = 0; j < n; ++j) {
      const auto& c = cfg.centers[j];
      if (c.laser_on) h += cplx(cfg.g * cfg.g / c.delta) * number_product(n, {j + 1});
    }
  }
  h.prune(cplx(0.0));
  return h;
}

Op build_effective_hamiltonian(const PairCouplingProgram& prog, const NvDriveConfig& cfg) {
  return Op(nv_register(prog.n_centers), Matrix(effective_hamiltonian_sparse(prog, cfg)), true);
}

namespace {

HilbertLayout cavity_register(std::size_t n, std::size_t cutoff) {
  return nv_register(n) * HilbertLayout::single("cavity", cutoff + 1);
}

}  // namespace

SparseMatrix interaction_hamiltonian_sparse(const NvDriveConfig& cfg, double t) {
  cfg.validate();
  const std::size_t n = cfg.n_centers(), f = cfg.fock_cutoff + 1;
  const std::size_t dim = (std::size_t{1} << n) * f;
  std::vector<Eigen::Triplet<cplx>> trip;
  for (std::size_t j = 1; j <= n; ++j) {
    const auto& c = cfg.centers[j - 1];
    if (!c.laser_on || cfg.g == 0.0) continue;
    const cplx amp = cfg.g * std::exp(-iu * (c.delta * t - c.phi));
    const std::size_t bj = bit_of(n, j);
    for (std::size_t b = 0; b < (std::size_t{1} << n); ++b) {
      if (b & bj) continue;
      for (std::size_t p = 1; p < f; ++p) {
        // a s_j^+ : |b, p> -> sqrt(p) |b + j, p - 1>
        const auto row = static_cast<int>((b | bj) * f + p - 1), col = static_cast<int>(b * f + p);
        const cplx v = amp * std::sqrt(double(p));
        trip.emplace_back(row, col, v);
        trip.emplace_back(col, row, std::conj(v));
      }
    }
  }
  SparseMatrix h(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  h.setFromTriplets(trip.begin(), trip.end());
  return h;
}

Op build_interaction_hamiltonian(const NvDriveConfig& cfg, double t) {
  return Op(cavity_register(cfg.n_centers(), cfg.fock_cutoff), Matrix(interaction_hamiltonian_sparse(cfg, t)), true);
}

Op excitation_number(std::size_t n_centers, std::size_t fock_cutoff) {
  const auto layout = cavity_register(n_centers, fock_cutoff);
  const std::size_t f = fock_cutoff + 1;
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(layout.total_dim()), static_cast<Eigen::Index>(layout.total_dim()));
  for (std::size_t b = 0; b < (std::size_t{1} << n_centers); ++b)
    for (std::size_t p = 0; p < f; ++p)
      m(static_cast<Eigen::Index>(b * f + p), static_cast<Eigen::Index>(b * f + p)) =
          double(std::popcount(b) + p);
  return Op(layout, m, true);
}

DfsHop dfs_hop(const DfsEncoding& enc, std::size_t from, std::size_t to) {
  const std::size_t n = enc.n_qubits();
  const std::size_t a = enc.physical_index.at(enc.labels.at(from));
  const std::size_t b = enc.physical_index.at(enc.labels.at(to));
  if (a == b) return {DfsHop::Kind::diagonal, 0, 0};
  const std::size_t only_a = a & ~b, only_b = b & ~a;
  if (std::popcount(only_a) != 1 || std::popcount(only_b) != 1) return {DfsHop::Kind::multi, 0, 0};
  const auto qubit = [n](std::size_t bit) { return n - static_cast<std::size_t>(std::countr_zero(bit)); };
  return {DfsHop::Kind::hop, qubit(only_a), qubit(only_b)};
}

PairCouplingProgram program_from_dfs_operator(const Matrix& m, const DfsEncoding& enc) {
  const auto d = static_cast<Eigen::Index>(enc.dim());
  if (m.rows() != d || m.cols() != d) throw layout_error("program_from_dfs_operator: matrix does not match encoding");
  PairCouplingProgram prog;
  prog.n_centers = enc.n_qubits();
  const double scale = std::max(1.0, max_abs(m));
  for (Eigen::Index x = 0; x < d; ++x) {
    const double diag = m(x, x).real();
    if (diag != 0.0) {
      const std::size_t bits = enc.physical_index.at(enc.labels[static_cast<std::size_t>(x)]);
      LevelShift s;
      s.value = diag;
      for (std::size_t q = 1; q <= prog.n_centers; ++q)
        if (bits & bit_of(prog.n_centers, q)) s.qubits.push_back(q);
      prog.level_shifts.push_back(std::move(s));
    }
    for (Eigen::Index y = x + 1; y < d; ++y) {
      // m(y, x) = <y|H|x>: amplitude for the hop x -> y.
      const cplx c = m(y, x);
      if (std::abs(c) <= 1e-15 * scale) continue;
      const auto hop = dfs_hop(enc, static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      if (hop.kind != DfsHop::Kind::hop)
        throw layout_error("program_from_dfs_operator: element (" + enc.labels[static_cast<std::size_t>(y)] + ", " +
                           enc.labels[static_cast<std::size_t>(x)] + ") is not a single excitation hop");
      const auto prev = prog.get(hop.src, hop.dst);
      if (prev.lambda != 0.0)
        throw layout_error("program_from_dfs_operator: two DFS elements map onto the same qubit pair");
      prog.set(hop.src, hop.dst, std::abs(c), std::arg(c));
    }
  }
  return prog;
}

LaserProgramResult solve_laser_program(const PairCouplingProgram& targets, double g, const LaserGuards& guards) {
  targets.validate();
  if (!(g > 0.0)) throw usage_error("solve_laser_program: g must be positive");
  LaserProgramResult res;
  const auto pairs = targets.canonical();
  const std::size_t n = targets.n_centers;

  std::vector<bool> active(n + 1, false);
  double scale = 0.0;
  for (const auto& [key, c] : pairs)
    if (c.lambda != 0.0) {
      active[key.first] = active[key.second] = true;
      scale = std::max(scale, std::abs(c.lambda));
    }
  std::vector<std::size_t> idx_of(n + 1, 0), centres;
  for (std::size_t j = 1; j <= n; ++j)
    if (active[j]) {
      idx_of[j] = centres.size();
      centres.push_back(j);
    }

  res.config.g = g;
  res.config.dispersive_ratio = guards.dispersive_ratio;
  res.config.centers.assign(n, NvCenterDrive{false, 0.0, 0.0});
  if (centres.empty()) {
    res.feasible = true;
    return res;
  }

  // Linear system in x_j = 1/delta_j over every pair of active centres.
  const auto m = static_cast<Eigen::Index>(centres.size());
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t a = 0; a < centres.size(); ++a)
    for (std::size_t b = a + 1; b < centres.size(); ++b) rows.emplace_back(centres[a], centres[b]);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), m);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto ri = static_cast<Eigen::Index>(r);
    A(ri, static_cast<Eigen::Index>(idx_of[rows[r].first])) = 0.5 * g * g;
    A(ri, static_cast<Eigen::Index>(idx_of[rows[r].second])) = 0.5 * g * g;
    auto it = pairs.find(rows[r]);
    rhs(ri) = it == pairs.end() ? 0.0 : it->second.lambda;
  }
  const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(rhs);
  res.residual = (A * x - rhs).cwiseAbs().maxCoeff();
  if (res.residual > guards.residual_tol * scale)
    res.issues.push_back({LaserProgramIssue::Kind::singular,
                          "no detuning assignment reproduces the targets (residual " + std::to_string(res.residual) +
                              " rad/us)"});

  // Phases: spanning-tree assignment, then every constrained pair is checked.
  std::vector<std::optional<double>> phi(n + 1);
  for (auto root : centres) {
    if (phi[root]) continue;
    phi[root] = 0.0;
    std::queue<std::size_t> q;
    q.push(root);
    while (!q.empty()) {
      const auto j = q.front();
      q.pop();
      for (const auto& [key, c] : pairs) {
        if (c.lambda == 0.0) continue;
        if (key.first == j && !phi[key.second]) {
          phi[key.second] = *phi[j] - c.phase;
          q.push(key.second);
        } else if (key.second == j && !phi[key.first]) {
          phi[key.first] = *phi[j] + c.phase;
          q.push(key.first);
        }
      }
    }
  }
  for (const auto& [key, c] : pairs) {
    if (c.lambda == 0.0) continue;
    const double mismatch = std::remainder(*phi[key.first] - *phi[key.second] - c.phase, 2.0 * pi);
    if (std::abs(mismatch) > 1e-9)
      res.issues.push_back({LaserProgramIssue::Kind::phase_inconsistent,
                            "pair (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                                ") needs phase " + std::to_string(c.phase) + " but the laser phases give " +
                                std::to_string(c.phase + mismatch)});
  }

  const double x_scale = x.cwiseAbs().maxCoeff();
  for (auto j : centres) {
    const double xj = x(static_cast<Eigen::Index>(idx_of[j]));
    auto& c = res.config.centers[j - 1];
    c.phi = std::remainder(*phi[j], 2.0 * pi);
    if (std::abs(xj) <= 1e-12 * x_scale) {
      res.issues.push_back({LaserProgramIssue::Kind::singular,
                            "centre " + std::to_string(j) + " is coupled but needs an infinite detuning"});
      continue;
    }
    c.laser_on = true;
    c.delta = 1.0 / xj;
    if (std::abs(c.delta) < guards.dispersive_ratio * g)
      res.issues.push_back({LaserProgramIssue::Kind::guard_violation,
                            "centre " + std::to_string(j) + ": |delta| = " + std::to_string(std::abs(c.delta)) +
                                " rad/us is below " + std::to_string(guards.dispersive_ratio) + " g"});
  }
  res.feasible = res.issues.empty();
  return res;
}

}  // namespace hqc
