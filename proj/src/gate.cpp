#include "hqc/gate.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <memory>

#include "hqc/units.hpp"

namespace hqc {

std::string to_string(Layer l) {
  switch (l) {
    case Layer::dfs_abstract: return "dfs_abstract";
    case Layer::effective: return "effective";
    case Layer::full_cavity: return "full_cavity";
  }
  return "?";
}

Layer layer_from_string(std::string_view s) {
  if (s == "dfs_abstract") return Layer::dfs_abstract;
  if (s == "effective") return Layer::effective;
  if (s == "full_cavity") return Layer::full_cavity;
  throw usage_error("unknown layer '" + std::string(s) + "'");
}

std::string to_string(CdSource c) {
  switch (c) {
    case CdSource::numeric: return "numeric";
    case CdSource::closed_form: return "closed_form";
    case CdSource::none: return "none";
  }
  return "?";
}

CdSource cd_source_from_string(std::string_view s) {
  if (s == "numeric") return CdSource::numeric;
  if (s == "closed_form") return CdSource::closed_form;
  if (s == "none") return CdSource::none;
  throw usage_error("unknown counterdiabatic source '" + std::string(s) + "'");
}

SparseMatrix kron(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(std::size_t(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index ja = 0; ja < a.outerSize(); ++ja)
    for (SparseMatrix::InnerIterator ia(a, ja); ia; ++ia)
      for (Eigen::Index jb = 0; jb < b.outerSize(); ++jb)
        for (SparseMatrix::InnerIterator ib(b, jb); ib; ++ib)
          trip.emplace_back(ia.row() * b.rows() + ib.row(), ja * b.cols() + jb, ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

namespace {

std::size_t bit(std::size_t n, std::size_t q) { return std::size_t{1} << (n - q); }

SparseMatrix sparse_identity(std::size_t d) {
  SparseMatrix m{Eigen::Index(d), Eigen::Index(d)};
  m.setIdentity();
  return m;
}

SparseMatrix single_entry(std::size_t d, std::size_t r, std::size_t c) {
  SparseMatrix m{Eigen::Index(d), Eigen::Index(d)};
  m.insert(Eigen::Index(r), Eigen::Index(c)) = 1.0;
  return m;
}

SparseMatrix collective_lowering(std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 0; b < d; ++b)
    for (std::size_t q = 1; q <= n; ++q)
      if (b & bit(n, q)) t.emplace_back(Eigen::Index(b ^ bit(n, q)), Eigen::Index(b), 1.0);
  SparseMatrix m{Eigen::Index(d), Eigen::Index(d)};
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix collective_z(std::size_t n) {
  const std::size_t d = std::size_t{1} << n;
  SparseMatrix m{Eigen::Index(d), Eigen::Index(d)};
  for (std::size_t b = 0; b < d; ++b) {
    double v = 0.0;
    for (std::size_t q = 1; q <= n; ++q) v += (b & bit(n, q)) ? -1.0 : 1.0;
    if (v != 0.0) m.insert(Eigen::Index(b), Eigen::Index(b)) = v;
  }
  return m;
}

SparseMatrix lowering(std::size_t n, std::size_t q) {
  const std::size_t d = std::size_t{1} << n;
  std::vector<Eigen::Triplet<cplx>> t;
  for (std::size_t b = 0; b < d; ++b)
    if (b & bit(n, q)) t.emplace_back(Eigen::Index(b ^ bit(n, q)), Eigen::Index(b), 1.0);
  SparseMatrix m{Eigen::Index(d), Eigen::Index(d)};
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix to_sparse(const Matrix& m) { return m.sparseView(); }

double wrap_pi(double a) {
  a = std::remainder(a, 2.0 * pi);
  return a <= -pi ? a + 2.0 * pi : a;
}

double wrap_half_pi(double a) {
  a = std::remainder(a, pi);
  return a <= -pi / 2 ? a + pi : a;
}

/// Register-level terms and their coefficient map from a DFS matrix.
struct RegisterProgram {
  std::vector<SparseMatrix> terms;
  /// (term index, DFS row, DFS column) for every DFS entry realized by a term.
  std::vector<std::tuple<std::size_t, Eigen::Index, Eigen::Index>> sources;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> forbidden;  ///< entries with no two-body realization
};

RegisterProgram register_program(const DfsEncoding& enc) {
  RegisterProgram p;
  const std::size_t n = enc.n_qubits();
  const auto d = Eigen::Index(enc.dim());
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> hop_term;
  for (Eigen::Index x = 0; x < d; ++x) {
    for (Eigen::Index y = 0; y < d; ++y) {
      // Entry (x, y) = <x|H|y> moves the register from state y to state x.
      const DfsHop h = dfs_hop(enc, std::size_t(y), std::size_t(x));
      if (h.kind == DfsHop::Kind::multi) {
        p.forbidden.emplace_back(x, y);
        continue;
      }
      if (h.kind == DfsHop::Kind::diagonal) {
        const std::size_t bits = enc.physical_index.at(enc.labels[std::size_t(x)]);
        std::vector<std::size_t> qs;
        for (std::size_t q = 1; q <= n; ++q)
          if (bits & bit(n, q)) qs.push_back(q);
        p.sources.emplace_back(p.terms.size(), x, y);
        p.terms.push_back(number_product(n, qs));
        continue;
      }
      auto [it, fresh] = hop_term.try_emplace({h.src, h.dst}, p.terms.size());
      if (fresh) p.terms.push_back(flip_flop(n, h.src, h.dst));
      p.sources.emplace_back(it->second, x, y);
    }
  }
  return p;
}

}  // namespace

HilbertLayout layer_layout(const DfsEncoding& enc, Layer layer, std::size_t fock_cutoff) {
  switch (layer) {
    case Layer::dfs_abstract: return enc.layout();
    case Layer::effective: return enc.register_layout();
    case Layer::full_cavity: return enc.register_layout() * HilbertLayout::single("cavity", fock_cutoff + 1);
  }
  throw usage_error("unknown layer");
}

std::vector<std::size_t> dfs_embedding(const DfsEncoding& enc, Layer layer, std::size_t fock_cutoff) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < enc.dim(); ++i) {
    switch (layer) {
      case Layer::dfs_abstract: out.push_back(i); break;
      case Layer::effective: out.push_back(enc.physical_index.at(enc.labels[i])); break;
      case Layer::full_cavity: out.push_back(enc.physical_index.at(enc.labels[i]) * (fock_cutoff + 1)); break;
    }
  }
  return out;
}

Matrix dfs_hamiltonian(GateKind kind, const PulseSchedule& schedule, const DfsEncoding& enc, CdSource cd, double t,
                       double fd_step) {
  const ControlPoint p = schedule.at(t);
  Matrix h = build_h0(kind, p, enc).matrix;
  switch (cd) {
    case CdSource::none: break;
    case CdSource::closed_form:
      switch (kind) {
        case GateKind::bitphase: h += cd_bitphase_closed_form(p).matrix.matrix; break;
        case GateKind::phase: h += cd_phase_closed_form(p).matrix.matrix; break;
        case GateKind::cp: h += cd_cp_closed_form(p).matrix.matrix; break;
      }
      break;
    case CdSource::numeric: {
      if (p.theta_dot == 0.0 && p.phi_dot == 0.0) break;
      const auto builder = [kind, &enc](const ControlPoint& q) { return build_h0(kind, q, enc); };
      h += counterdiabatic_numeric(along_control_point(enc.layout(), builder, p), 0.0, fd_step).matrix.matrix;
      break;
    }
  }
  return h;
}

HolonomyResult schedule_holonomy(GateKind kind, const PulseSchedule& schedule, std::size_t steps) {
  try {
    return wilson_loop(kind, schedule, steps);
  } catch (const loop_closure_error&) {
    const auto& segs = schedule.segments();
    if (kind != GateKind::bitphase || segs.empty() || std::abs(segs.back().theta_end) > 1e-12) throw;
    auto closed = segs;
    const Segment& last = segs.back();
    closed.push_back(Segment{0.0, 0.0, last.phi_end, segs.front().phi_start, last.duration, last.ramp});
    return wilson_loop(kind, PulseSchedule(std::move(closed), schedule.lambda_prime()), steps);
  }
}

void validate_setup(const GateSetup& s) {
  const DfsEncoding enc = s.encoding ? *s.encoding : DfsEncoding::for_kind(s.kind);
  if ((s.kind == GateKind::cp) != (enc.name == DfsName::C2))
    throw layout_error("encoding does not match the gate kind");
  const std::size_t n_logical = enc.computational_labels().size();
  if (static_cast<std::size_t>(s.psi_in.size()) != n_logical)
    throw usage_error("psi_in has " + std::to_string(s.psi_in.size()) + " amplitudes, expected " +
                      std::to_string(n_logical));
  if (std::abs(s.psi_in.norm() - 1.0) > 1e-10) throw usage_error("psi_in is not normalized");
  if (s.layer == Layer::dfs_abstract && s.noise.any())
    throw usage_error("the dfs_abstract layer is closed-system only");
  for (double r : {s.noise.kappa, s.noise.gamma, s.noise.gamma_phi})
    if (!(r >= 0.0) || !std::isfinite(r)) throw usage_error("noise rates must be finite and non-negative");

  const std::size_t n = enc.n_qubits();
  const bool need_drive = s.layer != Layer::dfs_abstract && (s.noise.kappa > 0.0 || s.drive.include_stark);
  if (need_drive) {
    if (s.drive.centers.size() != n)
      throw usage_error("drive must list " + std::to_string(n) + " centres for kappa or the Stark shift");
    s.drive.validate();
  }
  if (s.layer == Layer::full_cavity && s.drive.fock_cutoff < 1) throw usage_error("fock_cutoff must be at least 1");
}

GateReport run_gate(const GateSetup& s) {
  const auto wall0 = std::chrono::steady_clock::now();
  validate_setup(s);
  const DfsEncoding enc = s.encoding ? *s.encoding : DfsEncoding::for_kind(s.kind);
  const std::size_t n = enc.n_qubits();
  const std::size_t cutoff = s.drive.fock_cutoff;

  GateReport rep;
  rep.kind = s.kind;
  rep.layer = s.layer;
  rep.initial_label = s.initial_label;
  rep.schedule_id = s.schedule_id;
  const double total = s.schedule.empty() ? 0.0 : s.schedule.total_duration();
  rep.total_time = total;

  // Target state.
  if (s.ideal_angle) {
    rep.ideal_angle = *s.ideal_angle;
  } else if (s.schedule.empty()) {
    rep.ideal_angle = 0.0;
  } else {
    const HolonomyResult hol = schedule_holonomy(s.kind, s.schedule, s.wilson_steps);
    rep.berry_phase = hol.berry_phase;
    rep.ideal_angle = hol.berry_phase.value_or(0.0);
  }
  const Vector target_logical = ideal_gate(s.kind, rep.ideal_angle).matrix * s.psi_in;

  const HilbertLayout layout = layer_layout(enc, s.layer, cutoff);
  const std::size_t dim = layout.total_dim();
  const auto embed = dfs_embedding(enc, s.layer, cutoff);
  const auto to_full = [&](const Vector& logical) {
    const Ket dfs = enc.logical_to_dfs(logical);
    Vector v = Vector::Zero(Eigen::Index(dim));
    for (std::size_t i = 0; i < embed.size(); ++i) v(Eigen::Index(embed[i])) = dfs.amplitudes(Eigen::Index(i));
    return Ket(layout, v);
  };
  const Ket psi0 = to_full(s.psi_in);
  rep.ideal_state = to_full(target_logical);

  // Hamiltonian terms.
  TermHamiltonian h;
  h.layout = layout;
  const auto ddim = enc.dim();
  const double fd_step = s.schedule.empty() ? 0.0 : s.fd_fraction * s.schedule.shortest_segment();
  const auto schedule = s.schedule;
  const GateKind kind = s.kind;
  const CdSource cd = s.counterdiabatic;
  std::size_t n_program_terms = 0;

  if (s.layer == Layer::dfs_abstract) {
    for (std::size_t x = 0; x < ddim; ++x)
      for (std::size_t y = 0; y < ddim; ++y) h.terms.push_back(single_entry(ddim, x, y));
    n_program_terms = h.terms.size();
    h.coefficients = [=](double t, std::span<cplx> c) {
      if (schedule.empty()) {
        std::fill(c.begin(), c.end(), cplx{});
        return;
      }
      const Matrix m = dfs_hamiltonian(kind, schedule, enc, cd, t, fd_step);
      for (std::size_t x = 0; x < ddim; ++x)
        for (std::size_t y = 0; y < ddim; ++y) c[x * ddim + y] = m(Eigen::Index(x), Eigen::Index(y));
    };
  } else {
    auto prog = std::make_shared<RegisterProgram>(register_program(enc));
    const SparseMatrix id_f = sparse_identity(cutoff + 1);
    for (const auto& t : prog->terms) h.terms.push_back(s.layer == Layer::full_cavity ? kron(t, id_f) : t);
    n_program_terms = h.terms.size();
    if (s.drive.include_stark) {
      SparseMatrix stark{Eigen::Index(dim), Eigen::Index(dim)};
      const Matrix a = annihilation(cutoff + 1).matrix;
      const SparseMatrix aad = to_sparse(a * a.adjoint());
      for (std::size_t j = 1; j <= n; ++j) {
        const auto& c = s.drive.centers[j - 1];
        if (!c.laser_on) continue;
        const double shift = s.drive.g * s.drive.g / c.delta;
        const SparseMatrix nj = number_product(n, {j});
        stark += shift * (s.layer == Layer::full_cavity ? kron(nj, aad) : nj);
      }
      h.terms.push_back(stark);
    }
    const bool has_stark = s.drive.include_stark;
    h.coefficients = [=](double t, std::span<cplx> c) {
      std::fill(c.begin(), c.end(), cplx{});
      if (has_stark) c[n_program_terms] = 1.0;
      if (schedule.empty()) return;
      const Matrix m = dfs_hamiltonian(kind, schedule, enc, cd, t, fd_step);
      const double scale = std::max(1.0, max_abs(m));
      for (auto [x, y] : prog->forbidden)
        if (std::abs(m(x, y)) > 1e-8 * scale)
          throw layout_error("DFS coupling " + enc.labels[std::size_t(y)] + " -> " + enc.labels[std::size_t(x)] +
                             " has no two-body flip-flop realization");
      std::vector<char> set(n_program_terms, 0);
      for (const auto& [k, x, y] : prog->sources) {
        const cplx v = m(x, y);
        if (!set[k]) {
          c[k] = v;
          set[k] = 1;
        } else if (std::abs(c[k] - v) > 1e-8 * scale) {
          throw layout_error("DFS entries sharing flip-flop term disagree at " + enc.labels[std::size_t(y)] +
                             " -> " + enc.labels[std::size_t(x)]);
        }
      }
    };
  }

  // Dissipators.
  TermLindbladModel model;
  model.hamiltonian = h;
  if (s.noise.any()) {
    const SparseMatrix id_f = sparse_identity(cutoff + 1);
    const auto lift = [&](const SparseMatrix& m) { return s.layer == Layer::full_cavity ? kron(m, id_f) : m; };
    if (s.noise.gamma > 0.0) model.channels.push_back({lift(collective_lowering(n)), s.noise.gamma, "S-"});
    if (s.noise.gamma_phi > 0.0) model.channels.push_back({lift(collective_z(n)), s.noise.gamma_phi, "Sz"});
    if (s.noise.kappa > 0.0) {
      // Photon admixture of each dressed qubit. Centres sharing a detuning
      // radiate coherently; different detunings beat at GHz and are kept as
      // independent channels.
      std::map<double, SparseMatrix> groups;
      for (std::size_t j = 1; j <= n; ++j) {
        const auto& c = s.drive.centers[j - 1];
        if (!c.laser_on) continue;
        const cplx amp = -(s.drive.g / c.delta) * std::exp(iu * c.phi);
        auto [it, fresh] = groups.try_emplace(c.delta, SparseMatrix(lowering(n, j).rows(), lowering(n, j).cols()));
        it->second += amp * lowering(n, j);
      }
      for (auto& [delta, op] : groups)
        model.channels.push_back({lift(op), s.noise.kappa, "kappa@" + std::to_string(units::to_mhz(delta))});
      if (s.layer == Layer::full_cavity) {
        const SparseMatrix a = to_sparse(annihilation(cutoff + 1).matrix);
        model.channels.push_back({kron(sparse_identity(std::size_t{1} << n), a), s.noise.kappa, "a"});
      }
    }
  }

  PropagationOptions opt;
  opt.tol = s.tol;
  opt.dark_basis = [=](double t) {
    Matrix b = Matrix::Zero(Eigen::Index(dim), 0);
    if (schedule.empty()) {
      // Without drive the whole DFS is degenerate; score leakage out of it.
      b = Matrix::Zero(Eigen::Index(dim), Eigen::Index(embed.size()));
      for (std::size_t i = 0; i < embed.size(); ++i) b(Eigen::Index(embed[i]), Eigen::Index(i)) = 1.0;
      return b;
    }
    const auto ds = dark_states(kind, schedule.at(t));
    b = Matrix::Zero(Eigen::Index(dim), Eigen::Index(ds.size()));
    for (std::size_t k = 0; k < ds.size(); ++k)
      for (std::size_t i = 0; i < embed.size(); ++i)
        b(Eigen::Index(embed[i]), Eigen::Index(k)) = ds[k].amplitudes(Eigen::Index(i));
    return b;
  };
  const auto grid = uniform_grid(total, s.samples);
  rep.trajectory = s.noise.any() ? propagate_lindblad(model, DensityMatrix::pure(psi0), grid, opt)
                                 : propagate_unitary(h, psi0, grid, opt);

  const Trajectory& tr = rep.trajectory;
  const std::size_t last = tr.size() - 1;
  rep.fidelity = std::clamp(tr.fidelity(last, rep.ideal_state), 0.0, 1.0);
  rep.full_dim = dim;
  rep.reduced_dim = tr.support.size();
  rep.stats = tr.stats;
  rep.max_symmetrization = tr.max_symmetrization;
  rep.min_eigenvalue = tr.density ? 1.0 : 0.0;
  for (const auto& d : tr.diagnostics) {
    rep.max_trace_error = std::max(rep.max_trace_error, d.trace_error);
    rep.max_dark_leakage = std::max(rep.max_dark_leakage, d.dark_leakage);
    if (tr.density) rep.min_eigenvalue = std::min(rep.min_eigenvalue, d.min_eigenvalue);
  }
  rep.dark_leakage = tr.diagnostics.back().dark_leakage;

  // Final state on the computational DFS states.
  const DensityMatrix rho = tr.density_matrix(last);
  const auto comp = enc.computational_labels();
  rep.logical_state = Matrix::Zero(Eigen::Index(comp.size()), Eigen::Index(comp.size()));
  for (std::size_t a = 0; a < comp.size(); ++a)
    for (std::size_t b = 0; b < comp.size(); ++b)
      rep.logical_state(Eigen::Index(a), Eigen::Index(b)) =
          rho.matrix(Eigen::Index(embed[enc.basis_position(comp[a])]), Eigen::Index(embed[enc.basis_position(comp[b])]));
  rep.logical_population = rep.logical_state.trace().real();

  const Matrix& L = rep.logical_state;
  const auto li = Eigen::Index(comp.size() - 1);
  if (s.kind == GateKind::bitphase) {
    if (s.psi_in.imag().cwiseAbs().maxCoeff() <= 1e-12) {
      const double alpha = std::atan2(s.psi_in(1).real(), s.psi_in(0).real());
      const double two = std::atan2(2.0 * L(1, 0).real(), (L(0, 0) - L(1, 1)).real());
      rep.simulated_angle = wrap_half_pi(0.5 * two - alpha);
    }
  } else if (std::abs(s.psi_in(0)) > 1e-6 && std::abs(s.psi_in(li)) > 1e-6) {
    rep.simulated_angle = wrap_pi(std::arg(L(li, 0)) - std::arg(s.psi_in(li) * std::conj(s.psi_in(0))));
  }

  // Frozen snapshot of every input that shaped the run.
  auto& P = rep.parameters;
  P["kind"] = to_string(s.kind);
  P["layer"] = to_string(s.layer);
  P["counterdiabatic"] = to_string(s.counterdiabatic);
  P["encoding_qubits"] = enc.physical_qubits;
  P["lambda_prime_rad_per_us"] = s.schedule.lambda_prime();
  P["total_time_us"] = total;
  nlohmann::ordered_json segs = nlohmann::ordered_json::array();
  for (const auto& g : s.schedule.segments())
    segs.push_back({{"theta_start", g.theta_start},
                    {"theta_end", g.theta_end},
                    {"phi_start", g.phi_start},
                    {"phi_end", g.phi_end},
                    {"duration_us", g.duration},
                    {"ramp", g.ramp == Ramp::cosine ? "cosine" : "linear"}});
  P["segments"] = segs;
  P["noise_rad_per_us"] = {{"kappa", s.noise.kappa}, {"gamma", s.noise.gamma}, {"gamma_phi", s.noise.gamma_phi}};
  nlohmann::ordered_json centers = nlohmann::ordered_json::array();
  for (const auto& c : s.drive.centers)
    centers.push_back({{"laser_on", c.laser_on}, {"delta_rad_per_us", c.delta}, {"phi", c.phi}});
  P["drive"] = {{"g_rad_per_us", s.drive.g},
                {"centers", centers},
                {"fock_cutoff", s.drive.fock_cutoff},
                {"include_stark", s.drive.include_stark},
                {"dispersive_ratio", s.drive.dispersive_ratio}};
  nlohmann::ordered_json psi = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < s.psi_in.size(); ++i) psi.push_back({s.psi_in(i).real(), s.psi_in(i).imag()});
  P["psi_in"] = psi;
  P["tol"] = s.tol;
  P["samples"] = s.samples;
  P["wilson_steps"] = s.wilson_steps;
  P["fd_fraction"] = s.fd_fraction;
  if (s.ideal_angle) P["ideal_angle_override"] = *s.ideal_angle;

  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rep;
}

Matrix logical_propagator(const GateSetup& setup) {
  GateSetup s = setup;
  s.noise = {};
  s.samples = 1;
  const DfsEncoding enc = s.encoding ? *s.encoding : DfsEncoding::for_kind(s.kind);
  const auto comp = enc.computational_labels();
  const auto d = Eigen::Index(comp.size());
  const auto embed = dfs_embedding(enc, s.layer, s.drive.fock_cutoff);
  Matrix u(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    s.psi_in = Vector::Unit(d, k);
    const GateReport r = run_gate(s);
    if (k == 0) s.ideal_angle = r.ideal_angle;
    const Ket out = r.trajectory.ket(r.trajectory.size() - 1);
    for (Eigen::Index a = 0; a < d; ++a)
      u(a, k) = out.amplitudes(Eigen::Index(embed[enc.basis_position(comp[std::size_t(a)])]));
  }
  return u;
}

}  // namespace hqc
