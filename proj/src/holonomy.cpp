#include "hqc/holonomy.hpp"

#include <algorithm>
#include <cmath>

namespace hqc {

std::string to_string(GateKind k) {
  switch (k) {
    case GateKind::bitphase: return "bitphase";
    case GateKind::phase: return "phase";
    case GateKind::cp: return "cp";
  }
  return "unknown";
}

GateKind gate_kind_from_string(std::string_view s) {
  if (s == "bitphase") return GateKind::bitphase;
  if (s == "phase") return GateKind::phase;
  if (s == "cp") return GateKind::cp;
  throw usage_error("unknown gate kind '" + std::string(s) + "'");
}

namespace {

std::size_t bits_to_index(std::string_view bits) {
  std::size_t v = 0;
  for (char c : bits) v = (v << 1) | (c == '1' ? 1u : 0u);
  return v;
}

DfsEncoding make_encoding(DfsName name, std::vector<std::pair<std::string, std::string>> states,
                          std::vector<std::size_t> qubits) {
  DfsEncoding e;
  e.name = name;
  e.physical_qubits = std::move(qubits);
  for (auto& [label, bits] : states) {
    e.labels.push_back(label);
    e.physical_index[label] = bits_to_index(bits);
  }
  return e;
}

}  // namespace

DfsEncoding DfsEncoding::c1() {
  return make_encoding(DfsName::C1, {{"a1", "1000"}, {"0L", "0001"}, {"1L", "0010"}, {"a2", "0100"}}, {1, 2, 3, 4});
}

DfsEncoding DfsEncoding::c2() {
  return make_encoding(DfsName::C2,
                       {{"a3", "10000010"},
                        {"00L", "00010001"},
                        {"01L", "00010010"},
                        {"10L", "00100001"},
                        {"11L", "00100010"},
                        {"a4", "01000010"}},
                       {1, 2, 3, 4, 5, 6, 7, 8});
}

DfsEncoding DfsEncoding::for_kind(GateKind k) { return k == GateKind::cp ? c2() : c1(); }

HilbertLayout DfsEncoding::layout() const { return name == DfsName::C1 ? c1_layout() : c2_layout(); }

HilbertLayout DfsEncoding::register_layout() const {
  std::vector<Factor> f;
  for (auto q : physical_qubits) f.push_back({"nv" + std::to_string(q), 2});
  return HilbertLayout(std::move(f));
}

std::size_t DfsEncoding::basis_position(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw usage_error("label '" + std::string(label) + "' is not part of the encoding");
  return static_cast<std::size_t>(it - labels.begin());
}

std::vector<std::string> DfsEncoding::computational_labels() const {
  if (name == DfsName::C1) return {"0L", "1L"};
  return {"00L", "01L", "10L", "11L"};
}

Ket DfsEncoding::logical_to_dfs(const Vector& logical) const {
  const auto comp = computational_labels();
  if (static_cast<std::size_t>(logical.size()) != comp.size())
    throw layout_error("logical amplitude vector has the wrong length");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < comp.size(); ++i)
    v(static_cast<Eigen::Index>(basis_position(comp[i]))) = logical(static_cast<Eigen::Index>(i));
  return Ket(layout(), v);
}

Vector DfsEncoding::dfs_to_logical(const Vector& dfs) const {
  if (static_cast<std::size_t>(dfs.size()) != dim()) throw layout_error("DFS vector has the wrong length");
  const auto comp = computational_labels();
  Vector v(static_cast<Eigen::Index>(comp.size()));
  for (std::size_t i = 0; i < comp.size(); ++i)
    v(static_cast<Eigen::Index>(i)) = dfs(static_cast<Eigen::Index>(basis_position(comp[i])));
  return v;
}

Ket DfsEncoding::to_register(const Ket& dfs) const {
  if (!(dfs.layout == layout())) throw layout_error("ket is not on this encoding's DFS layout");
  const auto reg = register_layout();
  Vector v = Vector::Zero(static_cast<Eigen::Index>(reg.total_dim()));
  for (std::size_t i = 0; i < labels.size(); ++i)
    v(static_cast<Eigen::Index>(physical_index.at(labels[i]))) = dfs.amplitudes(static_cast<Eigen::Index>(i));
  return Ket(reg, v);
}

DfsEncoding cp_encoding_for(std::size_t m, std::size_t n, std::size_t total_logical) {
  if (!(m >= 1 && m < n && n <= total_logical))
    throw usage_error("cp_encoding_for: need 1 <= m < n <= total, got m = " + std::to_string(m) +
                      ", n = " + std::to_string(n) + ", total = " + std::to_string(total_logical));
  DfsEncoding e = DfsEncoding::c2();
  e.physical_qubits.clear();
  for (std::size_t k = 4 * m - 3; k <= 4 * m; ++k) e.physical_qubits.push_back(k);
  for (std::size_t k = 4 * n - 3; k <= 4 * n; ++k) e.physical_qubits.push_back(k);
  return e;
}

namespace {

DfsName required_dfs(GateKind k) { return k == GateKind::cp ? DfsName::C2 : DfsName::C1; }

void set_pair(Matrix& h, std::size_t r, std::size_t c, cplx v) {
  h(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
  h(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = std::conj(v);
}

}  // namespace

Op build_h0(GateKind kind, const ControlPoint& p, const DfsEncoding& enc) {
  if (enc.name != required_dfs(kind))
    throw layout_error("build_h0: " + to_string(kind) + " requires " +
                       (required_dfs(kind) == DfsName::C1 ? "C1" : "C2"));
  const double l = p.lambda_prime;
  if (kind == GateKind::bitphase) {
    Matrix h = Matrix::Zero(c1::dim, c1::dim);
    set_pair(h, c1::a1, c1::zero, l * std::sin(p.theta) * std::cos(p.phi));
    set_pair(h, c1::a1, c1::one, l * std::sin(p.theta) * std::sin(p.phi));
    set_pair(h, c1::a1, c1::a2, l * std::cos(p.theta));
    return Op(c1_layout(), h, true);
  }
  const cplx tilt = l * std::sin(p.theta / 2.0) * std::exp(iu * p.phi);
  const double straight = l * std::cos(p.theta / 2.0);
  if (kind == GateKind::phase) {
    Matrix h = Matrix::Zero(c1::dim, c1::dim);
    set_pair(h, c1::a1, c1::one, tilt);
    set_pair(h, c1::a1, c1::a2, straight);
    return Op(c1_layout(), h, true);
  }
  Matrix h = Matrix::Zero(c2::dim, c2::dim);
  set_pair(h, c2::a3, c2::l11, tilt);
  set_pair(h, c2::a3, c2::a4, straight);
  return Op(c2_layout(), h, true);
}

Op build_h0(GateKind kind, const ControlPoint& p) { return build_h0(kind, p, DfsEncoding::for_kind(kind)); }

std::vector<Ket> dark_states(GateKind kind, const ControlPoint& p) {
  const double th = p.theta, ph = p.phi;
  if (kind == GateKind::bitphase) {
    Vector d0 = Vector::Zero(c1::dim), d1 = Vector::Zero(c1::dim);
    d0(c1::zero) = std::cos(th) * std::cos(ph);
    d0(c1::one) = std::cos(th) * std::sin(ph);
    d0(c1::a2) = -std::sin(th);
    d1(c1::zero) = -std::sin(ph);
    d1(c1::one) = std::cos(ph);
    return {Ket(c1_layout(), d0).normalized(), Ket(c1_layout(), d1)};
  }
  const double c = std::cos(th / 2.0), s = std::sin(th / 2.0);
  const cplx e = std::exp(iu * ph);
  if (kind == GateKind::phase) {
    Vector d1 = Vector::Zero(c1::dim);
    d1(c1::one) = c;
    d1(c1::a2) = -s * e;
    return {Ket::basis(c1_layout(), c1::zero), Ket(c1_layout(), d1)};
  }
  Vector d3 = Vector::Zero(c2::dim);
  d3(c2::l11) = c;
  d3(c2::a4) = -s * e;
  return {Ket::basis(c2_layout(), c2::l00), Ket::basis(c2_layout(), c2::l01), Ket::basis(c2_layout(), c2::l10),
          Ket(c2_layout(), d3)};
}

Matrix dark_projector(GateKind kind, const ControlPoint& p) {
  const auto ds = dark_states(kind, p);
  const auto d = ds.front().amplitudes.size();
  Matrix proj = Matrix::Zero(d, d);
  for (const auto& k : ds) proj += k.amplitudes * k.amplitudes.adjoint();
  return proj;
}

PulseSchedule::PulseSchedule(std::vector<Segment> segments, double lambda_prime)
    : segments_(std::move(segments)), lambda_prime_(lambda_prime) {
  if (segments_.empty()) throw usage_error("PulseSchedule: at least one segment is required");
  if (!(lambda_prime_ >= 0.0) || !std::isfinite(lambda_prime_))
    throw usage_error("PulseSchedule: lambda_prime must be finite and non-negative");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.duration > 0.0) || !std::isfinite(s.duration))
      throw usage_error("PulseSchedule: segment " + std::to_string(i + 1) + " has non-positive duration");
    if (i > 0) {
      const auto& prev = segments_[i - 1];
      if (std::abs(prev.theta_end - s.theta_start) > 1e-12 || std::abs(prev.phi_end - s.phi_start) > 1e-12)
        throw usage_error("PulseSchedule: angles jump at knot " + std::to_string(i));
    }
  }
}

ControlPoint PulseSchedule::at(double t) const {
  if (segments_.empty()) throw usage_error("PulseSchedule::at on an empty schedule");
  std::size_t i = 0;
  double start = 0.0;
  while (i + 1 < segments_.size() && t >= start + segments_[i].duration) {
    start += segments_[i].duration;
    ++i;
  }
  const auto& s = segments_[i];
  const double tau = (t - start) / s.duration;
  double frac = tau, rate = 1.0 / s.duration;
  if (s.ramp == Ramp::cosine) {
    frac = 0.5 * (1.0 - std::cos(pi * tau));
    rate = 0.5 * pi * std::sin(pi * tau) / s.duration;
  }
  ControlPoint p;
  p.theta = s.theta_start + (s.theta_end - s.theta_start) * frac;
  p.phi = s.phi_start + (s.phi_end - s.phi_start) * frac;
  p.theta_dot = (s.theta_end - s.theta_start) * rate;
  p.phi_dot = (s.phi_end - s.phi_start) * rate;
  p.lambda_prime = lambda_prime_;
  return p;
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& s : segments_) t += s.duration;
  return t;
}

std::vector<double> PulseSchedule::knots() const {
  std::vector<double> k{0.0};
  for (const auto& s : segments_) k.push_back(k.back() + s.duration);
  return k;
}

double PulseSchedule::shortest_segment() const {
  double m = segments_.empty() ? 0.0 : segments_.front().duration;
  for (const auto& s : segments_) m = std::min(m, s.duration);
  return m;
}

PulseSchedule PulseSchedule::rescaled(double total) const {
  if (!(total > 0.0)) throw usage_error("PulseSchedule::rescaled: total must be positive");
  const double f = total / total_duration();
  auto segs = segments_;
  for (auto& s : segs) s.duration *= f;
  return PulseSchedule(std::move(segs), lambda_prime_);
}

PulseSchedule make_schedule(GateKind kind, double phi_c, std::span<const double> durations, Ramp ramp,
                            double lambda_prime) {
  if (!(phi_c > 0.0 && phi_c < 2.0 * pi)) throw usage_error("make_schedule: phi_c must lie in (0, 2pi)");
  for (double d : durations)
    if (!(d > 0.0)) throw usage_error("make_schedule: durations must be positive");
  const bool bit = kind == GateKind::bitphase;
  if (bit ? (durations.size() != 3 && durations.size() != 4) : durations.size() != 3)
    throw usage_error("make_schedule: " + to_string(kind) + " takes " + (bit ? "3 or 4" : "3") + " durations");
  const double top = bit ? pi / 2.0 : pi;
  std::vector<Segment> segs{
      {0.0, top, 0.0, 0.0, durations[0], ramp},
      {top, top, 0.0, phi_c, durations[1], ramp},
      {top, 0.0, phi_c, phi_c, durations[2], ramp},
  };
  if (durations.size() == 4) segs.push_back({0.0, 0.0, phi_c, 0.0, durations[3], ramp});
  return PulseSchedule(std::move(segs), lambda_prime);
}

Matrix dark_connection(GateKind kind, const PulseSchedule& schedule, double t) {
  const ControlPoint p = schedule.at(t);
  const auto d = dark_states(kind, p);
  const auto m = static_cast<Eigen::Index>(d.size());
  Matrix a = Matrix::Zero(m, m);
  const double speed = std::hypot(p.theta_dot, p.phi_dot);
  if (speed == 0.0) return a;
  // Five-point difference along the local tangent, angle step 1e-3 rad.
  const double h = 1e-3 / speed;
  auto shifted = [&](double k) {
    ControlPoint q = p;
    q.theta += k * h * p.theta_dot;
    q.phi += k * h * p.phi_dot;
    return dark_states(kind, q);
  };
  const auto f2 = shifted(2), f1 = shifted(1), b1 = shifted(-1), b2 = shifted(-2);
  for (Eigen::Index l = 0; l < m; ++l) {
    const auto L = static_cast<std::size_t>(l);
    const Vector dot = (-f2[L].amplitudes + 8.0 * f1[L].amplitudes - 8.0 * b1[L].amplitudes + b2[L].amplitudes) /
                       (12.0 * h);
    for (Eigen::Index k = 0; k < m; ++k) a(k, l) = iu * d[static_cast<std::size_t>(k)].amplitudes.dot(dot);
  }
  return 0.5 * (a + a.adjoint());
}

HolonomyResult wilson_loop(GateKind kind, const PulseSchedule& schedule, std::size_t steps) {
  if (schedule.empty()) throw usage_error("wilson_loop: empty schedule");
  if (steps == 0) throw usage_error("wilson_loop: steps must be positive");
  const double total = schedule.total_duration();
  const auto start = dark_states(kind, schedule.at(0.0));
  const auto end = dark_states(kind, schedule.at(total));
  double mismatch = 0.0;
  for (std::size_t k = 0; k < start.size(); ++k)
    mismatch = std::max(mismatch, max_abs(end[k].amplitudes - start[k].amplitudes));
  if (mismatch > 1e-8)
    throw loop_closure_error("dark frame does not close: endpoint mismatch " + std::to_string(mismatch));

  const auto m = static_cast<Eigen::Index>(start.size());
  const HilbertLayout dark = HilbertLayout::single("dark", start.size());
  Matrix u = Matrix::Identity(m, m);
  const auto knots = schedule.knots();
  for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
    const double len = knots[s + 1] - knots[s];
    const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(double(steps) * len / total)));
    const double dt = len / double(n);
    // Fourth-order Magnus step on the two Gauss-Legendre nodes of each interval:
    // U_step = exp(i dt/2 (A1 + A2) - sqrt(3)/12 dt^2 [A2, A1]), later factors on the left.
    const double off = 0.5 / std::sqrt(3.0);
    for (std::size_t j = 0; j < n; ++j) {
      const double t0 = knots[s] + double(j) * dt;
      const Matrix a1 = dark_connection(kind, schedule, t0 + (0.5 - off) * dt);
      const Matrix a2 = dark_connection(kind, schedule, t0 + (0.5 + off) * dt);
      Matrix gen = -0.5 * (a1 + a2) - iu * (std::sqrt(3.0) / 12.0) * dt * (a2 * a1 - a1 * a2);
      gen = 0.5 * (gen + gen.adjoint());
      u = propagator_step(Op(dark, gen, true), dt).matrix * u;
    }
  }

  HolonomyResult r;
  switch (kind) {
    case GateKind::bitphase:
      r.dark_basis_labels = {"D'0", "D'1"};
      r.berry_phase = std::atan2(u(1, 0).real(), u(0, 0).real());
      break;
    case GateKind::phase:
      r.dark_basis_labels = {"D0", "D1"};
      r.berry_phase = std::arg(u(1, 1));
      break;
    case GateKind::cp:
      r.dark_basis_labels = {"D''0", "D''1", "D''2", "D''3"};
      r.berry_phase = std::arg(u(3, 3));
      break;
  }
  r.unitary = Op(dark, std::move(u));
  return r;
}

Op ideal_gate(GateKind kind, double angle) {
  const std::size_t d = kind == GateKind::cp ? 4 : 2;
  const HilbertLayout logical = HilbertLayout::single("logical", d);
  Matrix g = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (kind == GateKind::bitphase) {
    g(0, 1) = iu;
    g(1, 0) = -iu;
  } else {
    g(static_cast<Eigen::Index>(d - 1), static_cast<Eigen::Index>(d - 1)) = 1.0;
  }
  Op u = propagator_step(Op(logical, -g, true), angle);
  u.hermitian = false;
  return u;
}

}  // namespace hqc
