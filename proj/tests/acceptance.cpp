// Acceptance checks: one PASS/FAIL line per criterion, detail lines start
// with '#'. Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dispersive_pair.hpp"
#include "hqc/campaign.hpp"
#include "hqc/config.hpp"
#include "hqc/gate.hpp"
#include "hqc/tqda.hpp"
#include "support.hpp"

using namespace hqc;

namespace {

// Tolerances.
constexpr double kDarkNullTol = 1e-12;       // AC1, relative to lambda'
constexpr double kCdTol = 1e-6;              // AC2, max-norm
constexpr double kCdFdFraction = 1e-4;       // AC2, step / segment
constexpr double kDarkPopulation = 1e-6;     // AC3, 1 - population
constexpr double kH0OnlyPopulation = 0.99;   // AC3, uncorrected run must drop below
constexpr double kAngleTol = 1e-3;           // AC4, rad
constexpr double kFidelityBand = 0.005;      // AC5
constexpr double kTraceTol = 1e-8;           // AC6
constexpr double kSymTol = 1e-10;            // AC6
constexpr double kEigTol = -1e-7;            // AC6
constexpr double kDampingTol = 1e-8;         // AC6
constexpr double kDispersiveGap = 5e-3;      // AC7
constexpr double kCouplingRatio = 0.025;     // AC7, g / delta
constexpr double kCutoffShift = 1e-4;        // AC7
constexpr double kRoundTripTol = 1e-10;      // AC8, relative to the largest target

const std::vector<double> kPeriodGrid{0.05, 0.1, 0.2, 0.5, 1, 2, 5};
constexpr GateKind kKinds[] = {GateKind::bitphase, GateKind::phase, GateKind::cp};

double wrap(double a) { return std::remainder(a, 2 * pi); }

struct Check {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c = {false, fmt::format("exception: {}", e.what())};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!c.pass) ++failures;
  std::printf("%s %s %s [%.1fs]\n", id, c.pass ? "PASS" : "FAIL", c.detail.c_str(), s);
  std::fflush(stdout);
}

double period(double lp) { return 2 * pi / lp; }

GateSetup abstract_gate(GateKind kind, double phi_c, double total, double lp) {
  GateSetup s;
  s.kind = kind;
  s.layer = Layer::dfs_abstract;
  std::vector<double> d(3, total / 3);
  s.schedule = make_schedule(kind, phi_c, d, Ramp::cosine, lp);
  const auto n = kind == GateKind::cp ? 4 : 2;
  s.psi_in = Vector::Zero(n);
  s.psi_in(0) = s.psi_in(n - 1) = 1 / std::sqrt(2.0);
  s.samples = 100;
  return s;
}

ScenarioConfig bundled(const std::string& file) {
  return load_campaign(std::string(HQC_CONFIG_DIR) + "/" + file).scenarios.front();
}

// ---------- AC1 ----------
Check ac1() {
  std::mt19937 rng(101);
  double worst = 0.0;
  for (auto kind : kKinds) {
    for (int i = 0; i < 100; ++i) {
      ControlPoint p{test::uniform(rng, 0, pi), test::uniform(rng, 0, 2 * pi), 0, 0, test::uniform(rng, 0.1, 20)};
      const Matrix h = build_h0(kind, p).matrix;
      for (const auto& d : dark_states(kind, p))
        worst = std::max(worst, (h * d.amplitudes).norm() / p.lambda_prime);
    }
  }
  return {worst <= kDarkNullTol, fmt::format("max |H0 D|/lambda' = {:.2e} (tol {:.0e}, 300 points)", worst, kDarkNullTol)};
}

// ---------- AC2 ----------
Check ac2() {
  const double lp = units::mhz(1.0);
  double worst = 0.0;
  for (auto kind : kKinds) {
    const std::vector<double> d(3, period(lp) / 3);
    auto sched = make_schedule(kind, 0.7 * pi, d, Ramp::cosine, lp);
    auto enc = DfsEncoding::for_kind(kind);
    double t0 = 0.0;
    for (const auto& seg : sched.segments()) {
      for (int k = 1; k < 20; ++k) {
        const double t = t0 + seg.duration * k / 20.0;
        ControlPoint p = sched.at(t);
        auto h = along_control_point(enc.layout(), [kind](const ControlPoint& q) { return build_h0(kind, q); }, p);
        const Matrix num = counterdiabatic_numeric(h, 0.0, kCdFdFraction * seg.duration).matrix.matrix;
        const Matrix closed = kind == GateKind::bitphase ? cd_bitphase_closed_form(p).matrix.matrix
                              : kind == GateKind::phase  ? cd_phase_closed_form(p).matrix.matrix
                                                         : cd_cp_closed_form(p).matrix.matrix;
        worst = std::max(worst, max_abs(num - closed));
      }
      t0 += seg.duration;
    }
  }
  return {worst <= kCdTol, fmt::format("max |H1_num - H1_closed| = {:.2e} (tol {:.0e})", worst, kCdTol)};
}

// ---------- AC3 ----------
Check ac3() {
  const double lp = 2.0;
  double worst = 0.0;
  for (auto kind : kKinds)
    for (double f : {0.1, 1.0, 10.0}) {
      auto r = run_gate(abstract_gate(kind, pi / 2, f * period(lp), lp));
      worst = std::max(worst, r.max_dark_leakage);
    }
  GateSetup s = abstract_gate(GateKind::phase, pi / 2, 0.1 * period(lp), lp);
  s.psi_in = Vector::Zero(2);
  s.psi_in(1) = 1.0;
  s.counterdiabatic = CdSource::none;
  const double bare = 1.0 - run_gate(s).max_dark_leakage;
  const bool ok = worst <= kDarkPopulation && bare < kH0OnlyPopulation;
  return {ok, fmt::format("min dark population with H1 = 1 - {:.2e}; H0 only at 0.1 period = {:.4f}", worst, bare)};
}

// ---------- AC4 ----------
Check ac4() {
  const double lp = 2.0;
  double worst = 0.0;
  for (double phi_c : {pi / 4, pi / 2, pi}) {
    for (auto kind : {GateKind::phase, GateKind::cp}) {
      auto r = run_gate(abstract_gate(kind, phi_c, period(lp), lp));
      const double err = std::abs(wrap(r.simulated_angle.value() + phi_c));
      worst = std::max(worst, err);
    }
    GateSetup s = abstract_gate(GateKind::bitphase, phi_c, period(lp), lp);
    const double beta = schedule_holonomy(GateKind::bitphase, s.schedule, s.wilson_steps).berry_phase.value();
    Matrix u = logical_propagator(s);
    const Matrix ideal = ideal_gate(GateKind::bitphase, beta).matrix;
    const cplx overlap = (ideal.adjoint() * u).trace();
    u *= std::conj(overlap) / std::abs(overlap);
    const double c = 0.5 * (u(0, 0) + u(1, 1)).real();
    const double sn = 0.5 * (u(1, 0) - u(0, 1)).real();
    const double sim = std::atan2(sn, c);
    const double ref = std::atan2(0.5 * (ideal(1, 0) - ideal(0, 1)).real(), 0.5 * (ideal(0, 0) + ideal(1, 1)).real());
    worst = std::max(worst, std::abs(wrap(sim - ref)));
    std::printf("# AC4 phi_c = %.4f: bitphase beta_2 = %.6f, simulated = %.6f\n", phi_c, ref, sim);
  }
  return {worst <= kAngleTol, fmt::format("max angle error = {:.2e} rad (tol {:.0e})", worst, kAngleTol)};
}

// ---------- AC5 / AC6 ----------
struct ScanRow {
  double periods;
  GateReport report;
};

struct Scan {
  std::string name;
  double target;
  std::vector<ScanRow> rows;
};

std::vector<Scan>& scans() {
  static std::vector<Scan> s;
  return s;
}

Check ac5() {
  const std::pair<const char*, double> cases[] = {
      {"phase_gate.yaml", 0.9952}, {"bitphase_gate.yaml", 0.9991}, {"cp_gate.yaml", 0.9976}};
  bool ok = true;
  std::string detail;
  for (const auto& [file, target] : cases) {
    ScenarioConfig base = bundled(file);
    Scan scan{base.name, target, {}};
    const ScanRow* best = nullptr;
    for (double f : kPeriodGrid) {
      ScenarioConfig s = base;
      apply_axis(s, "total_periods", f);
      scan.rows.push_back({f, run_gate(s.to_setup())});
      std::printf("# AC5 %s T = %g periods (%.4f us): F = %.6f\n", base.name.c_str(), f,
                  scan.rows.back().report.total_time, scan.rows.back().report.fidelity);
      std::fflush(stdout);
    }
    for (const auto& r : scan.rows)
      if (!best || std::abs(r.report.fidelity - target) < std::abs(best->report.fidelity - target)) best = &r;
    const bool hit = std::abs(best->report.fidelity - target) <= kFidelityBand;
    ok &= hit;
    detail += fmt::format("{} F = {:.4f} at T = {:g} periods, phi_c = {:.4f} (target {:.4f}); ", base.name,
                          best->report.fidelity, best->periods, base.phi_c, target);
    scans().push_back(std::move(scan));
  }
  detail += fmt::format("band {:.1f} pp", 100 * kFidelityBand);
  return {ok, detail};
}

Check ac6() {
  double trace = 0.0, sym = 0.0, eig = 1.0;
  for (const auto& scan : scans())
    for (const auto& r : scan.rows) {
      trace = std::max(trace, r.report.max_trace_error);
      sym = std::max(sym, r.report.max_symmetrization);
      eig = std::min(eig, r.report.min_eigenvalue);
    }
  const bool have = !scans().empty();

  auto l = HilbertLayout::single("q", 2);
  const double gamma = 0.8;
  const Op h = Op::hermitian_op(l, 1.7 * sigma_z().matrix);
  LindbladModel m{{l, [h](double) { return h; }}, {{sigma_minus(), gamma, "decay"}}};
  auto tr = propagate_lindblad(m, DensityMatrix::pure(Ket::basis(l, 1)), uniform_grid(4.0, 40));
  double damp = 0.0;
  for (std::size_t i = 0; i < tr.size(); ++i)
    damp = std::max(damp, std::abs(tr.density_matrix(i).matrix(1, 1).real() - std::exp(-gamma * tr.times[i])));

  const bool ok = have && trace <= kTraceTol && sym <= kSymTol && eig >= kEigTol && damp <= kDampingTol;
  return {ok, fmt::format("trace err {:.1e}, symmetrization {:.1e}, min eig {:.1e}, damping err {:.1e}{}", trace,
                          sym, eig, damp, have ? "" : " (no scan runs)")};
}

// ---------- AC7 ----------
Check ac7() {
  const auto pair = test::dispersive_pair(kCouplingRatio, 2, 4000);
  const double gap = max_abs(pair.cavity - pair.flip_flop);

  ScenarioConfig s = bundled("cp_gate.yaml");
  apply_axis(s, "total_periods", 0.2);
  s.layer = Layer::full_cavity;
  apply_axis(s, "fock_cutoff", 2);
  const double f2 = run_gate(s.to_setup()).fidelity;
  apply_axis(s, "fock_cutoff", 3);
  const double f3 = run_gate(s.to_setup()).fidelity;
  const double shift = std::abs(f3 - f2);
  apply_axis(s, "fock_cutoff", 1);
  std::printf("# AC7 cp full_cavity F: cutoff 1 = %.10f, 2 = %.10f, 3 = %.10f\n", run_gate(s.to_setup()).fidelity, f2, f3);

  const bool ok = gap <= kDispersiveGap && shift <= kCutoffShift;
  return {ok, fmt::format("g/delta = {:.3f}: max population gap {:.2e} (tol {:.0e}); cutoff 2 -> 3: dF = {:.2e} (tol {:.0e})",
                          kCouplingRatio, gap, kDispersiveGap, shift, kCutoffShift)};
}

// ---------- AC8 ----------
Check ac8() {
  std::mt19937 rng(108);
  const double g = units::mhz(50);
  double worst = 0.0;
  bool all_feasible = true;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x(4);
    for (auto& v : x) v = 1.0 / units::ghz(test::uniform(rng, 0.6, 6.0));
    PairCouplingProgram t;
    t.n_centers = 4;
    double largest = 0.0;
    for (std::size_t j = 1; j <= 4; ++j)
      for (std::size_t k = j + 1; k <= 4; ++k) {
        const double lam = 0.5 * g * g * (x[j - 1] + x[k - 1]);
        t.set(j, k, lam);
        largest = std::max(largest, std::abs(lam));
      }
    auto r = solve_laser_program(t, g);
    all_feasible &= r.feasible;
    for (const auto& [key, c] : t.canonical()) {
      const double got = effective_rabi(g, r.config.centers[key.first - 1].delta, r.config.centers[key.second - 1].delta);
      worst = std::max(worst, std::abs(got - c.lambda) / largest);
    }
  }

  PairCouplingProgram bp;
  bp.n_centers = 4;
  bp.set(1, 4, units::mhz(1.0), 0.0);
  bp.set(1, 2, units::mhz(1.0), 0.0);
  bp.set(2, 4, units::mhz(0.5), pi / 2);
  auto r = solve_laser_program(bp, g);
  bool phase_issue = false;
  for (const auto& i : r.issues) phase_issue |= i.kind == LaserProgramIssue::Kind::phase_inconsistent;

  const bool ok = all_feasible && worst <= kRoundTripTol && !r.feasible && phase_issue;
  return {ok, fmt::format("round-trip residual {:.1e} (tol {:.0e}); bit-phase leg phases {}", worst, kRoundTripTol,
                          !r.feasible && phase_issue ? "rejected as phase-inconsistent" : "not rejected")};
}

}  // namespace

int main() {
  report("AC1", ac1);
  report("AC2", ac2);
  report("AC3", ac3);
  report("AC4", ac4);
  report("AC5", ac5);
  report("AC6", ac6);
  report("AC7", ac7);
  report("AC8", ac8);
  return failures == 0 ? 0 : 1;
}
