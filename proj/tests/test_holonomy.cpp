#include <gtest/gtest.h>

#include <bitset>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "hqc/holonomy.hpp"
#include "support.hpp"

using namespace hqc;
using hqc::test::uniform;

namespace {

ControlPoint random_point(std::mt19937& rng) {
  ControlPoint p;
  p.theta = uniform(rng, 0.0, pi);
  p.phi = uniform(rng, 0.0, 2 * pi);
  p.lambda_prime = uniform(rng, 0.1, 10.0);
  return p;
}

const std::array<GateKind, 3> kinds{GateKind::bitphase, GateKind::phase, GateKind::cp};

}  // namespace

// ---------- encodings ----------
TEST(Encoding, C1PhysicalStates) {
  auto e = DfsEncoding::c1();
  EXPECT_EQ(e.physical_index.at("0L"), 0b0001u);
  EXPECT_EQ(e.physical_index.at("1L"), 0b0010u);
  EXPECT_EQ(e.physical_index.at("a1"), 0b1000u);
  EXPECT_EQ(e.physical_index.at("a2"), 0b0100u);
  EXPECT_EQ(e.labels[c1::a1], "a1");
  EXPECT_EQ(e.labels[c1::one], "1L");
}

TEST(Encoding, C2PhysicalStates) {
  auto e = DfsEncoding::c2();
  EXPECT_EQ(e.physical_index.at("00L"), 0b00010001u);
  EXPECT_EQ(e.physical_index.at("01L"), 0b00010010u);
  EXPECT_EQ(e.physical_index.at("10L"), 0b00100001u);
  EXPECT_EQ(e.physical_index.at("11L"), 0b00100010u);
  EXPECT_EQ(e.physical_index.at("a3"), 0b10000010u);
  EXPECT_EQ(e.physical_index.at("a4"), 0b01000010u);
}

TEST(Encoding, OneExcitationPerBlock) {
  for (const auto& e : {DfsEncoding::c1(), DfsEncoding::c2()}) {
    for (const auto& [label, idx] : e.physical_index) {
      for (std::size_t block = 0; block < e.n_qubits() / 4; ++block) {
        const auto nibble = (idx >> (4 * block)) & 0xFu;
        EXPECT_EQ(std::bitset<4>(nibble).count(), 1u) << label;
      }
    }
  }
}

TEST(Encoding, LogicalRoundTripAndRegister) {
  auto e = DfsEncoding::c2();
  Vector logical(4);
  logical << 0.5, cplx(0, 0.5), -0.5, 0.5;
  Ket dfs = e.logical_to_dfs(logical);
  EXPECT_LE(max_abs(e.dfs_to_logical(dfs.amplitudes) - logical), 0.0);
  Ket reg = e.to_register(dfs);
  EXPECT_EQ(reg.amplitudes.size(), 256);
  EXPECT_EQ(reg.amplitudes(0b00100010), cplx(0.5));
  EXPECT_EQ(reg.amplitudes(0b00010010), cplx(0, 0.5));
}

TEST(Encoding, CpEncodingCanonicalPair) {
  auto e = cp_encoding_for(1, 2, 2);
  auto c = DfsEncoding::c2();
  EXPECT_EQ(e.physical_qubits, c.physical_qubits);
  EXPECT_EQ(e.physical_index, c.physical_index);
  EXPECT_EQ(e.labels, c.labels);
}

TEST(Encoding, CpEncodingShifted) {
  auto e = cp_encoding_for(2, 3, 3);
  EXPECT_EQ(e.physical_qubits, (std::vector<std::size_t>{5, 6, 7, 8, 9, 10, 11, 12}));
  EXPECT_EQ(e.register_layout().factors().front().label, "nv5");
}

TEST(Encoding, CpEncodingRejectsBadIndices) {
  EXPECT_THROW(cp_encoding_for(2, 2, 3), usage_error);
  EXPECT_THROW(cp_encoding_for(0, 1, 3), usage_error);
  EXPECT_THROW(cp_encoding_for(3, 2, 3), usage_error);
  EXPECT_THROW(cp_encoding_for(1, 4, 3), usage_error);
}

// ---------- build_h0 ----------
TEST(TargetHamiltonian, PhaseAtThetaZero) {
  ControlPoint p{0.0, 1.3, 0.0, 0.0, 2.5};
  Matrix h = build_h0(GateKind::phase, p).matrix;
  Matrix expect = Matrix::Zero(4, 4);
  expect(c1::a1, c1::a2) = expect(c1::a2, c1::a1) = 2.5;
  EXPECT_LE(max_abs(h - expect), 1e-15);
}

TEST(TargetHamiltonian, BitphaseEquator) {
  ControlPoint p{pi / 2, 0.0, 0.0, 0.0, 1.5};
  Matrix h = build_h0(GateKind::bitphase, p).matrix;
  Matrix expect = Matrix::Zero(4, 4);
  expect(c1::a1, c1::zero) = expect(c1::zero, c1::a1) = 1.5;
  EXPECT_LE(max_abs(h - expect), 1e-15);
}

TEST(TargetHamiltonian, DecoupledStates) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_point(rng);
    Matrix hc = build_h0(GateKind::cp, p).matrix;
    for (auto k : {c2::l00, c2::l01, c2::l10}) EXPECT_EQ(hc.row(k).norm() + hc.col(k).norm(), 0.0);
    Matrix hz = build_h0(GateKind::phase, p).matrix;
    EXPECT_EQ(hz.row(c1::zero).norm(), 0.0);
  }
}

TEST(TargetHamiltonian, KindEncodingMismatch) {
  ControlPoint p{0.3, 0.2, 0.0, 0.0, 1.0};
  EXPECT_THROW(build_h0(GateKind::cp, p, DfsEncoding::c1()), layout_error);
  EXPECT_THROW(build_h0(GateKind::phase, p, DfsEncoding::c2()), layout_error);
}

TEST(TargetHamiltonian, PhaseSpectrum) {
  std::mt19937 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_point(rng);
    auto es = eig_hermitian(build_h0(GateKind::phase, p));
    ASSERT_EQ(es.size(), 3u);
    EXPECT_NEAR(es[0].value, -p.lambda_prime, 1e-12 * p.lambda_prime);
    EXPECT_NEAR(es[1].value, 0.0, 1e-12 * p.lambda_prime);
    EXPECT_EQ(es[1].multiplicity(), 2u);
    EXPECT_NEAR(es[2].value, p.lambda_prime, 1e-12 * p.lambda_prime);
  }
}

// ---------- dark states ----------
TEST(DarkStates, AnnihilatedAndOrthonormal) {
  std::mt19937 rng(33);
  for (auto kind : kinds) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto p = random_point(rng);
      const Matrix h = build_h0(kind, p).matrix;
      const auto ds = dark_states(kind, p);
      ASSERT_EQ(ds.size(), kind == GateKind::cp ? 4u : 2u);
      for (std::size_t i = 0; i < ds.size(); ++i) {
        EXPECT_LE((h * ds[i].amplitudes).norm(), 1e-12 * p.lambda_prime);
        EXPECT_NEAR(ds[i].amplitudes.dot(h * ds[i].amplitudes).real(), 0.0, 1e-12 * p.lambda_prime);
        for (std::size_t j = 0; j < ds.size(); ++j)
          EXPECT_NEAR(std::abs(ds[i].amplitudes.dot(ds[j].amplitudes)), i == j ? 1.0 : 0.0, 1e-12);
      }
    }
  }
}

TEST(DarkStates, SpanTheZeroEigenspace) {
  std::mt19937 rng(34);
  for (auto kind : kinds) {
    const auto p = random_point(rng);
    Matrix zero_proj;
    for (auto& e : eig_hermitian(build_h0(kind, p)))
      if (std::abs(e.value) < 1e-9) zero_proj = e.projector();
    EXPECT_LE(max_abs(zero_proj - dark_projector(kind, p)), 1e-10);
  }
}

TEST(DarkStates, Examples) {
  ControlPoint p{1.1, 2.2, 0.0, 0.0, 1.0};
  EXPECT_LE(max_abs(dark_states(GateKind::phase, p)[0].amplitudes - Ket::basis(c1_layout(), c1::zero).amplitudes),
            0.0);
  ControlPoint q{0.8, 0.0, 0.0, 0.0, 1.0};
  EXPECT_LE(max_abs(dark_states(GateKind::bitphase, q)[1].amplitudes - Ket::basis(c1_layout(), c1::one).amplitudes),
            0.0);
  ControlPoint r{0.0, 1.7, 0.0, 0.0, 1.0};
  EXPECT_LE(max_abs(dark_states(GateKind::cp, r)[3].amplitudes - Ket::basis(c2_layout(), c2::l11).amplitudes),
            0.0);
}

// ---------- schedules ----------
TEST(Schedule, PhaseTableBoundaries) {
  std::array<double, 3> d{1.0, 2.0, 1.5};
  auto s = make_schedule(GateKind::phase, pi / 2, d, Ramp::cosine, 1.0);
  ASSERT_EQ(s.segments().size(), 3u);
  const auto& g = s.segments();
  EXPECT_EQ(g[0].theta_start, 0.0);
  EXPECT_EQ(g[0].theta_end, pi);
  EXPECT_EQ(g[0].phi_start, 0.0);
  EXPECT_EQ(g[0].phi_end, 0.0);
  EXPECT_EQ(g[1].theta_start, pi);
  EXPECT_EQ(g[1].theta_end, pi);
  EXPECT_EQ(g[1].phi_end, pi / 2);
  EXPECT_EQ(g[2].theta_end, 0.0);
  EXPECT_EQ(g[2].phi_start, pi / 2);
  EXPECT_EQ(g[2].phi_end, pi / 2);
  EXPECT_DOUBLE_EQ(s.total_duration(), 4.5);
}

TEST(Schedule, BitphaseHasClosingLeg) {
  std::array<double, 4> d{1.0, 1.0, 1.0, 1.0};
  auto s = make_schedule(GateKind::bitphase, 0.7, d, Ramp::cosine, 1.0);
  ASSERT_EQ(s.segments().size(), 4u);
  EXPECT_EQ(s.segments()[0].theta_end, pi / 2);
  EXPECT_EQ(s.segments()[3].theta_start, 0.0);
  EXPECT_EQ(s.segments()[3].phi_start, 0.7);
  EXPECT_EQ(s.segments()[3].phi_end, 0.0);
}

TEST(Schedule, CosineRatesVanishAtKnots) {
  std::array<double, 4> d{0.3, 0.7, 1.1, 0.5};
  auto s = make_schedule(GateKind::bitphase, 1.3, d, Ramp::cosine, 1.0);
  for (double t : s.knots()) {
    auto p = s.at(t);
    EXPECT_NEAR(p.theta_dot, 0.0, 1e-12);
    EXPECT_NEAR(p.phi_dot, 0.0, 1e-12);
  }
}

TEST(Schedule, RatesMatchFiniteDifference) {
  std::array<double, 3> d{0.4, 0.9, 0.6};
  for (auto ramp : {Ramp::cosine, Ramp::linear}) {
    auto s = make_schedule(GateKind::phase, 2.0, d, ramp, 1.0);
    for (double t : {0.1, 0.55, 0.8, 1.5}) {
      const double h = 1e-6;
      auto p = s.at(t);
      EXPECT_NEAR(p.theta_dot, (s.at(t + h).theta - s.at(t - h).theta) / (2 * h), 1e-6);
      EXPECT_NEAR(p.phi_dot, (s.at(t + h).phi - s.at(t - h).phi) / (2 * h), 1e-6);
    }
  }
}

TEST(Schedule, Continuity) {
  std::array<double, 3> d{0.4, 0.9, 0.6};
  auto s = make_schedule(GateKind::cp, 2.0, d, Ramp::cosine, 1.0);
  for (double k : s.knots()) {
    EXPECT_NEAR(s.at(k - 1e-12).theta, s.at(k + 1e-12).theta, 1e-9);
    EXPECT_NEAR(s.at(k - 1e-12).phi, s.at(k + 1e-12).phi, 1e-9);
  }
}

TEST(Schedule, Errors) {
  std::array<double, 3> bad{1.0, 0.0, 1.0};
  EXPECT_THROW(make_schedule(GateKind::phase, 1.0, bad, Ramp::cosine, 1.0), usage_error);
  std::array<double, 2> few{1.0, 1.0};
  EXPECT_THROW(make_schedule(GateKind::phase, 1.0, few, Ramp::cosine, 1.0), usage_error);
  std::array<double, 3> ok{1.0, 1.0, 1.0};
  EXPECT_THROW(make_schedule(GateKind::phase, 0.0, ok, Ramp::cosine, 1.0), usage_error);
  EXPECT_THROW(PulseSchedule({{0, 1, 0, 0, 1.0}, {0.5, 0, 0, 0, 1.0}}, 1.0), usage_error);
}

// ---------- wilson loop ----------
TEST(Wilson, PhaseGateIsSolidAngle) {
  std::array<double, 3> d{1.0, 1.0, 1.0};
  for (double phi_c : {0.3, pi / 2, 2.5, 5.0}) {
    auto r = wilson_loop(GateKind::phase, make_schedule(GateKind::phase, phi_c, d, Ramp::cosine, 1.0), 2000);
    // Only the equatorial leg at theta = pi contributes: -int sin^2(pi/2) dphi.
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    expect(1, 1) = std::exp(-iu * phi_c);
    EXPECT_LE(max_abs(r.unitary.matrix - expect), 1e-10) << phi_c;
    EXPECT_NEAR(std::remainder(*r.berry_phase + phi_c, 2 * pi), 0.0, 1e-10);
  }
}

TEST(Wilson, ZeroLoopIsIdentity) {
  PulseSchedule s({{0.0, pi, 0.0, 0.0, 1.0}, {pi, 0.0, 0.0, 0.0, 1.0}}, 1.0);
  for (auto kind : {GateKind::phase, GateKind::cp, GateKind::bitphase}) {
    auto r = wilson_loop(kind, s, 200);
    EXPECT_LE(max_abs(r.unitary.matrix - Matrix::Identity(r.unitary.matrix.rows(), r.unitary.matrix.cols())),
              1e-9);
  }
}

TEST(Wilson, CpPhaseOnlyOnLastDarkState) {
  std::array<double, 3> d{0.5, 1.0, 0.5};
  const double phi_c = 1.2;
  auto r = wilson_loop(GateKind::cp, make_schedule(GateKind::cp, phi_c, d, Ramp::cosine, 1.0), 2000);
  Matrix expect = Matrix::Identity(4, 4);
  expect(3, 3) = std::exp(-iu * phi_c);
  EXPECT_LE(max_abs(r.unitary.matrix - expect), 1e-10);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(r.unitary.matrix(k, k), cplx(1.0));
}

TEST(Wilson, BitphaseClosedLoopRotation) {
  // Legs (i)-(iii) carry no connection; the closing leg at theta = 0 rotates
  // the {0, 1} frame by -phi_c, giving the real rotation by phi_c.
  std::array<double, 4> d{1.0, 1.0, 1.0, 1.0};
  for (double phi_c : {0.4, pi / 2, 2.0}) {
    auto r = wilson_loop(GateKind::bitphase, make_schedule(GateKind::bitphase, phi_c, d, Ramp::cosine, 1.0), 2000);
    Matrix expect(2, 2);
    expect << std::cos(phi_c), -std::sin(phi_c), std::sin(phi_c), std::cos(phi_c);
    EXPECT_LE(max_abs(r.unitary.matrix - expect), 1e-10) << phi_c;
    EXPECT_NEAR(*r.berry_phase, phi_c, 1e-10);
    EXPECT_LE(max_abs(r.unitary.matrix - ideal_gate(GateKind::bitphase, *r.berry_phase).matrix), 1e-9);
  }
}

TEST(Wilson, BitphaseOpenLoopRaises) {
  std::array<double, 3> d{1.0, 1.0, 1.0};
  EXPECT_THROW(wilson_loop(GateKind::bitphase, make_schedule(GateKind::bitphase, 1.0, d, Ramp::cosine, 1.0), 100),
               loop_closure_error);
}

TEST(Wilson, Unitary) {
  std::mt19937 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    // A generic closed path: theta out and back while phi wanders and returns.
    const double a = uniform(rng, 0.2, 3.0), b = uniform(rng, 0.2, 3.0);
    PulseSchedule s({{0.0, a, 0.0, b, 1.0}, {a, a, b, 0.3, 0.7}, {a, 0.0, 0.3, 0.0, 1.2}}, 1.0);
    for (auto kind : {GateKind::phase, GateKind::cp}) {
      auto u = wilson_loop(kind, s, 300).unitary.matrix;
      EXPECT_LE(max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())), 1e-9);
    }
  }
}

TEST(Wilson, FourthOrderConvergence) {
  // Phase path with theta and phi moving together, so the connection varies
  // inside every step.
  PulseSchedule s({{0.0, 2.0, 0.0, 1.5, 1.0}, {2.0, 0.0, 1.5, 0.0, 1.0, Ramp::linear}}, 1.0);
  auto u = [&](std::size_t n) { return wilson_loop(GateKind::phase, s, n).unitary.matrix; };
  const double e1 = max_abs(u(10) - u(20));
  const double e2 = max_abs(u(20) - u(40));
  EXPECT_GT(e1, 0.0);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LE(e2, 1.0 / (40.0 * 40.0));
}

TEST(Wilson, GenericPhasePathMatchesQuadrature) {
  // Independent oracle: Simpson quadrature of -sin^2(theta/2) dphi/dt.
  PulseSchedule s({{0.0, 2.0, 0.0, 1.5, 1.0}, {2.0, 0.0, 1.5, 0.0, 1.0}}, 1.0);
  const int n = 20000;
  const double tt = s.total_duration(), h = tt / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    auto p = s.at(std::min(k * h, tt - 1e-15));
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * -std::pow(std::sin(p.theta / 2), 2) * p.phi_dot;
  }
  acc *= h / 3.0;
  auto r = wilson_loop(GateKind::phase, s, 4000);
  EXPECT_NEAR(std::remainder(*r.berry_phase - acc, 2 * pi), 0.0, 1e-6);
}

// ---------- ideal gates ----------
TEST(IdealGate, Examples) {
  Matrix z(2, 2);
  z << 1, 0, 0, -1;
  EXPECT_LE(max_abs(ideal_gate(GateKind::phase, pi).matrix - z), 1e-15);
  Matrix y(2, 2);
  y << 0, -1, 1, 0;
  EXPECT_LE(max_abs(ideal_gate(GateKind::bitphase, pi / 2).matrix - y), 1e-15);
  Matrix cz = Matrix::Identity(4, 4);
  cz(3, 3) = -1;
  EXPECT_LE(max_abs(ideal_gate(GateKind::cp, pi).matrix - cz), 1e-15);
}

TEST(IdealGate, MatchesPadeExponential) {
  std::mt19937 rng(36);
  Matrix sy(2, 2);
  sy << 0, iu, -iu, 0;
  for (int trial = 0; trial < 10; ++trial) {
    const double a = uniform(rng, -4, 4);
    EXPECT_LE(max_abs(ideal_gate(GateKind::bitphase, a).matrix - Matrix(iu * a * sy).exp()), 1e-13);
  }
}
