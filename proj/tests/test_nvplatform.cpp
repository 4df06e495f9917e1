#include <gtest/gtest.h>

#include <random>

#include "hqc/nvplatform.hpp"
#include "hqc/units.hpp"
#include "support.hpp"

using namespace hqc;
using namespace hqc::units;

namespace {

NvParams reference_params() {
  NvParams p;
  p.Gamma0 = mhz(83.0);
  p.field_ratio = 1.0 / 6.0;
  p.nu = 471e12 * 1e-6;
  p.V_m = 100.0;
  p.Omega_L = mhz(500.0);
  p.Delta = ghz(20.0);
  return p;
}

NvDriveConfig drive(std::vector<double> deltas, double g, std::size_t cutoff = 2) {
  NvDriveConfig cfg;
  cfg.g = g;
  cfg.fock_cutoff = cutoff;
  for (double d : deltas) cfg.centers.push_back({true, d, 0.0});
  return cfg;
}

// Restriction of a register operator to the DFS basis of enc.
Matrix restrict_to(const Matrix& h, const DfsEncoding& enc) {
  Matrix r = Matrix::Zero(h.rows(), static_cast<Eigen::Index>(enc.dim()));
  for (std::size_t i = 0; i < enc.dim(); ++i)
    r(static_cast<Eigen::Index>(enc.physical_index.at(enc.labels[i])), static_cast<Eigen::Index>(i)) = 1.0;
  return r.adjoint() * h * r;
}

}  // namespace

// ---------- coupling strengths ----------
TEST(CouplingStrength, ReferenceParameters) {
  const double G = coupling_strength_G(reference_params());
  // Quoted as roughly 2pi x 1 GHz; the formula gives 2pi x 0.82 GHz.
  EXPECT_NEAR(to_mhz(G), 1000.0, 250.0);
  // Independent evaluation in SI units.
  const double c = 2.99792458e8, nu = 471e12, gamma = 83e6;
  const double va = 3 * c * c * c / (4 * pi * nu * nu * gamma);  // m^3
  const double vm = 100e-18;
  const double expect_mhz = gamma * (1.0 / 6.0) * std::sqrt(va / vm) * 1e-6;
  EXPECT_NEAR(to_mhz(G), expect_mhz, 1e-9 * expect_mhz);
}

TEST(CouplingStrength, Scaling) {
  auto p = reference_params();
  const double g0 = coupling_strength_G(p);
  p.V_m *= 4.0;
  EXPECT_NEAR(coupling_strength_G(p), 0.5 * g0, 1e-12 * g0);
  p.field_ratio = 0.0;
  EXPECT_EQ(coupling_strength_G(p), 0.0);
}

TEST(RamanCoupling, ReferenceValue) {
  const double g = raman_coupling_g(ghz(1.0), mhz(500.0), ghz(20.0), ghz(2.0));
  EXPECT_NEAR(to_mhz(g), 1000.0 * 500.0 * (1.0 / 22000.0 + 1.0 / 20000.0), 1e-9);
  EXPECT_NEAR(to_mhz(g), 47.727, 1e-3);
}

TEST(RamanCoupling, Limits) {
  EXPECT_DOUBLE_EQ(raman_coupling_g(3.0, 2.0, 50.0, 0.0), 2 * 3.0 * 2.0 / 50.0);
  EXPECT_EQ(raman_coupling_g(3.0, 0.0, 50.0, 1.0), 0.0);
  EXPECT_THROW(raman_coupling_g(3.0, 2.0, 0.0, 1.0), usage_error);
  EXPECT_THROW(raman_coupling_g(3.0, 2.0, 5.0, -5.0), usage_error);
  std::vector<std::string> w;
  raman_coupling_g(10.0, 1.0, 50.0, 0.0, &w);
  EXPECT_EQ(w.size(), 1u);
}

TEST(EffectiveRabi, Examples) {
  EXPECT_NEAR(to_mhz(effective_rabi(mhz(50), ghz(2), ghz(2))), 1.25, 1e-12);
  EXPECT_NEAR(to_mhz(effective_rabi(mhz(50), ghz(4), ghz(0.4))), 3.4375, 1e-12);
  EXPECT_NEAR(to_mhz(effective_rabi(mhz(50), ghz(7), ghz(0.7))), 1.9642857142857142, 1e-12);
  EXPECT_EQ(effective_rabi(mhz(50), ghz(3), -ghz(3)), 0.0);
  EXPECT_THROW(effective_rabi(1.0, 0.0, 1.0), usage_error);
}

// ---------- drive config ----------
TEST(DriveConfig, DispersiveGuard) {
  auto cfg = drive({ghz(0.4)}, mhz(50));
  EXPECT_THROW(cfg.validate(), guard_violation);
  try {
    cfg.validate();
  } catch (const guard_violation& e) {
    EXPECT_EQ(e.guard(), "dispersive");
  }
  cfg.dispersive_ratio = 8.0;
  EXPECT_NO_THROW(cfg.validate());
}

// ---------- interaction Hamiltonian ----------
TEST(Interaction, SingleCentreStructure) {
  for (std::size_t cutoff : {1u, 2u, 4u}) {
    auto cfg = drive({40.0}, 1.0, cutoff);
    Matrix h = build_interaction_hamiltonian(cfg, 0.0).matrix;
    int nonzero = 0;
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      for (Eigen::Index j = 0; j < h.cols(); ++j) nonzero += std::abs(h(i, j)) > 0.0;
    EXPECT_EQ(nonzero, static_cast<int>(2 * cutoff));
    // <1, p-1| H |0, p> = g sqrt(p)
    const auto f = static_cast<Eigen::Index>(cutoff + 1);
    for (Eigen::Index p = 1; p < f; ++p) EXPECT_NEAR(std::abs(h(f + p - 1, p) - std::sqrt(double(p))), 0.0, 1e-15);
  }
}

TEST(Interaction, ConservesExcitationNumber) {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    auto cfg = drive({hqc::test::uniform(rng, 20, 60), -hqc::test::uniform(rng, 20, 60), hqc::test::uniform(rng, 20, 60)},
                     hqc::test::uniform(rng, 0.5, 2.0), 3);
    for (auto& c : cfg.centers) c.phi = hqc::test::uniform(rng, 0, 2 * pi);
    Matrix h = build_interaction_hamiltonian(cfg, hqc::test::uniform(rng, 0, 5)).matrix;
    Matrix n = excitation_number(3, 3).matrix;
    EXPECT_LE(max_abs(h * n - n * h), 1e-12 * max_abs(h));
  }
}

TEST(Interaction, PhaseFactorAtQuarterPeriod) {
  const double d = 40.0;
  auto cfg = drive({d, d}, 1.0, 2);
  Matrix h = build_interaction_hamiltonian(cfg, pi / (2 * d)).matrix;
  // a s_1^+ : |00, 1> -> |10, 0>, a s_2^+ : |00, 1> -> |01, 0>; Fock dim 3.
  EXPECT_LE(std::abs(h(2 * 3 + 0, 1) - std::exp(-iu * pi / 2.0)), 1e-14);
  EXPECT_LE(std::abs(h(1 * 3 + 0, 1) - std::exp(-iu * pi / 2.0)), 1e-14);
}

// ---------- effective Hamiltonian ----------
TEST(Effective, SinglePair) {
  PairCouplingProgram prog;
  prog.n_centers = 2;
  prog.set(1, 2, 0.7);
  auto cfg = drive({40.0, 40.0}, 1.0);
  Matrix h = build_effective_hamiltonian(prog, cfg).matrix;
  std::vector<Op> mp{sigma_minus("a"), sigma_plus("b")}, pm{sigma_plus("a"), sigma_minus("b")};
  Matrix expect = 0.7 * (tensor_product(mp).matrix + tensor_product(pm).matrix);
  EXPECT_LE(max_abs(h - expect), 1e-15);
}

TEST(Effective, StarkShiftEqualDetunings) {
  PairCouplingProgram prog;
  prog.n_centers = 2;
  prog.set(1, 2, 0.7);
  auto cfg = drive({40.0, 40.0}, 2.0);
  Matrix base = build_effective_hamiltonian(prog, cfg).matrix;
  cfg.include_stark = true;
  Matrix with = build_effective_hamiltonian(prog, cfg).matrix;
  Matrix diff = Matrix::Zero(4, 4);
  diff.diagonal() << 0.0, 0.1, 0.1, 0.2;  // (g^2/delta) times the excitation count
  EXPECT_LE(max_abs(with - base - diff), 1e-15);
}

TEST(Effective, ConservesExcitations) {
  std::mt19937 rng(42);
  PairCouplingProgram prog;
  prog.n_centers = 4;
  for (std::size_t j = 1; j <= 4; ++j)
    for (std::size_t k = j + 1; k <= 4; ++k) prog.set(j, k, hqc::test::uniform(rng, -1, 1), hqc::test::uniform(rng, 0, 6));
  Matrix h = build_effective_hamiltonian(prog, drive({50, 60, 70, 80}, 1.0)).matrix;
  Matrix n = Matrix::Zero(16, 16);
  for (int b = 0; b < 16; ++b) n(b, b) = std::popcount(static_cast<unsigned>(b));
  EXPECT_LE(max_abs(h * n - n * h), 1e-12);
}

TEST(Effective, AsymmetricProgramRejected) {
  PairCouplingProgram prog;
  prog.n_centers = 2;
  prog.set(1, 2, 0.7, 0.3);
  prog.set(2, 1, 0.7, 0.3);
  EXPECT_THROW(build_effective_hamiltonian(prog, drive({40, 40}, 1.0)), layout_error);
  prog.set(2, 1, 0.7, -0.3);
  EXPECT_NO_THROW(build_effective_hamiltonian(prog, drive({40, 40}, 1.0)));
}

TEST(Effective, BitphaseStepOneOnC1) {
  // Step (i): phi = 0, so a1 couples to 0L with lambda sin(theta) and to a2
  // with lambda cos(theta). a1 = qubit 1, 0L = qubit 4, a2 = qubit 2.
  const double lam = 1.3, theta = 0.6;
  PairCouplingProgram prog;
  prog.n_centers = 4;
  prog.set(4, 1, lam * std::sin(theta));
  prog.set(2, 1, lam * std::cos(theta));
  Matrix h = build_effective_hamiltonian(prog, drive({50, 50, 50, 50}, 1.0)).matrix;
  ControlPoint p{theta, 0.0, 0.0, 0.0, lam};
  EXPECT_LE(max_abs(restrict_to(h, DfsEncoding::c1()) - build_h0(GateKind::bitphase, p).matrix), 1e-15);
}

TEST(DfsProgram, RoundTripOnC1) {
  std::mt19937 rng(43);
  auto enc = DfsEncoding::c1();
  for (int trial = 0; trial < 20; ++trial) {
    Matrix m = hqc::test::random_hermitian(4, rng);
    auto prog = program_from_dfs_operator(m, enc);
    Matrix h = build_effective_hamiltonian(prog, drive({50, 50, 50, 50}, 1.0)).matrix;
    EXPECT_LE(max_abs(restrict_to(h, enc) - m), 1e-14);
  }
}

TEST(DfsProgram, CpTermsOnC2) {
  auto enc = DfsEncoding::c2();
  ControlPoint p{1.1, 0.4, 0.3, -0.8, 2.0};
  Matrix m = build_h0(GateKind::cp, p).matrix + cd_cp_closed_form(p).matrix.matrix;
  auto prog = program_from_dfs_operator(m, enc);
  NvDriveConfig cfg = drive(std::vector<double>(8, 50.0), 1.0);
  Matrix h = build_effective_hamiltonian(prog, cfg).matrix;
  EXPECT_LE(max_abs(restrict_to(h, enc) - m), 1e-14);
  EXPECT_EQ(prog.canonical().size(), 3u);
}

TEST(DfsProgram, MultiHopRejected) {
  auto enc = DfsEncoding::c2();
  Matrix m = Matrix::Zero(6, 6);
  m(c2::l00, c2::l11) = m(c2::l11, c2::l00) = 1.0;
  EXPECT_THROW(program_from_dfs_operator(m, enc), layout_error);
  EXPECT_EQ(dfs_hop(enc, c2::l00, c2::l11).kind, DfsHop::Kind::multi);
  auto hop = dfs_hop(enc, c2::a3, c2::l11);
  EXPECT_EQ(hop.kind, DfsHop::Kind::hop);
  EXPECT_EQ(hop.src, 1u);
  EXPECT_EQ(hop.dst, 3u);
}

// ---------- laser-program solver ----------
TEST(LaserProgram, SinglePairSymmetric) {
  const double g = mhz(50), lam = mhz(1.25);
  PairCouplingProgram t;
  t.n_centers = 2;
  t.set(1, 2, lam);
  auto r = solve_laser_program(t, g);
  ASSERT_TRUE(r.feasible);
  EXPECT_NEAR(r.config.centers[0].delta, g * g / lam, 1e-9 * g * g / lam);
  EXPECT_NEAR(r.config.centers[1].delta, g * g / lam, 1e-9 * g * g / lam);
}

TEST(LaserProgram, ThreeCentresUnique) {
  const double g = mhz(50);
  PairCouplingProgram t;
  t.n_centers = 3;
  t.set(1, 2, mhz(2.0));
  t.set(1, 3, mhz(1.5));
  t.set(2, 3, mhz(1.0));
  auto r = solve_laser_program(t, g);
  ASSERT_TRUE(r.feasible) << (r.issues.empty() ? "" : r.issues.front().message);
  // Hand solution: x1 + x2 = 2a, x1 + x3 = 1.5a, x2 + x3 = a with a = 2/g^2 * 2pi.
  const double a = 2.0 * mhz(1.0) / (g * g);
  const double x1 = 1.25 * a, x2 = 0.75 * a, x3 = 0.25 * a;
  EXPECT_NEAR(1.0 / r.config.centers[0].delta, x1, 1e-12 * x1);
  EXPECT_NEAR(1.0 / r.config.centers[1].delta, x2, 1e-12 * x1);
  EXPECT_NEAR(1.0 / r.config.centers[2].delta, x3, 1e-12 * x1);
}

TEST(LaserProgram, RoundTrip) {
  std::mt19937 rng(44);
  const double g = mhz(50);
  for (int trial = 0; trial < 50; ++trial) {
    // Targets generated from detunings, so the system is solvable.
    std::vector<double> x(4);
    for (auto& v : x) v = 1.0 / ghz(hqc::test::uniform(rng, 0.6, 6.0));
    PairCouplingProgram t;
    t.n_centers = 4;
    for (std::size_t j = 1; j <= 4; ++j)
      for (std::size_t k = j + 1; k <= 4; ++k) t.set(j, k, 0.5 * g * g * (x[j - 1] + x[k - 1]));
    auto r = solve_laser_program(t, g);
    ASSERT_TRUE(r.feasible);
    EXPECT_LE(r.residual, 1e-10 * mhz(1.0));
    for (const auto& [key, c] : t.canonical()) {
      const double got = effective_rabi(g, r.config.centers[key.first - 1].delta, r.config.centers[key.second - 1].delta);
      EXPECT_LE(std::abs(got - c.lambda), 1e-10 * std::abs(c.lambda) + r.residual);
    }
  }
}

TEST(LaserProgram, InactiveCentreLaserOff) {
  PairCouplingProgram t;
  t.n_centers = 4;
  t.set(1, 2, mhz(1.0));
  auto r = solve_laser_program(t, mhz(50));
  ASSERT_TRUE(r.feasible);
  EXPECT_FALSE(r.config.centers[2].laser_on);
  EXPECT_FALSE(r.config.centers[3].laser_on);
}

TEST(LaserProgram, BitphaseStepOnePhasesInfeasible) {
  PairCouplingProgram t;
  t.n_centers = 4;
  t.set(1, 4, mhz(1.0), 0.0);
  t.set(1, 2, mhz(1.0), 0.0);
  t.set(2, 4, mhz(0.5), pi / 2);
  auto r = solve_laser_program(t, mhz(50));
  EXPECT_FALSE(r.feasible);
  bool phase_issue = false;
  for (const auto& i : r.issues) phase_issue |= i.kind == LaserProgramIssue::Kind::phase_inconsistent;
  EXPECT_TRUE(phase_issue);
}

TEST(LaserProgram, InconsistentAmplitudes) {
  // A star: the zero legs among 2, 3, 4 force x2 = x3 = x4 = 0, i.e. lasers
  // on with infinite detuning.
  PairCouplingProgram t;
  t.n_centers = 4;
  t.set(1, 2, mhz(1.0));
  t.set(1, 3, mhz(1.0));
  t.set(1, 4, mhz(1.0));
  auto r = solve_laser_program(t, mhz(50));
  EXPECT_FALSE(r.feasible);
  ASSERT_FALSE(r.issues.empty());
  EXPECT_EQ(r.issues.front().kind, LaserProgramIssue::Kind::singular);
}

TEST(LaserProgram, GuardViolation) {
  PairCouplingProgram t;
  t.n_centers = 2;
  t.set(1, 2, mhz(10.0));  // needs delta = 250 MHz = 5 g
  auto r = solve_laser_program(t, mhz(50));
  EXPECT_FALSE(r.feasible);
  ASSERT_FALSE(r.issues.empty());
  EXPECT_EQ(r.issues.front().kind, LaserProgramIssue::Kind::guard_violation);
}
