#include <qplab/dynamics.hpp>

#include <gtest/gtest.h>

using namespace qplab;

namespace {

const PotentialSpec& desk() {
  static const PotentialSpec spec = cosine_potential(sample_frequencies(22, 2, 3));
  return spec;
}

Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

// Grid with k_nyquist = 18, wide enough for short runs of a packet at |k| = 12.
SpatialGrid packet_grid() { return SpatialGrid::with_nyquist(2, 256, 18.0); }

MomentumTransportSettings light_settings() {
  MomentumTransportSettings s;
  s.M = 1;
  s.radius = 3.5;
  s.step = 0.1;
  s.delta = 0.3;
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(SecondMoment, GaussianWidthAndTranslation) {
  const SpatialGrid g(2, 128, 30.0);
  const GaussianProfile F(vec2(0.5, 0.0), 0.7);
  const auto f = sample(F, g);
  const double mass = F.norm2();
  EXPECT_LT(rel(second_moment(f), 2.0 / (4 * 0.49) * mass), 1e-6);

  const GaussianProfile shifted(vec2(0.5, 0.0), 0.7, 1.0, vec2(2.0, -1.0));
  EXPECT_LT(rel(second_moment(sample(shifted, g)), second_moment(f) + 5.0 * mass), 1e-6);

  FieldState point(g);
  point.values[(g.N / 2) * g.N + g.N / 2] = 1.0;
  EXPECT_NEAR(second_moment(point), 0.0, 1e-15);
}

TEST(Averages, ConstantAndQuadraticSeries) {
  MomentSeries c, q;
  for (int i = 0; i <= 40000; ++i) {
    const double t = 0.005 * i;
    c.t.push_back(t);
    c.m2.push_back(3.0);
    q.t.push_back(t);
    q.m2.push_back(4.0 * t * t);
  }
  for (double T : {5.0, 10.0, 40.0}) {
    EXPECT_NEAR(abel_mean(c, T), 3.0, 1e-6);
    EXPECT_NEAR(cesaro_mean(c, T), 3.0, 1e-12);
    EXPECT_LT(rel(abel_mean(q, T), 2.0 * T * T), 1e-5);
    EXPECT_LT(rel(cesaro_mean(q, T), 4.0 * T * T / 3.0), 1e-6);
  }
  EXPECT_THROW(abel_mean(q, 41.0), PreconditionError);
}

TEST(Averages, AbelIsLinearAndMonotone) {
  MomentSeries a, b, sum;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.1 * i;
    a.t.push_back(t);
    b.t.push_back(t);
    sum.t.push_back(t);
    a.m2.push_back(1 + std::sin(t) * std::sin(t));
    b.m2.push_back(t * t + 2);
    sum.m2.push_back(a.m2.back() + b.m2.back());
  }
  const BallisticEnvelope env{1.0, 4.0};
  EXPECT_NEAR(abel_mean(sum, 20, env), abel_mean(a, 20, env) + abel_mean(b, 20, BallisticEnvelope{}), 1e-9);
  EXPECT_LT(abel_mean(a, 20), abel_mean(sum, 20));
}

TEST(Averages, BetaFits) {
  const auto T = geometric_grid(5, 40);
  ASSERT_EQ(T.size(), 7u);
  EXPECT_NEAR(T.back(), 40.0, 1e-12);
  std::vector<double> sq, lin, cst;
  for (double t : T) {
    sq.push_back(t * t);
    lin.push_back(t);
    cst.push_back(7.0);
  }
  EXPECT_NEAR(fit_beta(T, sq).beta, 1.0, 1e-12);
  EXPECT_NEAR(fit_beta(T, lin).beta, 0.5, 1e-12);
  EXPECT_NEAR(fit_beta(T, cst).beta, 0.0, 1e-12);
  EXPECT_NEAR(fit_beta(T, sq).stderr_, 0.0, 1e-12);
  for (double b : beta_running(T, lin)) EXPECT_NEAR(b, 0.5, 1e-12);
}

TEST(Averages, BallisticVerdicts) {
  MomentSeries s;
  for (int i = 0; i <= 4000; ++i) {
    s.t.push_back(0.05 * i);
    s.m2.push_back(1.0);
  }
  const auto T = geometric_grid(5, 40);
  std::vector<double> abel;
  for (double t : T) abel.push_back(abel_mean(s, t));
  const auto flat = ballistic_check(s, T, abel, 5, 40, 1e-3);
  EXPECT_FALSE(flat.ballistic);
  EXPECT_NEAR(flat.c1, 1.0 / 1600, 1e-9);

  MomentSeries q = s;
  for (std::size_t i = 0; i < q.t.size(); ++i) q.m2[i] = 1.0 + 576.0 * q.t[i] * q.t[i];
  abel.clear();
  for (double t : T) abel.push_back(abel_mean(q, t));
  const auto fast = ballistic_check(q, T, abel, 5, 40, 1e-3 * 576 / 4);
  EXPECT_TRUE(fast.ballistic);
  EXPECT_NEAR(fast.C1, 576.0, 1e-9);
  EXPECT_NEAR(fast.C2, 1.0, 1e-12);
  EXPECT_GT(fast.c1, 288.0);
}

TEST(EigenEvolution, FreePacketMatchesClosedForm) {
  const auto g = packet_grid();
  WavePacketSpec ps;
  ps.profile = GaussianProfile(vec2(12, 0), 0.5);
  ps.coupling = 0.0;
  ps.radius = 4.0;
  const auto basis = build_packet_basis(ps, desk(), g);
  EXPECT_LT(basis.outside_fraction, 1e-10);
  EXPECT_DOUBLE_EQ(basis.accepted_fraction, 1.0);

  for (double t : {0.0, 0.3}) {
    const auto psi = evolve_eigen(basis, ps.profile, g, t);
    FieldState exact(g);
    for (std::size_t i = 0; i < g.size(); ++i) exact.values[i] = ps.profile.free_evolved(g.point(i), t);
    EXPECT_LT(l2_distance(psi, exact) / exact.norm(), 1e-6) << "t = " << t;
    EXPECT_NEAR(psi.norm() * psi.norm() / ps.profile.norm2(), 1.0, 1e-10);
  }
}

TEST(EigenEvolution, CoupledPacketStaysCloseToFreeOne) {
  const auto g = packet_grid();
  WavePacketSpec ps;
  ps.profile = GaussianProfile(vec2(12, 0), 0.5);
  ps.radius = 3.5;
  ps.M = 1;
  const auto basis = build_packet_basis(ps, desk(), g);
  const auto psi0 = build_initial(basis, ps.profile, g);
  EXPECT_GT(psi0.norm(), 0.0);

  double ubound = 0;
  for (const auto& c : basis.region.cells) {
    double s = 0;
    for (std::size_t n = 0; n < basis.region.sites.size(); ++n)
      if (sup_norm(basis.region.sites[n]) != 0) s += std::abs(c.v(n));
    ubound = std::max(ubound, s);
  }
  const auto free_psi = sample(ps.profile, g);
  EXPECT_LE(l2_distance(psi0, free_psi) / psi0.norm(), ubound + 1e-3);

  // Coefficient mass is exactly invariant; the grid norm up to the non-orthogonality
  // of the truncated eigenfunctions.
  const auto psi1 = evolve_eigen(basis, ps.profile, g, 0.4);
  EXPECT_NEAR(psi1.norm() / psi0.norm(), 1.0, 1e-3);
  EXPECT_GT(coefficient_mass(basis, ps.profile), 0.0);
  EXPECT_LT(l2_distance(evolve_eigen(basis, ps.profile, g, 0.0), psi0), 1e-14 * psi0.norm());

  GaussianProfile zero(vec2(12, 0), 0.5, 0.0);
  EXPECT_EQ(build_initial(basis, zero, g).norm(), 0.0);
}

TEST(SplitStep, FreeEvolutionIsExact) {
  const SpatialGrid g(2, 192, 60.0);
  const GaussianProfile F(vec2(1.0, 0.5), 0.5);
  const auto psi = evolve_splitstep(sample(F, g), desk(), 0.0, 0.002, 1000);
  FieldState exact(g);
  for (std::size_t i = 0; i < g.size(); ++i) exact.values[i] = F.free_evolved(g.point(i), 2.0);
  EXPECT_NEAR(psi.time, 2.0, 1e-12);
  EXPECT_LT(l2_distance(psi, exact) / exact.norm(), 1e-8);
}

TEST(SplitStep, UnitaryAndSecondOrder) {
  const SpatialGrid g(2, 32, 20.0);
  const GaussianProfile F(vec2(1.0, 0.0), 0.6);
  const auto psi0 = sample(F, g);
  const double coupling = 2.0;
  const double T = 0.4;
  auto run = [&](double dt) { return evolve_splitstep(psi0, desk(), coupling, dt, std::lround(T / dt)); };
  const auto a = run(0.004), b = run(0.002), c = run(0.001), ref = run(0.0005);
  EXPECT_NEAR(ref.norm() / psi0.norm(), 1.0, 1e-12);
  // Successive differences shrink by 2^order.
  EXPECT_NEAR(std::log2(l2_distance(a, b) / l2_distance(b, c)), 2.0, 0.3);
  EXPECT_NEAR(std::log2(l2_distance(b, c) / l2_distance(c, ref)), 2.0, 0.3);
  EXPECT_LT(std::abs(energy(ref, desk(), coupling) / energy(psi0, desk(), coupling) - 1), 1e-6);
}

TEST(SplitStep, NormDriftOverThousandSteps) {
  const SpatialGrid g(2, 32, 20.0);
  const auto psi0 = sample(GaussianProfile(vec2(1.0, 1.0), 0.6), g);
  const auto psi = evolve_splitstep(psi0, desk(), 0.5, 0.004, 1000);
  EXPECT_NEAR(psi.norm() / psi0.norm(), 1.0, 1e-10);
}

TEST(SplitStep, Guards) {
  const SpatialGrid g(2, 64, 20.0);  // k_nyquist ~ 10
  const auto psi0 = sample(GaussianProfile(vec2(1.0, 0.0), 0.6), g);
  EXPECT_THROW(evolve_splitstep(psi0, desk(), 0.0, 0.01, 1), NumericalGuard);
  EXPECT_THROW(evolve_splitstep(psi0, desk(), 100.0, 0.002, 1), NumericalGuard);
}

TEST(MomentumTransport, FreeGaussianClosedForm) {
  const GaussianProfile F(vec2(12, 0), 0.5);
  const MomentumTransport mt(F, desk(), 0.0, light_settings());
  const double mass = F.norm2();
  auto exact = [&](double t) { return mass * (2.0 / (4 * 0.25) + 4 * t * t * (144 + 2 * 0.25)); };
  EXPECT_LT(rel(mt.norm2(), mass), 1e-8);
  for (double t : {0.0, 1.0, 10.0, 100.0}) EXPECT_LT(rel(mt.m2(t), exact(t)), 1e-8) << t;
  EXPECT_EQ(mt.cross_pair_count(), 0u);
  EXPECT_NEAR(mt.grad_norm_at_centre(), 24.0, 1e-12);
  // abel of a + c t^2 is a + c T^2 / 2
  EXPECT_LT(rel(mt.abel_exact(10.0), exact(0) + (exact(1) - exact(0)) * 50.0), 1e-10);
  EXPECT_EQ(mt.remainder_ratio(100.0), 0.0);
}

TEST(MomentumTransport, SeriesAndClosedFormAbelAgree) {
  const GaussianProfile F(vec2(12, 0), 0.5);
  const MomentumTransport mt(F, desk(), 0.05, light_settings());
  EXPECT_GT(mt.cross_pair_count(), 0u);
  const auto s = mt.series(0.02, 5001);
  for (std::size_t i : {0u, 17u, 4000u}) EXPECT_LT(rel(s.m2[i], mt.m2(s.t[i])), 1e-10);
  for (double T : {5.0, 10.0, 20.0}) EXPECT_LT(rel(abel_mean(s, T), mt.abel_exact(T)), 1e-5) << T;
}

TEST(MomentumTransport, MatchesRealSpaceSecondMoment) {
  // A direction whose momentum ball holds no rejected cell: inside narrow
  // avoided crossings neither quadrature resolves grad v.
  const double a = 15.0 * kPi / 180;
  const GaussianProfile F(14.0 * vec2(std::cos(a), std::sin(a)), 0.5);
  const MomentumTransport mt(F, desk(), 0.05, light_settings());
  ASSERT_EQ(mt.accepted_fraction(), 1.0);
  const auto g = SpatialGrid::with_nyquist(2, 256, 21.0);
  WavePacketSpec ps;
  ps.profile = F;
  ps.radius = 3.5;
  ps.M = 1;
  ps.delta = 0.4;
  const auto basis = build_packet_basis(ps, desk(), g);
  for (double t : {0.0, 0.3}) {
    const auto psi = evolve_eigen(basis, F, g, t);
    EXPECT_LT(rel(mt.m2(t), second_moment(psi)), 2e-3) << t;
    EXPECT_LT(rel(mt.norm2(), std::pow(psi.norm(), 2)), 2e-3);
  }
}

TEST(MomentumTransport, RemainderRatioWithResonantHoles) {
  // Near the small-divisor band of omega_3 a sizeable part of the ball is rejected.
  const double a = 127.5 * kPi / 180;
  const GaussianProfile F(12.0 * vec2(std::cos(a), std::sin(a)), 0.5);
  auto set = light_settings();
  set.radius = 2.5;
  set.delta = 0.4;
  const MomentumTransport wide(F, desk(), 0.05, set);
  ASSERT_LT(wide.accepted_fraction(), 0.95);
  ASSERT_GT(wide.accepted_fraction(), 0.2);
  set.delta = 0.2;
  const MomentumTransport narrow(F, desk(), 0.05, set);

  double gmax = 30.0;  // |grad lambda| <= 2 (|k| + radius) + small
  const double r_wide = wide.remainder_ratio(4 * gmax);
  const double r_narrow = narrow.remainder_ratio(4 * gmax);
  EXPECT_GT(r_wide, 0.0);
  EXPECT_LE(r_narrow, 1.05 * r_wide);
  EXPECT_LT(std::abs(wide.remainder_ratio(8 * gmax) / r_wide - 1), 0.1);
}
