#include <qplab/lattice_operator.hpp>

#include <gtest/gtest.h>

#include <random>

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

TruncatedOperator raw(const CMat& H) {
  TruncatedOperator op;
  op.H = H;
  op.sites.resize(H.rows());
  return op;
}

// Second-order Rayleigh-Schrodinger value from the coupling stencil alone.
double pt2(const Vec& k, const PotentialSpec& spec, double eps) {
  double lam = k.squaredNorm();
  for (const auto& [n, v] : spec.coeffs())
    lam += std::norm(eps * v) / (k.squaredNorm() - (k + frequency_of(n, spec.freq())).squaredNorm());
  return lam;
}

}  // namespace

TEST(BuildOperator, FreeCaseIsDiagonal) {
  const auto op = build_operator(vec2(5, 0), 1, desk(), 0.0);
  ASSERT_EQ(op.dim(), 27u);
  EXPECT_EQ((op.H - CMat(op.H.diagonal().asDiagonal())).norm(), 0.0);
  EXPECT_EQ(op.H(op.origin(), op.origin()), cplx(25.0));
  for (std::size_t i = 0; i < op.dim(); ++i)
    EXPECT_DOUBLE_EQ(op.H(i, i).real(), (vec2(5, 0) + frequency_of(op.sites[i], desk().freq())).squaredNorm());
}

TEST(BuildOperator, BandwidthAndHermiticity) {
  const auto op = build_operator(vec2(7, 3), 2, desk(), 0.3);
  ASSERT_EQ(op.dim(), 125u);
  EXPECT_EQ((op.H - op.H.adjoint()).cwiseAbs().maxCoeff(), 0.0);
  for (std::size_t i = 0; i < op.dim(); ++i) {
    EXPECT_GE(op.H(i, i).real(), 0.0);
    EXPECT_EQ(op.H(i, i).imag(), 0.0);
    for (std::size_t j = 0; j < op.dim(); ++j) {
      if (sup_norm(op.sites[i] - op.sites[j]) > 1) {
        EXPECT_EQ(op.H(i, j), cplx(0.0));
      }
    }
  }
}

TEST(BuildOperator, LexicographicOrdering) {
  const auto op = build_operator(vec2(3, 3), 1, desk(), 0.1);
  for (std::size_t i = 1; i < op.dim(); ++i) EXPECT_LT(op.sites[i - 1], op.sites[i]);
  EXPECT_EQ(op.sites[op.origin()], (LatticeIndex{0, 0, 0}));
}

TEST(BuildOperator, RejectsTruncationBelowQ) {
  const PotentialSpec spec(desk().freq(), 2, {{{2, 0, 0}, cplx(1.0)}});
  EXPECT_THROW(build_operator(vec2(5, 0), 1, spec, 0.1), PreconditionError);
}

TEST(Spectrum, DiagonalSorted) {
  CMat H = CMat::Zero(4, 4);
  H.diagonal() << 3.0, -1.0, 7.0, 2.0;
  const Vec ev = spectrum(raw(H));
  EXPECT_DOUBLE_EQ(ev(0), -1.0);
  EXPECT_DOUBLE_EQ(ev(1), 2.0);
  EXPECT_DOUBLE_EQ(ev(2), 3.0);
  EXPECT_DOUBLE_EQ(ev(3), 7.0);
}

TEST(Spectrum, TwoByTwoClosedForm) {
  const double a = 1.3, c = -0.4;
  const cplx b(0.7, -0.2);
  CMat H(2, 2);
  H << a, b, std::conj(b), c;
  const Vec ev = spectrum(raw(H));
  const double r = std::sqrt(std::pow((a - c) / 2, 2) + std::norm(b));
  EXPECT_NEAR(ev(0), (a + c) / 2 - r, 1e-14);
  EXPECT_NEAR(ev(1), (a + c) / 2 + r, 1e-14);
}

TEST(Spectrum, TraceAndUnitarity) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> nd;
  CMat X = CMat::NullaryExpr(50, 50, [&] { return cplx(nd(gen), nd(gen)); });
  const CMat H = (X + X.adjoint()) / 2.0;
  const auto ed = full_eigen(raw(H));
  const double tr = H.trace().real();
  EXPECT_NEAR(ed.values.sum(), tr, 1e-9 * std::max(1.0, std::abs(tr)));
  EXPECT_LT((ed.vectors.adjoint() * ed.vectors - CMat::Identity(50, 50)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Spectrum, DimensionCap) {
  const auto op = build_operator(vec2(5, 0), 2, desk(), 0.1);
  EXPECT_THROW(spectrum(op, 100), PreconditionError);
}

TEST(ExtractPair, FreeCase) {
  const auto r = extract_pair(build_operator(vec2(9, 4), 2, desk(), 0.0), 0.0);
  ASSERT_TRUE(r.accepted());
  EXPECT_DOUBLE_EQ(r.pair.lambda, 97.0);
  EXPECT_DOUBLE_EQ(r.pair.dominance, 1.0);
  for (std::size_t i = 0; i < r.pair.sites.size(); ++i)
    EXPECT_EQ(r.pair.v(i), cplx(sup_norm(r.pair.sites[i]) == 0 ? 1.0 : 0.0));
}

TEST(ExtractPair, SecondOrderOracle) {
  const Vec k = vec2(12, 0);
  const double eps = 0.05;
  const auto op = build_operator(k, 3, desk(), eps);
  const auto r = extract_pair(op, 0.1 / k.norm());
  ASSERT_TRUE(r.accepted());
  EXPECT_EQ(r.pair.v(op.origin()), cplx(1.0));
  EXPECT_GT(r.pair.dominance, 0.5);
  // Dense cross-check of the windowed route.
  const Vec ev = spectrum(op);
  EXPECT_LT((ev.array() - r.pair.lambda).abs().minCoeff(), 1e-10);
  // Second-order bound and agreement with the perturbative value.
  double bound = 0, mindiv = std::numeric_limits<double>::infinity();
  for (const auto& [n, v] : desk().coeffs()) {
    bound += std::norm(eps * v);
    mindiv = std::min(mindiv, std::abs((k + frequency_of(n, desk().freq())).squaredNorm() - k.squaredNorm()));
  }
  EXPECT_LE(std::abs(r.pair.lambda - 144.0), bound / mindiv + 1e-6);
  EXPECT_LT(std::abs(r.pair.lambda - pt2(k, desk(), eps)), 1e-3 * std::abs(r.pair.lambda - 144.0));
}

TEST(ExtractPair, ResidualInvariant) {
  const auto op = build_operator(vec2(-6, 9), 3, desk(), 0.05);
  const auto r = extract_pair(op, 0.0);
  EXPECT_LT((op.H * r.pair.v - r.pair.lambda * r.pair.v).norm() / r.pair.v.norm(), 1e-8);
}

TEST(ExtractPair, ResonantMomentumIsRejected) {
  // k on the bisector plane of -omega_1 has |k + omega_1|^2 = |k|^2; scan along
  // the normal for the least dominant point.
  const auto& f = desk().freq();
  const Vec w = f.omega(0);
  const Vec wh = w.normalized();
  const Vec perp = vec2(-wh(1), wh(0));
  const Vec base = 11.0 * perp - 0.5 * w.norm() * wh;
  const double eps = 0.05;
  auto dom = [&](double s) {
    return extract_pair(build_operator(base + s * wh, 2, desk(), eps), 0.0).pair.dominance;
  };
  double a = -0.05, b = 0.05;
  const double g = (std::sqrt(5.0) - 1) / 2;
  for (int it = 0; it < 60; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    (dom(c) < dom(d) ? b : a) = (dom(c) < dom(d) ? d : c);
  }
  const Vec k = base + 0.5 * (a + b) * wh;
  const auto op = build_operator(k, 2, desk(), eps);
  const auto r = extract_pair(op, 0.1 / k.norm());
  EXPECT_FALSE(r.accepted());
  EXPECT_TRUE(r.reason == Rejection::DominanceFailure || r.reason == Rejection::GapTooSmall);
  // The two near-degenerate eigenvectors share the weight of n = 0 and n = e_1.
  const auto ed = full_eigen(op);
  const long i0 = op.origin(), i1 = op.window.index({1, 0, 0});
  Eigen::Index top = 0;
  ed.vectors.row(i0).cwiseAbs2().maxCoeff(&top);
  EXPECT_NEAR(std::norm(ed.vectors(i0, top)), std::norm(ed.vectors(i1, top)), 0.1);
}

TEST(Eigenfunction, FreeCaseIsPlaneWave) {
  const Vec k = vec2(3, -2);
  const auto r = extract_pair(build_operator(k, 2, desk(), 0.0), 0.0);
  const Vec x = vec2(0.7, 1.9);
  EXPECT_LT(std::abs(eigenfunction_value(r.pair, desk().freq(), x) - std::exp(cplx(0, k.dot(x)))), 1e-14);
  EXPECT_EQ(u_sup_bound(r.pair), 0.0);
}

TEST(Eigenfunction, OriginValueAndSupBound) {
  const Vec k = vec2(12, 0);
  const auto r = extract_pair(build_operator(k, 3, desk(), 0.05), 0.0);
  EXPECT_NEAR(std::abs(eigenfunction_value(r.pair, desk().freq(), Vec::Zero(2))), std::abs(r.pair.v.sum()), 1e-14);
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-100, 100);
  const double bound = u_sup_bound(r.pair);
  for (int i = 0; i < 100; ++i) {
    const Vec x = vec2(u(gen), u(gen));
    const cplx uval = eigenfunction_value(r.pair, desk().freq(), x) * std::exp(cplx(0, -k.dot(x))) - 1.0;
    EXPECT_LE(std::abs(uval), bound + 1e-14);
  }
}

TEST(Eigenfunction, PhysicalSpaceResidual) {
  const Vec k = vec2(12, 0);
  const double eps = 0.05;
  const auto r = extract_pair(build_operator(k, 3, desk(), eps), 0.0);
  const double h = 0.02;
  const double c[] = {1.0 / 90, -3.0 / 20, 1.5, -49.0 / 18, 1.5, -3.0 / 20, 1.0 / 90};
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int trial = 0; trial < 10; ++trial) {
    const Vec x = vec2(u(gen), u(gen));
    cplx lap = 0;
    for (int dir = 0; dir < 2; ++dir)
      for (int s = -3; s <= 3; ++s) {
        Vec y = x;
        y(dir) += s * h;
        lap += c[s + 3] * eigenfunction_value(r.pair, desk().freq(), y) / (h * h);
      }
    const cplx U = eigenfunction_value(r.pair, desk().freq(), x);
    const cplx res = -lap + eval_potential(desk(), x, eps) * U - r.pair.lambda * U;
    EXPECT_LT(std::abs(res) / (r.pair.lambda * std::abs(U)), 1e-4);
  }
}

TEST(Eigenfunction, SupBoundDecaysWithMomentum) {
  const double eps = 0.05;
  const auto r10 = extract_pair(build_operator(vec2(10, 0), 3, desk(), eps), 0.0);
  const auto r20 = extract_pair(build_operator(vec2(20, 0), 3, desk(), eps), 0.0);
  ASSERT_TRUE(r10.accepted() && r20.accepted());
  EXPECT_LT(u_sup_bound(r20.pair), u_sup_bound(r10.pair));
}

TEST(Ladder, FreeCaseHasNoDrift) {
  const auto lad = ladder_converge(vec2(12, 0), desk(), 0.0, {2, 3, 4});
  for (const auto& s : lad.steps) {
    EXPECT_DOUBLE_EQ(s.lambda, 144.0);
    EXPECT_EQ(s.drift, 0.0);
  }
  EXPECT_TRUE(lad.converged);
}

TEST(Ladder, DriftCollapses) {
  const auto a = ladder_converge(vec2(12, 0), desk(), 0.05, {2, 3, 4});
  EXPECT_LT(a.steps[2].drift, a.steps[1].drift);
  EXPECT_TRUE(a.converged);
  const auto b = ladder_converge(vec2(12, 0), desk(), 0.01, {2, 3, 4});
  EXPECT_GT(b.steps[1].drift / b.steps[2].drift, 10.0);
}

TEST(Ladder, RejectsBadLevels) {
  EXPECT_THROW(ladder_converge(vec2(12, 0), desk(), 0.05, {3, 2}), PreconditionError);
  EXPECT_THROW(ladder_converge(vec2(12, 0), desk(), 0.05, {}), PreconditionError);
}

TEST(Covariance, GaugeShiftPreservesSpectrum) {
  const LatticeIndex n0{1, -1, 0};
  const Vec k = vec2(4.5, 2.0);
  const Vec ks = k + frequency_of(n0, desk().freq());
  const Vec a = spectrum(build_operator(ks, 2, desk(), 0.2));
  const Vec b = spectrum(build_operator(k, 2, desk(), 0.2, n0));
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Covariance, EvenInCouplingForSinglePair) {
  // A closed loop of frequencies produces odd orders; a single real pair does not.
  const PotentialSpec single(desk().freq(), 1, {{{1, 0, 0}, cplx(1.0)}});
  const Vec k = vec2(12, 0);
  auto odd_part = [&](double eps) {
    const double p = extract_pair(build_operator(k, 3, single, eps), 0.0).pair.lambda;
    const double m = extract_pair(build_operator(k, 3, single, -eps), 0.0).pair.lambda;
    return std::abs(p - m);
  };
  EXPECT_LT(odd_part(0.05), 1e-12);

  const PotentialSpec loop(desk().freq(), 1,
                           {{{1, 0, 0}, cplx(1.0)}, {{0, 1, 0}, cplx(1.0)}, {{1, 1, 0}, cplx(1.0)}});
  const double e1 = 0.2, e2 = 0.1;
  auto loop_odd = [&](double eps) {
    const long double p = refined_shift(build_operator(k, 2, loop, eps), loop.freq(),
                                        extract_pair(build_operator(k, 2, loop, eps), 0.0).pair);
    const long double m = refined_shift(build_operator(k, 2, loop, -eps), loop.freq(),
                                        extract_pair(build_operator(k, 2, loop, -eps), 0.0).pair);
    return static_cast<double>(std::abs(p - m));
  };
  const double ratio = loop_odd(e1) / loop_odd(e2);
  EXPECT_GT(ratio, 8.0 / 4.0);
  EXPECT_LT(ratio, 8.0 * 4.0);
}

TEST(PairJet, GradientAndHessianMatchFiniteDifferences) {
  const Vec k = vec2(12, 0.5);
  const double eps = 0.05;
  const auto op = build_operator(k, 2, desk(), eps);
  const auto r = extract_pair(op, 0.0);
  const auto jet = pair_jet(op, r.pair);
  EXPECT_LT((jet.grad - lambda_gradient(r.pair, desk().freq())).norm(), 1e-12);
  const double h = 1e-4;
  for (int i = 0; i < 2; ++i) {
    Vec kp = k, km = k;
    kp(i) += h;
    km(i) -= h;
    const auto rp = extract_pair(build_operator(kp, 2, desk(), eps), 0.0);
    const auto rm = extract_pair(build_operator(km, 2, desk(), eps), 0.0);
    EXPECT_NEAR(jet.grad(i), (rp.pair.lambda - rm.pair.lambda) / (2 * h), 1e-6);
    const Vec gfd = (lambda_gradient(rp.pair, desk().freq()) - lambda_gradient(rm.pair, desk().freq())) / (2 * h);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(jet.hessian(j, i), gfd(j), 1e-6);
    const CVec dvfd = (rp.pair.v - rm.pair.v) / (2 * h);
    EXPECT_LT((jet.dv[i] - dvfd).cwiseAbs().maxCoeff(), 1e-7);
  }
  EXPECT_LT(std::abs(jet.hessian(0, 1) - jet.hessian(1, 0)), 1e-12);
}

TEST(PairJson, RoundTrip) {
  const auto r = extract_pair(build_operator(vec2(12, 0), 2, desk(), 0.05), 0.0);
  const auto back = pair_from_json(to_json(r.pair));
  EXPECT_EQ(back.lambda, r.pair.lambda);
  EXPECT_EQ(back.v, r.pair.v);
  EXPECT_EQ(back.sites, r.pair.sites);
  EXPECT_EQ(back.k, r.pair.k);
}
