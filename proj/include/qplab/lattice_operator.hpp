#pragma once

// Finite lattice truncation H_M(k) of -Delta + V on span{e^{i<k+n.omega,x>} : |n| <= M}
// and extraction of its isolated eigenpair.

#include <qplab/potential.hpp>

#include <complex>
#ifndef lapack_complex_float
#define lapack_complex_float std::complex<float>
#endif
#ifndef lapack_complex_double
#define lapack_complex_double std::complex<double>
#endif
#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <json.hpp>

#include <limits>
#include <optional>

namespace qplab {

/// Lattice window {center + m : |m| <= M} in lexicographic order of m.
class LatticeWindow {
 public:
  LatticeWindow() = default;
  LatticeWindow(int l, int M, LatticeIndex center = {})
      : l_(l), M_(M), side_(2 * M + 1), center_(center.empty() ? LatticeIndex(l, 0) : std::move(center)) {
    require(static_cast<int>(center_.size()) == l, "LatticeWindow: center length must equal l");
    size_ = 1;
    for (int j = 0; j < l; ++j) size_ *= side_;
  }

  int l() const { return l_; }
  int M() const { return M_; }
  std::size_t size() const { return size_; }
  const LatticeIndex& center() const { return center_; }

  LatticeIndex site(std::size_t idx) const {
    LatticeIndex n(l_);
    for (int j = l_ - 1; j >= 0; --j) {
      n[j] = static_cast<int>(idx % side_) - M_ + center_[j];
      idx /= side_;
    }
    return n;
  }

  /// Position of n, or -1 when n lies outside the window.
  long index(const LatticeIndex& n) const {
    long idx = 0;
    for (int j = 0; j < l_; ++j) {
      const int m = n[j] - center_[j];
      if (m < -M_ || m > M_) return -1;
      idx = idx * side_ + (m + M_);
    }
    return idx;
  }

 private:
  int l_ = 0;
  int M_ = 0;
  int side_ = 1;
  std::size_t size_ = 0;
  LatticeIndex center_;
};

struct TruncatedOperator {
  Vec k;
  int M = 0;
  LatticeWindow window;
  std::vector<LatticeIndex> sites;
  Mat shifts;  // column i holds k + n_i.omega
  CMat H;

  std::size_t dim() const { return sites.size(); }
  long origin() const { return window.index(LatticeIndex(window.l(), 0)); }
};

/// H[n,n'] = |k+n.omega|^2 on the diagonal, coupling * V_{n-n'} off it. A nonzero
/// center shifts the window, which is how gauge covariance is exercised.
inline TruncatedOperator build_operator(const Vec& k, int M, const PotentialSpec& spec, double coupling,
                                        const LatticeIndex& center = {}) {
  require(k.size() == spec.dim(), "build_operator: k has wrong dimension");
  require(M >= spec.Q(), "build_operator: truncation M must be at least Q");
  TruncatedOperator op;
  op.k = k;
  op.M = M;
  op.window = LatticeWindow(spec.count(), M, center);
  const std::size_t n = op.window.size();
  op.sites.reserve(n);
  op.shifts.resize(spec.dim(), n);
  op.H = CMat::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    op.sites.push_back(op.window.site(i));
    op.shifts.col(i) = k + frequency_of(op.sites.back(), spec.freq());
    op.H(i, i) = op.shifts.col(i).squaredNorm();
  }
  if (coupling != 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& [s, v] : spec.coeffs()) {
        // H[n, n - s] = coupling * V_s
        const long j = op.window.index(op.sites[i] - s);
        if (j >= 0) op.H(i, j) = coupling * v;
      }
    }
  }
  return op;
}

inline constexpr std::size_t kDefaultDimCap = 4096;

struct EigenDecomposition {
  Vec values;    // ascending
  CMat vectors;  // unitary, column m belongs to values(m)
};

inline EigenDecomposition full_eigen(const TruncatedOperator& op, std::size_t cap = kDefaultDimCap) {
  require(op.dim() <= cap, "spectrum: operator dimension exceeds the configured cap");
  Eigen::SelfAdjointEigenSolver<CMat> es(op.H, Eigen::ComputeEigenvectors);
  guard(es.info() == Eigen::Success, "spectrum: diagonalization failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

/// Ascending eigenvalues of op.
inline Vec spectrum(const TruncatedOperator& op, std::size_t cap = kDefaultDimCap) {
  require(op.dim() <= cap, "spectrum: operator dimension exceeds the configured cap");
  Eigen::SelfAdjointEigenSolver<CMat> es(op.H, Eigen::EigenvaluesOnly);
  guard(es.info() == Eigen::Success, "spectrum: diagonalization failed");
  return es.eigenvalues();
}

enum class Rejection { None, GapTooSmall, DominanceFailure, SmallDivisor };

inline const char* to_string(Rejection r) {
  switch (r) {
    case Rejection::None: return "none";
    case Rejection::GapTooSmall: return "gap_too_small";
    case Rejection::DominanceFailure: return "dominance_failure";
    case Rejection::SmallDivisor: return "small_divisor";
  }
  return "unknown";
}

struct RejectedPair : std::runtime_error {
  Rejection reason;
  RejectedPair(Rejection r, const std::string& what) : std::runtime_error(what), reason(r) {}
};

/// lambda(k) with coefficients normalized so that v_0 = 1.
struct GeneralizedEigenpair {
  Vec k;
  int M = 0;
  double lambda = 0.0;
  double gap = 0.0;
  double dominance = 0.0;
  std::vector<LatticeIndex> sites;
  CVec v;

  cplx coefficient(const LatticeIndex& n) const {
    for (std::size_t i = 0; i < sites.size(); ++i)
      if (sites[i] == n) return v(i);
    return 0.0;
  }
};

struct ExtractionResult {
  GeneralizedEigenpair pair;  // filled for rejected points too, as a diagnostic
  Rejection reason = Rejection::None;
  bool accepted() const { return reason == Rejection::None; }
};

namespace detail {

inline double residual(const CMat& H, const CVec& v, double lambda) {
  return (H * v - lambda * v).norm() / v.norm();
}

inline GeneralizedEigenpair make_pair(const TruncatedOperator& op, const CVec& psi, double lambda, double gap,
                                      long origin) {
  GeneralizedEigenpair p;
  p.k = op.k;
  p.M = op.M;
  p.lambda = lambda;
  p.gap = gap;
  p.dominance = std::norm(psi(origin)) / psi.squaredNorm();
  p.sites = op.sites;
  p.v = psi / psi(origin);
  p.v(origin) = 1.0;
  return p;
}

inline double nearest_other(const Vec& sorted, double lambda) {
  // Distance from lambda to the closest eigenvalue other than the one it equals.
  const auto begin = sorted.data();
  const auto end = begin + sorted.size();
  const auto it = std::lower_bound(begin, end, lambda);
  std::ptrdiff_t self = it - begin;
  if (it == end || (self > 0 && std::abs(*(it - 1) - lambda) < std::abs(*it - lambda))) --self;
  double gap = std::numeric_limits<double>::infinity();
  if (self > 0) gap = std::min(gap, lambda - sorted(self - 1));
  if (self + 1 < sorted.size()) gap = std::min(gap, sorted(self + 1) - lambda);
  return gap;
}

/// Full solve, max |psi_0|^2 branch.
inline GeneralizedEigenpair dense_pair(const TruncatedOperator& op, long origin) {
  const auto ed = full_eigen(op);
  Eigen::Index best = 0;
  ed.vectors.row(origin).cwiseAbs2().maxCoeff(&best);
  const double lam = ed.values(best);
  double gap = std::numeric_limits<double>::infinity();
  if (best > 0) gap = std::min(gap, lam - ed.values(best - 1));
  if (best + 1 < ed.values.size()) gap = std::min(gap, ed.values(best + 1) - lam);
  return make_pair(op, ed.vectors.col(best), lam, gap, origin);
}

/// Windowed route: any unit eigenvector with |psi_0|^2 > 1/2 has its eigenvalue
/// within the off-diagonal row norm of H[0,0], so only that window is resolved.
inline std::optional<GeneralizedEigenpair> windowed_pair(const TruncatedOperator& op, long origin) {
  const lapack_int n = static_cast<lapack_int>(op.dim());
  CMat A = op.H;
  Vec diag(n), off(std::max<lapack_int>(n - 1, 1));
  CVec tau(std::max<lapack_int>(n - 1, 1));
  if (LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'L', n, A.data(), n, diag.data(), off.data(), tau.data()) != 0)
    return std::nullopt;

  Vec all = diag;
  Vec e_copy = off;
  if (n > 1 && LAPACKE_dsterf(n, all.data(), e_copy.data()) != 0) return std::nullopt;
  std::sort(all.data(), all.data() + n);

  const double d0 = op.H(origin, origin).real();
  double row = 0.0;
  for (lapack_int j = 0; j < n; ++j)
    if (j != origin) row += std::norm(op.H(origin, j));
  const double hnorm = std::max(std::abs(all(0)), std::abs(all(n - 1)));
  const double width = std::sqrt(row) + 64.0 * std::numeric_limits<double>::epsilon() * std::max(hnorm, 1.0);

  lapack_int m = 0, nsplit = 0;
  Vec w(n);
  std::vector<lapack_int> iblock(n), isplit(n);
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  if (LAPACKE_dstebz('V', 'B', n, d0 - width, d0 + width, 0, 0, abstol, diag.data(), off.data(), &m, &nsplit,
                     w.data(), iblock.data(), isplit.data()) != 0)
    return std::nullopt;
  if (m == 0) return std::nullopt;

  Mat Z(n, m);
  std::vector<lapack_int> ifail(m);
  if (LAPACKE_dstein(LAPACK_COL_MAJOR, n, diag.data(), off.data(), m, w.data(), iblock.data(), isplit.data(),
                     Z.data(), n, ifail.data()) != 0)
    return std::nullopt;
  CMat C = Z.cast<cplx>();
  if (n > 1 && LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'L', 'N', n, m, A.data(), n, tau.data(), C.data(), n) != 0)
    return std::nullopt;

  Eigen::Index best = 0;
  const double dom = (C.row(origin).cwiseAbs2().array() / C.colwise().squaredNorm().array()).maxCoeff(&best);
  if (!(dom > 0.5)) return std::nullopt;

  const double lam = w(best);
  const CVec psi = C.col(best);
  if (residual(op.H, psi, lam) >= 1e-8) return std::nullopt;
  return make_pair(op, psi, lam, nearest_other(all, lam), origin);
}

}  // namespace detail

/// Picks the eigenvector maximizing |v_0|^2 and accepts it when that dominance
/// exceeds 1/2 and the isolation gap reaches gap_floor.
inline ExtractionResult extract_pair(const TruncatedOperator& op, double gap_floor) {
  const long origin = op.origin();
  require(origin >= 0, "extract_pair: lattice window must contain n = 0");
  ExtractionResult r;
  auto fast = detail::windowed_pair(op, origin);
  r.pair = fast ? std::move(*fast) : detail::dense_pair(op, origin);
  guard(detail::residual(op.H, r.pair.v, r.pair.lambda) < 1e-8, "extract_pair: eigen-residual above 1e-8");
  if (!(r.pair.dominance > 0.5))
    r.reason = Rejection::DominanceFailure;
  else if (!(r.pair.gap >= gap_floor) || r.pair.gap <= 0.0)
    r.reason = Rejection::GapTooSmall;
  return r;
}

/// U(k,x) = sum_n v_n e^{i<k+n.omega,x>}.
inline cplx eigenfunction_value(const GeneralizedEigenpair& pair, const FrequencyVector& freq, const Vec& x) {
  require(x.size() == freq.dim(), "eigenfunction_value: point dimension mismatch");
  cplx sum = 0.0;
  for (std::size_t i = 0; i < pair.sites.size(); ++i) {
    if (pair.v(i) == cplx(0.0)) continue;
    const double phase = (pair.k + frequency_of(pair.sites[i], freq)).dot(x);
    sum += pair.v(i) * std::polar(1.0, phase);
  }
  return sum;
}

/// sum_{n != 0} |v_n|, an upper bound for sup_x |u(k,x)|.
inline double u_sup_bound(const GeneralizedEigenpair& pair) {
  double s = 0.0;
  for (std::size_t i = 0; i < pair.sites.size(); ++i)
    if (sup_norm(pair.sites[i]) != 0) s += std::abs(pair.v(i));
  return s;
}

/// lambda - H[0,0] recomputed in extended precision: three inverse-iteration
/// sweeps in long double, shifted by the double-precision eigenvalue, then the
/// shift read off row 0 of H v = lambda v. Needed where truncation drifts fall
/// below the double-precision floor of lambda itself.
inline long double refined_shift(const TruncatedOperator& op, const FrequencyVector& freq,
                                 const GeneralizedEigenpair& pair) {
  using lcplx = std::complex<long double>;
  using LMat = Eigen::Matrix<lcplx, Eigen::Dynamic, Eigen::Dynamic>;
  using LVec = Eigen::Matrix<lcplx, Eigen::Dynamic, 1>;
  const Eigen::Index n = static_cast<Eigen::Index>(op.dim());
  const long origin = op.origin();
  require(origin >= 0 && pair.v.size() == n, "refined_shift: pair does not belong to this operator");
  if ((op.H.row(origin).cwiseAbs().sum() - std::abs(op.H(origin, origin))) == 0.0) return 0.0L;
  LMat A = op.H.cast<lcplx>();
  for (Eigen::Index i = 0; i < n; ++i) {
    long double diag = 0;
    for (int r = 0; r < freq.dim(); ++r) {
      long double c = op.k(r);
      for (int j = 0; j < freq.count(); ++j)
        c += static_cast<long double>(op.sites[i][j]) * static_cast<long double>(freq.matrix()(r, j));
      diag += c * c;
    }
    A(i, i) = diag;
  }
  LMat B = A;
  // Offset the shift slightly so the factorization never hits an exact zero pivot.
  B.diagonal().array() -= static_cast<long double>(pair.lambda) * (1.0L + 1e-15L);
  Eigen::PartialPivLU<LMat> lu(B);
  LVec v = pair.v.cast<lcplx>();
  for (int sweep = 0; sweep < 3; ++sweep) {
    v = lu.solve(v);
    v /= v(origin);
  }
  lcplx shift = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    if (j != origin) shift += A(origin, j) * v(j);
  return shift.real();
}

struct LadderStep {
  int M = 0;
  double lambda = 0.0;
  double drift = 0.0;  // |lambda_M - lambda_{previous M}|, zero for the first level
};

struct LadderResult {
  std::vector<LadderStep> steps;
  bool converged = false;
};

/// Eigenvalue along an ascending ladder of truncations. Converged when the last
/// drift falls below 1e-10 |k|^2. Drifts are measured on the extended-precision
/// shift unless disabled.
inline LadderResult ladder_converge(const Vec& k, const PotentialSpec& spec, double coupling,
                                    const std::vector<int>& levels, double gap_floor = 0.0,
                                    bool extended_precision = true) {
  require(!levels.empty(), "ladder_converge: need at least one level");
  LadderResult out;
  std::vector<long double> shifts;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    require(levels[i] >= spec.Q(), "ladder_converge: every level must be >= Q");
    require(i == 0 || levels[i] > levels[i - 1], "ladder_converge: levels must ascend");
    const auto op = build_operator(k, levels[i], spec, coupling);
    const auto r = extract_pair(op, gap_floor);
    if (!r.accepted())
      throw RejectedPair(r.reason, "ladder_converge: pair rejected at M = " + std::to_string(levels[i]));
    const long double shift = extended_precision ? refined_shift(op, spec.freq(), r.pair)
                                                 : static_cast<long double>(r.pair.lambda) - k.squaredNorm();
    LadderStep s{levels[i], r.pair.lambda, 0.0};
    if (i > 0) s.drift = static_cast<double>(std::abs(shift - shifts.back()));
    shifts.push_back(shift);
    out.steps.push_back(s);
  }
  out.converged = out.steps.size() > 1 && out.steps.back().drift < 1e-10 * k.squaredNorm();
  return out;
}

/// First and second derivatives of lambda(k) and the first derivative of the
/// v_0 = 1 coefficients, all by perturbation theory on the full spectrum.
struct PairJet {
  Vec grad;
  Mat hessian;
  std::vector<CVec> dv;  // dv[i] = d v / d k_i
};

inline Vec lambda_gradient(const GeneralizedEigenpair& pair, const FrequencyVector& freq) {
  Vec g = Vec::Zero(pair.k.size());
  const double norm2 = pair.v.squaredNorm();
  for (std::size_t i = 0; i < pair.sites.size(); ++i) {
    const double w = std::norm(pair.v(i));
    if (w == 0.0) continue;
    g += 2.0 * w * (pair.k + frequency_of(pair.sites[i], freq));
  }
  return g / norm2;
}

inline PairJet pair_jet(const TruncatedOperator& op, const GeneralizedEigenpair& pair) {
  const auto ed = full_eigen(op);
  const long origin = op.origin();
  const Eigen::Index n = static_cast<Eigen::Index>(op.dim());
  const int d = static_cast<int>(op.k.size());
  const CVec psi = pair.v / pair.v.norm();

  Eigen::Index self = 0;
  (ed.values.array() - pair.lambda).abs().minCoeff(&self);
  Vec g(n);
  for (Eigen::Index m = 0; m < n; ++m) g(m) = (m == self) ? 0.0 : 1.0 / (pair.lambda - ed.values(m));

  PairJet jet;
  jet.grad = Vec::Zero(d);
  jet.hessian = 2.0 * Mat::Identity(d, d);
  std::vector<CVec> w(d);
  for (int i = 0; i < d; ++i) {
    const CVec dh_psi = (2.0 * op.shifts.row(i).transpose()).cast<cplx>().cwiseProduct(psi);
    jet.grad(i) = psi.dot(dh_psi).real();
    w[i] = ed.vectors.adjoint() * dh_psi;
  }
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      jet.hessian(i, j) += 2.0 * (w[i].conjugate().cwiseProduct(w[j]).cwiseProduct(g.cast<cplx>())).sum().real();

  const cplx p0 = psi(origin);
  for (int i = 0; i < d; ++i) {
    const CVec dpsi = ed.vectors * w[i].cwiseProduct(g.cast<cplx>());
    jet.dv.push_back(dpsi / p0 - psi * (dpsi(origin) / (p0 * p0)));
  }
  return jet;
}

inline nlohmann::json to_json(const GeneralizedEigenpair& p) {
  nlohmann::json cs = nlohmann::json::array();
  for (std::size_t i = 0; i < p.sites.size(); ++i)
    cs.push_back({{"n", p.sites[i]}, {"re", p.v(i).real()}, {"im", p.v(i).imag()}});
  return {{"k", std::vector<double>(p.k.data(), p.k.data() + p.k.size())},
          {"M", p.M},
          {"lambda", p.lambda},
          {"gap", p.gap},
          {"dominance", p.dominance},
          {"coeffs", cs}};
}

inline GeneralizedEigenpair pair_from_json(const nlohmann::json& j) {
  try {
    GeneralizedEigenpair p;
    const auto k = j.at("k").get<std::vector<double>>();
    p.k = Eigen::Map<const Vec>(k.data(), static_cast<Eigen::Index>(k.size()));
    p.M = j.at("M").get<int>();
    p.lambda = j.at("lambda").get<double>();
    p.gap = j.at("gap").get<double>();
    p.dominance = j.at("dominance").get<double>();
    const auto& cs = j.at("coeffs");
    p.v.resize(static_cast<Eigen::Index>(cs.size()));
    for (std::size_t i = 0; i < cs.size(); ++i) {
      p.sites.push_back(cs[i].at("n").get<LatticeIndex>());
      p.v(i) = cplx(cs[i].at("re").get<double>(), cs[i].at("im").get<double>());
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("eigenpair JSON: ") + e.what());
  }
}

}  // namespace qplab
