#pragma once

// Wave packets built from extended eigenfunctions, their evolution by eigen
// expansion and by split-step FFT, and second-moment transport statistics.

#include <qplab/transforms.hpp>

#include <array>

namespace qplab {

struct WavePacketSpec {
  GaussianProfile profile;
  double delta = 0.5;   // width of the cutoff around the accepted set
  double radius = 3.0;  // momentum ball around k_c carried by the packet
  int M = 2;
  double coupling = 0.05;
  NonResonanceCriterion crit;
};

/// Cells carrying a packet: eta is the smooth cutoff of the accepted set, and
/// (lambda, v) the blended extension lambda_ext, v_ext.
struct PacketBasis {
  ProjectionRegion region;
  double outside_fraction = 0.0;  // profile mass outside the region's cells
  double accepted_fraction = 0.0;
};

namespace detail {

inline std::vector<ExtractionResult> classify_box(CellBox& box, int M, const PotentialSpec& spec, double coupling,
                                                  const NonResonanceCriterion& crit, int threads) {
  std::vector<ExtractionResult> out(box.size());
  parallel_for(box.size(), threads, [&](std::size_t i) { out[i] = classify(box.centre(i), M, spec, coupling, crit); });
  for (std::size_t i = 0; i < box.size(); ++i) box.set_flag(i, out[i].accepted());
  return out;
}

inline double blend_lambda(const Vec& k, double raw, double eta) {
  const double k2 = k.squaredNorm();
  return k2 + (raw - k2) * eta;
}

inline CVec blend_v(const CVec& v, long origin, double eta) {
  CVec out = eta * v;
  out(origin) += 1.0 - eta;
  return out;
}

}  // namespace detail

inline PacketBasis build_packet_basis(const WavePacketSpec& ps, const PotentialSpec& spec, const SpatialGrid& grid,
                                      int threads = 1) {
  const auto& F = ps.profile;
  require(F.dim() == spec.dim() && F.dim() == grid.d, "build_packet_basis: dimension mismatch");
  CellBox box = aligned_box(grid, F.kc, ps.radius + 2 * ps.delta);
  const auto results = detail::classify_box(box, ps.M, spec, ps.coupling, ps.crit, threads);
  const SmoothCutoff cut(box, ps.delta);

  PacketBasis b;
  b.region.box = box;
  detail::attach_sites(b.region, spec, ps.M);
  const long origin = LatticeWindow(spec.count(), ps.M).index(LatticeIndex(spec.count(), 0));
  double inside = 0, accepted = 0, cells = 0;
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Vec k = box.centre(i);
    if ((k - F.kc).norm() > ps.radius) continue;
    cells += 1;
    accepted += box.flag(i);
    const double eta = cut.value(k);
    inside += std::norm(F(k));
    if (eta == 0.0) continue;
    const auto& r = results[i];
    b.region.cells.push_back(RegionCell{i, k, detail::blend_lambda(k, r.pair.lambda, eta),
                                        detail::blend_v(r.pair.v, origin, eta), eta, r.accepted()});
  }
  require(!b.region.cells.empty(), "build_packet_basis: no cell of the packet touches the accepted set");
  b.outside_fraction = std::max(0.0, 1.0 - inside * box.cell_volume() / F.norm2());
  b.accepted_fraction = accepted / cells;
  return b;
}

/// Psi(x, t) = (2 pi)^{-d/2} sum_cells w U(k, x) e^{-i lambda t} phi(k) eta(k).
inline FieldState evolve_eigen(const PacketBasis& b, const GaussianProfile& F, const SpatialGrid& grid, double t) {
  CoefficientField f;
  f.values.reserve(b.region.cells.size());
  for (const auto& c : b.region.cells) f.values.push_back(F(c.k) * c.eta * std::polar(1.0, -c.lambda * t));
  return synthesize(f, b.region, grid, t);
}

inline FieldState build_initial(const PacketBasis& b, const GaussianProfile& F, const SpatialGrid& grid) {
  return evolve_eigen(b, F, grid, 0.0);
}

/// Coefficient weight sum_cells w |phi eta|^2, invariant under evolve_eigen.
inline double coefficient_mass(const PacketBasis& b, const GaussianProfile& F) {
  double s = 0;
  for (const auto& c : b.region.cells) s += std::norm(F(c.k) * c.eta);
  return s * b.region.weight();
}

// ---------------------------------------------------------------------------
// Split-step propagation

namespace detail {

inline std::vector<double> grid_wavenumbers_squared(const SpatialGrid& g) {
  std::vector<double> k2(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::size_t idx = i;
    double s = 0;
    for (int j = 0; j < g.d; ++j) {
      const double kj = g.signed_bin(static_cast<int>(idx % g.N)) * g.dk();
      s += kj * kj;
      idx /= g.N;
    }
    k2[i] = s;
  }
  return k2;
}

inline std::vector<double> sampled_potential(const SpatialGrid& g, const PotentialSpec& spec, double coupling) {
  std::vector<double> V(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) V[i] = eval_potential(spec, g.point(i), coupling);
  return V;
}

}  // namespace detail

/// Strang splitting e^{-i V dt/2} e^{i Delta dt} e^{-i V dt/2} for i psi_t = (-Delta + V) psi
/// on the periodic box, V sampled on the grid.
inline FieldState evolve_splitstep(const FieldState& psi0, const PotentialSpec& spec, double coupling, double dt,
                                   std::size_t steps) {
  const auto& g = psi0.grid;
  require(dt > 0, "evolve_splitstep: dt must be positive");
  const auto V = detail::sampled_potential(g, spec, coupling);
  double vmax = 0;
  for (double v : V) vmax = std::max(vmax, std::abs(v));
  const double kmax2 = g.d * g.k_nyquist() * g.k_nyquist();
  guard(dt * vmax < 0.1, "evolve_splitstep: dt max|V| must stay below 0.1");
  guard(dt * kmax2 < 0.5, "evolve_splitstep: dt k_max^2 must stay below 0.5");

  const auto k2 = detail::grid_wavenumbers_squared(g);
  std::vector<cplx> half_v(g.size()), kin(g.size());
  const double inv = 1.0 / static_cast<double>(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    half_v[i] = std::polar(1.0, -0.5 * dt * V[i]);
    kin[i] = std::polar(inv, -dt * k2[i]);
  }
  FftPlan fwd(g, FFTW_FORWARD), bwd(g, FFTW_BACKWARD);
  FieldState psi = psi0;
  auto& u = psi.values;
  for (std::size_t s = 0; s < steps; ++s) {
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half_v[i];
    fwd.execute(u);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= kin[i];
    bwd.execute(u);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= half_v[i];
  }
  psi.time = psi0.time + dt * static_cast<double>(steps);
  return psi;
}

/// <psi, (-Delta + V) psi> with the Laplacian applied spectrally.
inline double energy(const FieldState& psi, const PotentialSpec& spec, double coupling) {
  const auto& g = psi.grid;
  const auto V = detail::sampled_potential(g, spec, coupling);
  const auto k2 = detail::grid_wavenumbers_squared(g);
  auto u = psi.values;
  FftPlan(g, FFTW_FORWARD).execute(u);
  double kinetic = 0, potential = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    kinetic += k2[i] * std::norm(u[i]);
    potential += V[i] * std::norm(psi.values[i]);
  }
  return g.cell_volume() * (kinetic / static_cast<double>(g.size()) + potential);
}

// ---------------------------------------------------------------------------
// Time averages and exponent fits

struct MomentSeries {
  std::vector<double> t;
  std::vector<double> m2;
};

/// Envelope C1 t^2 + C2 used for the Abel tail beyond the last sample.
struct BallisticEnvelope {
  double C1 = 0.0;
  double C2 = 0.0;
};

inline BallisticEnvelope fit_envelope(const MomentSeries& s) {
  require(!s.t.empty() && s.t.size() == s.m2.size(), "fit_envelope: empty or ragged series");
  BallisticEnvelope e;
  e.C2 = s.m2.front();
  for (std::size_t i = 0; i < s.t.size(); ++i)
    if (s.t[i] > 0) e.C1 = std::max(e.C1, (s.m2[i] - e.C2) / (s.t[i] * s.t[i]));
  return e;
}

/// (2/T) int_0^inf e^{-2t/T} m2(t) dt: trapezoid over the samples plus the
/// closed-form integral of the envelope beyond t_max.
inline double abel_mean(const MomentSeries& s, double T, const BallisticEnvelope& env) {
  require(T > 0, "abel_mean: T must be positive");
  require(s.t.size() >= 2 && s.t.size() == s.m2.size(), "abel_mean: need at least two samples");
  require(s.t.front() == 0.0, "abel_mean: series must start at t = 0");
  const double tm = s.t.back();
  require(tm >= 5 * T * (1 - 1e-12), "abel_mean: samples must reach t_max >= 5 T");
  double acc = 0;
  for (std::size_t i = 1; i < s.t.size(); ++i) {
    const double h = s.t[i] - s.t[i - 1];
    acc += 0.5 * h * (std::exp(-2 * s.t[i - 1] / T) * s.m2[i - 1] + std::exp(-2 * s.t[i] / T) * s.m2[i]);
  }
  const double tail = std::exp(-2 * tm / T) * (env.C1 * (tm * tm + tm * T + 0.5 * T * T) + env.C2);
  return 2 * acc / T + tail;
}

inline double abel_mean(const MomentSeries& s, double T) { return abel_mean(s, T, fit_envelope(s)); }

/// (1/T) int_0^T m2(t) dt by the trapezoid rule, linear interpolation at T.
inline double cesaro_mean(const MomentSeries& s, double T) {
  require(T > 0, "cesaro_mean: T must be positive");
  require(s.t.size() >= 2 && s.t.front() == 0.0, "cesaro_mean: series must start at t = 0");
  require(s.t.back() >= T * (1 - 1e-12), "cesaro_mean: samples do not reach T");
  double acc = 0;
  for (std::size_t i = 1; i < s.t.size(); ++i) {
    const double a = s.t[i - 1], b = std::min(s.t[i], T);
    if (b <= a) break;
    const double mb = s.m2[i - 1] + (s.m2[i] - s.m2[i - 1]) * (b - a) / (s.t[i] - a);
    acc += 0.5 * (b - a) * (s.m2[i - 1] + mb);
  }
  return acc / T;
}

/// T_0, T_0 sqrt 2, T_0 2, ... up to T_max (inclusive within rounding).
inline std::vector<double> geometric_grid(double T0, double Tmax, double ratio = std::sqrt(2.0)) {
  require(T0 > 0 && Tmax >= T0 && ratio > 1, "geometric_grid: bad range");
  std::vector<double> out;
  for (double T = T0; T <= Tmax * (1 + 1e-9); T *= ratio) out.push_back(T);
  return out;
}

struct BetaFit {
  double beta = 0.0;
  double stderr_ = 0.0;
};

/// Half the least-squares slope of log(mean) against log T.
inline BetaFit fit_beta(const std::vector<double>& T, const std::vector<double>& means) {
  require(T.size() == means.size() && T.size() >= 2, "fit_beta: need two or more points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < T.size(); ++i) {
    require(T[i] > 0 && means[i] > 0, "fit_beta: values must be positive");
    x.push_back(std::log(T[i]));
    y.push_back(std::log(means[i]));
  }
  const auto f = fit_line(x, y);
  return {0.5 * f.slope, 0.5 * f.slope_stderr};
}

/// Local exponent between consecutive grid points; the first entry repeats the second.
inline std::vector<double> beta_running(const std::vector<double>& T, const std::vector<double>& means) {
  require(T.size() == means.size() && T.size() >= 2, "beta_running: need two or more points");
  std::vector<double> out(T.size());
  for (std::size_t i = 1; i < T.size(); ++i)
    out[i] = 0.5 * std::log(means[i] / means[i - 1]) / std::log(T[i] / T[i - 1]);
  out[0] = out[1];
  return out;
}

struct BallisticVerdict {
  double c1 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double floor = 0.0;
  bool ballistic = false;
};

/// c1 = min abel(T)/T^2 over T in [T0, Tmax]; C1, C2 from the upper envelope of m2.
inline BallisticVerdict ballistic_check(const MomentSeries& s, const std::vector<double>& T,
                                        const std::vector<double>& abel, double T0, double Tmax, double floor) {
  require(T.size() == abel.size(), "ballistic_check: ragged T-grid");
  BallisticVerdict v;
  v.c1 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < T.size(); ++i)
    if (T[i] >= T0 * (1 - 1e-12) && T[i] <= Tmax * (1 + 1e-12)) v.c1 = std::min(v.c1, abel[i] / (T[i] * T[i]));
  require(std::isfinite(v.c1), "ballistic_check: no T in [T0, Tmax]");
  const auto env = fit_envelope(s);
  v.C1 = env.C1;
  v.C2 = env.C2;
  v.floor = floor;
  v.ballistic = v.c1 > floor;
  return v;
}

// ---------------------------------------------------------------------------
// Second moment in momentum space
//
// With G_n(k, t) = phi(k) eta(k) v_n(k) e^{-i lambda(k) t}, the packet has
// Psi^(p, t) = sum_n G_n(p - n.omega) and ||X Psi||^2 = ||grad_p Psi^||^2. Each
// term grad G_n = e^{-i lambda t} (A_n - i t grad(lambda) B_n) is tabulated once
// on a uniform momentum grid, so m2(t) is an explicit function of t.

struct MomentumTransportSettings {
  double step = 0.1;
  double radius = 3.5;
  double delta = 0.5;
  int M = 2;
  double site_threshold = 1e-10;  // drop lattice sites with max|B_n| below this times max|B_0|
  double pair_threshold = 1e-4;   // drop cross pairs with max|B_n| max|B_m| below this times max|B_0|^2
  NonResonanceCriterion crit;
};

namespace detail {

/// Catmull-Rom weights at fractional offset u in [0, 1) for nodes -1, 0, 1, 2.
inline std::array<double, 4> catmull_rom(double u) {
  const double u2 = u * u, u3 = u2 * u;
  return {0.5 * (-u3 + 2 * u2 - u), 0.5 * (3 * u3 - 5 * u2 + 2), 0.5 * (-3 * u3 + 4 * u2 + u), 0.5 * (u3 - u2)};
}

}  // namespace detail

class MomentumTransport {
 public:
  MomentumTransport(GaussianProfile profile, const PotentialSpec& spec, double coupling,
                    MomentumTransportSettings settings = {}, int threads = 1)
      : F_(std::move(profile)), set_(settings), d_(F_.dim()) {
    require(d_ == spec.dim(), "MomentumTransport: dimension mismatch");
    require(set_.step > 0 && set_.radius > 0, "MomentumTransport: bad grid");
    box_ = CellBox::around(F_.kc, set_.step, static_cast<int>(std::ceil(set_.radius / set_.step)));
    const auto results = detail::classify_box(box_, set_.M, spec, coupling, set_.crit, threads);
    const SmoothCutoff cut(box_, set_.delta);
    tabulate(spec, coupling, cut, results, threads);
    build_terms();
  }

  const CellBox& box() const { return box_; }
  const std::vector<LatticeIndex>& active_sites() const { return site_index_; }
  std::size_t cross_pair_count() const { return pairs_; }
  double accepted_fraction() const {
    return static_cast<double>(box_.flagged_count()) / static_cast<double>(box_.size());
  }

  /// |grad lambda_ext| at the grid node nearest k_c.
  double grad_norm_at_centre() const {
    const long i = box_.locate(F_.kc);
    return Eigen::Map<const Vec>(&glam_[i * d_], d_).norm();
  }

  /// ||Psi(0)||^2, diagonal plus retained cross terms.
  double norm2() const {
    double s = norm_diag_;
    for (const auto& tm : terms_) s += 2 * tm.N.real();
    return s;
  }

  double m2(double t) const {
    double s = alpha_ + t * (beta_ + t * gamma_);
    cplx c = 0;
    for (const auto& tm : terms_) c += (tm.P + t * (tm.Q + t * tm.R)) * std::polar(1.0, -tm.delta * t);
    return s + 2 * c.real();
  }

  /// m2 at t = 0, dt, ..., (count - 1) dt, phases advanced by recurrence.
  MomentSeries series(double dt, std::size_t count) const {
    MomentSeries s;
    s.t.resize(count);
    s.m2.resize(count);
    const std::size_t nt = terms_.size();
    std::vector<cplx> ph(nt, 1.0), rot(nt);
    for (std::size_t j = 0; j < nt; ++j) rot[j] = std::polar(1.0, -terms_[j].delta * dt);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = dt * static_cast<double>(i);
      if (i % 512 == 0)
        for (std::size_t j = 0; j < nt; ++j) ph[j] = std::polar(1.0, -terms_[j].delta * t);
      cplx c0 = 0, c1 = 0, c2 = 0;
      for (std::size_t j = 0; j < nt; ++j) {
        const auto& tm = terms_[j];
        c0 += tm.P * ph[j];
        c1 += tm.Q * ph[j];
        c2 += tm.R * ph[j];
        ph[j] *= rot[j];
      }
      s.t[i] = t;
      s.m2[i] = alpha_ + t * (beta_ + t * gamma_) + 2 * (c0 + t * (c1 + t * c2)).real();
    }
    return s;
  }

  /// Abel mean evaluated in closed form from the tabulated representation.
  double abel_exact(double T) const {
    double s = alpha_ + 0.5 * beta_ * T + 0.5 * gamma_ * T * T;
    cplx c = 0;
    for (const auto& tm : terms_) {
      const cplx a(2.0 / T, tm.delta);
      c += tm.P / a + tm.Q / (a * a) + 2.0 * tm.R / (a * a * a);
    }
    return s + 2 * (2.0 / T * c).real();
  }

  /// Leading-order Abel mean of ||X (Psi - w)||^2 on B_{c0 T}, divided by T^2, where Psi
  /// carries chi_G phi and w carries eta phi. Each momentum travels along its
  /// ray x = grad lambda t, which gives |grad lambda|^2 P(3, 2 c0 / |grad lambda|) / 2 per
  /// unit of mass, P the regularized lower incomplete gamma function.
  double remainder_ratio(double c0) const {
    require(c0 > 0, "remainder_ratio: c0 must be positive");
    double s = 0;
    for (std::size_t i = 0; i < box_.size(); ++i) {
      const double diff = (box_.flag(i) ? 1.0 : 0.0) - eta_[i];
      if (diff == 0.0) continue;
      const double g = Eigen::Map<const Vec>(&glam_[i * d_], d_).norm();
      const double x = 2 * c0 / g;
      const double p3 = -std::expm1(-x) - std::exp(-x) * (x + 0.5 * x * x);
      s += std::norm(diff * F_(box_.centre(i))) * vnorm2_[i] * g * g * 0.5 * p3;
    }
    return s * box_.cell_volume();
  }

 private:
  struct CrossTerm {
    cplx P, Q, R, N;
    double delta;
  };

  void tabulate(const PotentialSpec& spec, double coupling, const SmoothCutoff& cut,
                const std::vector<ExtractionResult>& results, int threads) {
    const std::size_t np = box_.size();
    const LatticeWindow win(spec.count(), set_.M);
    const std::size_t nsites = win.size();
    const long origin = win.index(LatticeIndex(spec.count(), 0));
    lam_.assign(np, 0.0);
    glam_.assign(np * d_, 0.0);
    eta_.assign(np, 0.0);
    vnorm2_.assign(np, 1.0);
    std::vector<CVec> Bfull(np), Afull(np * d_);
    parallel_for(np, threads, [&](std::size_t i) {
      const Vec k = box_.centre(i);
      Vec geta;
      const double eta = cut.eval(k, &geta);
      eta_[i] = eta;
      Bfull[i] = CVec::Zero(nsites);
      for (int j = 0; j < d_; ++j) Afull[i * d_ + j] = CVec::Zero(nsites);
      if (eta == 0.0) {
        lam_[i] = k.squaredNorm();
        for (int j = 0; j < d_; ++j) glam_[i * d_ + j] = 2 * k(j);
        return;
      }
      const auto& pair = results[i].pair;
      const auto op = build_operator(k, set_.M, spec, coupling);
      const auto jet = pair_jet(op, pair);
      lam_[i] = detail::blend_lambda(k, pair.lambda, eta);
      const Vec g = 2.0 * k + (jet.grad - 2.0 * k) * eta + (pair.lambda - k.squaredNorm()) * geta;
      for (int j = 0; j < d_; ++j) glam_[i * d_ + j] = g(j);
      const CVec v = detail::blend_v(pair.v, origin, eta);
      CVec v_minus_e0 = pair.v;
      v_minus_e0(origin) -= 1.0;
      vnorm2_[i] = v.squaredNorm();
      const cplx f = F_(k);
      const CVec df = F_.gradient(k);
      Bfull[i] = f * eta * v;
      for (int j = 0; j < d_; ++j) {
        const CVec dv = geta(j) * v_minus_e0 + eta * jet.dv[j];
        Afull[i * d_ + j] = (df(j) * eta + f * geta(j)) * v + f * eta * dv;
      }
    });

    std::vector<double> peak(nsites, 0.0);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t n = 0; n < nsites; ++n) peak[n] = std::max(peak[n], std::abs(Bfull[i](n)));
    const double p0 = peak[origin];
    require(p0 > 0, "MomentumTransport: profile vanishes on the accepted set");
    for (std::size_t n = 0; n < nsites; ++n) {
      if (peak[n] < set_.site_threshold * p0) continue;
      sites_.push_back(n);
      site_index_.push_back(win.site(n));
      site_freq_.push_back(frequency_of(win.site(n), spec.freq()));
      peak_.push_back(peak[n]);
    }
    const std::size_t ns = sites_.size();
    B_.assign(np * ns, 0.0);
    A_.assign(np * ns * d_, 0.0);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t s = 0; s < ns; ++s) {
        B_[i * ns + s] = Bfull[i](sites_[s]);
        for (int j = 0; j < d_; ++j) A_[(i * ns + s) * d_ + j] = Afull[i * d_ + j](sites_[s]);
      }
    origin_slot_ = static_cast<std::size_t>(std::find(sites_.begin(), sites_.end(), std::size_t(origin)) - sites_.begin());
  }

  // Values of site s interpolated at k: B, A (d), lambda, grad lambda (d).
  bool interpolate(const Vec& k, std::size_t s, cplx& B, CVec& A, double& lam, Vec& g) const {
    const std::size_t ns = sites_.size();
    const auto& counts = box_.counts();
    std::vector<int> base(d_);
    std::vector<std::array<double, 4>> w(d_);
    for (int j = 0; j < d_; ++j) {
      const double u = (k(j) - box_.origin()(j)) / box_.step();
      base[j] = static_cast<int>(std::floor(u));
      if (base[j] < -2 || base[j] > counts[j]) return false;
      w[j] = detail::catmull_rom(u - base[j]);
    }
    B = 0;
    A = CVec::Zero(d_);
    double dlam = 0;
    Vec dg = Vec::Zero(d_);
    std::vector<int> m(d_);
    const int stencil = 1 << (2 * d_);
    for (int c = 0; c < stencil; ++c) {
      double wt = 1;
      bool inside = true;
      int code = c;
      for (int j = 0; j < d_; ++j) {
        const int o = code & 3;
        code >>= 2;
        m[j] = base[j] - 1 + o;
        if (m[j] < 0 || m[j] >= counts[j]) inside = false;
        wt *= w[j][o];
      }
      if (!inside) continue;  // beyond the table the packet vanishes and lambda is free
      const std::size_t i = static_cast<std::size_t>(box_.flat(m));
      const Vec kn = box_.centre(i);
      B += wt * B_[i * ns + s];
      for (int j = 0; j < d_; ++j) {
        A(j) += wt * A_[(i * ns + s) * d_ + j];
        dg(j) += wt * (glam_[i * d_ + j] - 2 * kn(j));
      }
      dlam += wt * (lam_[i] - kn.squaredNorm());
    }
    lam = k.squaredNorm() + dlam;
    g = 2.0 * k + dg;
    return true;
  }

  void build_terms() {
    const std::size_t np = box_.size();
    const std::size_t ns = sites_.size();
    const double w = box_.cell_volume();
    alpha_ = beta_ = gamma_ = norm_diag_ = 0;
    for (std::size_t i = 0; i < np; ++i) {
      const double* g = &glam_[i * d_];
      double g2 = 0;
      for (int j = 0; j < d_; ++j) g2 += g[j] * g[j];
      for (std::size_t s = 0; s < ns; ++s) {
        const cplx b = B_[i * ns + s];
        norm_diag_ += std::norm(b);
        gamma_ += g2 * std::norm(b);
        for (int j = 0; j < d_; ++j) {
          const cplx a = A_[(i * ns + s) * d_ + j];
          alpha_ += std::norm(a);
          beta_ += 2 * g[j] * (std::conj(a) * b).imag();
        }
      }
    }
    alpha_ *= w;
    beta_ *= w;
    gamma_ *= w;
    norm_diag_ *= w;

    // Cross pairs (a, b): sum_k conj(grad G_a(k)) . grad G_b(k + (n_a - n_b).omega).
    const double p0 = peak_[origin_slot_];
    pairs_ = 0;
    CVec Ab(d_);
    Vec gb(d_);
    for (std::size_t a = 0; a < ns; ++a)
      for (std::size_t b = a + 1; b < ns; ++b) {
        if (peak_[a] * peak_[b] < set_.pair_threshold * p0 * p0) continue;
        ++pairs_;
        const Vec shift = site_freq_[a] - site_freq_[b];
        for (std::size_t i = 0; i < np; ++i) {
          const cplx Ba = B_[i * ns + a];
          if (Ba == cplx(0.0)) continue;
          const Vec k = box_.centre(i);
          cplx Bb;
          double lb;
          if (!interpolate(k + shift, b, Bb, Ab, lb, gb)) continue;
          const double* ga = &glam_[i * d_];
          CrossTerm tm{0, 0, 0, 0, lb - lam_[i]};
          cplx ga_Ab = 0, Aa_gb = 0, ga_gb = 0;
          for (int j = 0; j < d_; ++j) {
            const cplx Aa = A_[(i * ns + a) * d_ + j];
            tm.P += std::conj(Aa) * Ab(j);
            ga_Ab += ga[j] * Ab(j);
            Aa_gb += std::conj(Aa) * gb(j);
            ga_gb += ga[j] * gb(j);
          }
          // conj(Aa - i t ga Ba) . (Ab - i t gb Bb) = P + t Q + t^2 R
          tm.Q = cplx(0, 1) * (std::conj(Ba) * ga_Ab - Aa_gb * Bb);
          tm.R = ga_gb * std::conj(Ba) * Bb;
          tm.N = std::conj(Ba) * Bb;
          tm.P *= w;
          tm.Q *= w;
          tm.R *= w;
          tm.N *= w;
          if (std::abs(tm.P) + std::abs(tm.Q) + std::abs(tm.R) + std::abs(tm.N) == 0.0) continue;
          terms_.push_back(tm);
        }
      }
  }

  GaussianProfile F_;
  MomentumTransportSettings set_;
  int d_;
  CellBox box_;
  std::vector<double> lam_, glam_, eta_, vnorm2_;
  std::vector<std::size_t> sites_;
  std::vector<LatticeIndex> site_index_;
  std::vector<Vec> site_freq_;
  std::vector<double> peak_;
  std::size_t origin_slot_ = 0;
  std::vector<cplx> B_, A_;
  std::vector<CrossTerm> terms_;
  std::size_t pairs_ = 0;
  double alpha_ = 0, beta_ = 0, gamma_ = 0, norm_diag_ = 0;
};

// ---------------------------------------------------------------------------
// Transport pipeline

struct TransportSettings {
  MomentumTransportSettings momentum;
  double T0 = 5.0;
  double Tmax = 40.0;
  double dt = 0.02;
  double floor_factor = 1e-3;  // c1 floor in units of ||Psi_0||^2 |grad lambda(k_c)|^2 / 4
};

struct TransportRecord {
  MomentSeries series;
  std::vector<double> T, abel, cesaro, running;
  BetaFit beta, beta_cesaro;
  BallisticVerdict verdict;
  double norm2 = 0.0;
  double grad_norm = 0.0;
  double accepted_fraction = 0.0;
  std::size_t active_sites = 0;
  std::size_t cross_pairs = 0;
};

inline TransportRecord run_transport(const GaussianProfile& F, const PotentialSpec& spec, double coupling,
                                     const TransportSettings& ts = {}, int threads = 1) {
  require(ts.dt > 0 && ts.T0 > 0 && ts.Tmax >= ts.T0, "run_transport: bad time settings");
  const MomentumTransport mt(F, spec, coupling, ts.momentum, threads);
  TransportRecord r;
  const double t_max = 5 * ts.Tmax;
  const auto count = static_cast<std::size_t>(std::ceil(t_max / ts.dt)) + 1;
  r.series = mt.series(t_max / static_cast<double>(count - 1), count);
  r.T = geometric_grid(ts.T0, ts.Tmax);
  const auto env = fit_envelope(r.series);
  for (double T : r.T) {
    r.abel.push_back(abel_mean(r.series, T, env));
    r.cesaro.push_back(cesaro_mean(r.series, T));
  }
  r.running = beta_running(r.T, r.abel);
  r.beta = fit_beta(r.T, r.abel);
  r.beta_cesaro = fit_beta(r.T, r.cesaro);
  r.norm2 = mt.norm2();
  r.grad_norm = mt.grad_norm_at_centre();
  const double floor = ts.floor_factor * r.norm2 * r.grad_norm * r.grad_norm / 4;
  r.verdict = ballistic_check(r.series, r.T, r.abel, ts.T0, ts.Tmax, floor);
  r.accepted_fraction = mt.accepted_fraction();
  r.active_sites = mt.active_sites().size();
  r.cross_pairs = mt.cross_pair_count();
  return r;
}

}  // namespace qplab
