#pragma once

// Analysis T, synthesis S and the projection E = S T over energy-bounded regions
// of non-resonant momenta.

#include <qplab/field.hpp>
#include <qplab/smooth_extension.hpp>

#include <cmath>

namespace qplab {

/// phi(k) = A exp(-|k - k_c|^2 / (4 s^2)) exp(-i k.x0), the momentum profile of
/// F(x) = A (2 s^2)^{d/2} exp(i k_c.(x - x0)) exp(-s^2 |x - x0|^2).
struct GaussianProfile {
  Vec kc;
  double s = 1.0;
  cplx A = 1.0;
  Vec x0;

  GaussianProfile() = default;
  GaussianProfile(Vec kc_, double s_, cplx A_ = 1.0, Vec x0_ = {})
      : kc(std::move(kc_)), s(s_), A(A_), x0(x0_.size() ? std::move(x0_) : Vec::Zero(kc.size())) {
    require(s > 0, "GaussianProfile: width must be positive");
    require(x0.size() == kc.size(), "GaussianProfile: centre dimensions differ");
  }

  int dim() const { return static_cast<int>(kc.size()); }

  cplx operator()(const Vec& k) const {
    return A * std::exp(-(k - kc).squaredNorm() / (4 * s * s)) * std::polar(1.0, -k.dot(x0));
  }

  /// Componentwise d phi / d k.
  CVec gradient(const Vec& k) const {
    const cplx v = (*this)(k);
    CVec g(dim());
    for (int j = 0; j < dim(); ++j) g(j) = v * cplx(-(k(j) - kc(j)) / (2 * s * s), -x0(j));
    return g;
  }

  cplx real_space(const Vec& x) const {
    const Vec y = x - x0;
    return A * std::pow(2 * s * s, 0.5 * dim()) * std::polar(std::exp(-s * s * y.squaredNorm()), kc.dot(y));
  }

  /// Free Schrodinger evolution exp(i t Delta) applied to real_space.
  cplx free_evolved(const Vec& x, double t) const {
    cplx out = A * std::pow(2 * kPi, -0.5 * dim());
    const cplx a(1.0 / (4 * s * s), t);
    for (int j = 0; j < dim(); ++j) {
      const double b = x(j) - x0(j) - 2 * kc(j) * t;
      out *= std::sqrt(kPi / a) * std::exp(-b * b / (4.0 * a));
    }
    return out * std::polar(1.0, kc.dot(x - x0) - kc.squaredNorm() * t);
  }

  double norm2() const { return std::norm(A) * std::pow(2 * kPi * s * s, 0.5 * dim()); }
};

inline FieldState sample(const GaussianProfile& g, const SpatialGrid& grid) {
  FieldState f(grid);
  for (std::size_t i = 0; i < f.values.size(); ++i) f.values[i] = g.real_space(grid.point(i));
  return f;
}

/// Cell of a projection region: momentum, dispersion value and coefficients of
/// U(k, x) = sum_n v_n e^{i(k + n.omega).x}. eta weights the cell in packets.
struct RegionCell {
  std::size_t box_index = 0;
  Vec k;
  double lambda = 0.0;
  CVec v;
  double eta = 1.0;
  bool accepted = true;
};

/// Flagged cells of an aligned box together with their eigen data. The box step
/// must be the dual step 2 pi / L of the synthesis grid and its origin a multiple
/// of it, so that every cell centre is a DFT frequency.
struct ProjectionRegion {
  CellBox box;
  int l = 0;
  int M = 0;
  std::vector<LatticeIndex> sites;
  std::vector<Vec> site_freq;
  std::vector<RegionCell> cells;
  double lambda_floor = -std::numeric_limits<double>::infinity();
  double lambda_cap = std::numeric_limits<double>::infinity();

  double weight() const { return box.cell_volume(); }
  bool empty() const { return cells.empty(); }
};

/// Box of cells on the dual lattice of `grid`, centred near `centre`, covering the
/// ball of radius `radius`.
inline CellBox aligned_box(const SpatialGrid& grid, const Vec& centre, double radius) {
  const double h = grid.dk();
  const int half = static_cast<int>(std::ceil(radius / h));
  Vec origin(centre.size());
  for (int j = 0; j < centre.size(); ++j) origin(j) = (std::lround(centre(j) / h) - half) * h;
  return CellBox(origin, h, std::vector<int>(centre.size(), 2 * half + 1));
}

namespace detail {

inline void attach_sites(ProjectionRegion& r, const PotentialSpec& spec, int M) {
  r.l = spec.count();
  r.M = M;
  const LatticeWindow w(r.l, M);
  for (std::size_t i = 0; i < w.size(); ++i) {
    r.sites.push_back(w.site(i));
    r.site_freq.push_back(frequency_of(r.sites.back(), spec.freq()));
  }
}

}  // namespace detail

/// Accepted cells with lambda_floor <= lambda(k) < lambda_cap, optionally
/// restricted to a momentum ball.
inline ProjectionRegion build_region(const CellBox& box, int M, const PotentialSpec& spec, double coupling,
                                     const NonResonanceCriterion& crit = {}, double lambda_floor = -1e300,
                                     double lambda_cap = 1e300, int threads = 1, const Vec* ball_centre = nullptr,
                                     double ball_radius = 0.0) {
  ProjectionRegion r;
  r.box = box;
  r.lambda_floor = lambda_floor;
  r.lambda_cap = lambda_cap;
  detail::attach_sites(r, spec, M);
  std::vector<std::optional<RegionCell>> slots(box.size());
  parallel_for(box.size(), threads, [&](std::size_t i) {
    const Vec k = box.centre(i);
    if (ball_centre && (k - *ball_centre).norm() > ball_radius) return;
    const auto res = classify(k, M, spec, coupling, crit);
    if (!res.accepted()) return;
    if (res.pair.lambda < lambda_floor || res.pair.lambda >= lambda_cap) return;
    slots[i] = RegionCell{i, k, res.pair.lambda, res.pair.v, 1.0, true};
  });
  for (std::size_t i = 0; i < slots.size(); ++i) {
    r.box.set_flag(i, slots[i].has_value());
    if (slots[i]) r.cells.push_back(std::move(*slots[i]));
  }
  return r;
}

/// Same cells with the free eigen data v = e_0, lambda = |k|^2.
inline ProjectionRegion free_copy(const ProjectionRegion& r) {
  ProjectionRegion f = r;
  const long origin = LatticeWindow(r.l, r.M).index(LatticeIndex(r.l, 0));
  for (auto& c : f.cells) {
    c.v = CVec::Zero(c.v.size());
    c.v(origin) = 1.0;
    c.lambda = c.k.squaredNorm();
  }
  return f;
}

/// Complex coefficients on the cells of a region.
struct CoefficientField {
  std::vector<cplx> values;

  double norm(const ProjectionRegion& r) const {
    double s = 0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * r.weight());
  }
};

/// (T F)(k) = sum_n conj(v_n) phi(k + n.omega), exact for the Gaussian family.
inline CoefficientField forward_transform(const GaussianProfile& F, const ProjectionRegion& r) {
  require(!r.empty(), "forward_transform: region is empty");
  CoefficientField out;
  out.values.resize(r.cells.size());
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    cplx s = 0;
    const auto& cell = r.cells[c];
    for (std::size_t n = 0; n < r.sites.size(); ++n)
      if (cell.v(n) != cplx(0.0)) s += std::conj(cell.v(n)) * F(cell.k + r.site_freq[n]);
    out.values[c] = s;
  }
  return out;
}

namespace detail {

inline std::vector<long> cell_bins(const ProjectionRegion& r, const SpatialGrid& g, std::vector<int>* parity) {
  const double h = g.dk();
  require(std::abs(r.box.step() - h) < 1e-12 * h, "synthesize: region box is not aligned with the grid");
  std::vector<long> bins(r.cells.size());
  if (parity) parity->resize(r.cells.size());
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    long idx = 0;
    int par = 0;
    for (int j = 0; j < g.d; ++j) {
      const long m = std::lround(r.cells[c].k(j) / h);
      require(std::abs(r.cells[c].k(j) - m * h) < 1e-9 * h, "synthesize: cell centre off the dual lattice");
      require(std::abs(m) < g.N / 2, "synthesize: cell beyond the grid Nyquist frequency");
      idx = idx * g.N + ((m % g.N) + g.N) % g.N;
      par += static_cast<int>(std::abs(m) % 2);
    }
    bins[c] = idx;
    if (parity) (*parity)[c] = par % 2;
  }
  return bins;
}

inline void nyquist_guard(const ProjectionRegion& r, const SpatialGrid& g, const std::vector<std::size_t>& active) {
  double kmax = 0;
  for (const auto& c : r.cells) kmax = std::max(kmax, c.k.norm());
  double wmax = 0;
  for (std::size_t n : active) wmax = std::max(wmax, r.site_freq[n].norm());
  guard(kmax + wmax < g.k_nyquist(), "synthesize: grid undersamples the region (Nyquist guard)");
}

/// Lattice sites carrying non-negligible weight in f v_n.
inline std::vector<std::size_t> active_sites(const ProjectionRegion& r, const std::vector<cplx>& f) {
  std::vector<double> peak(r.sites.size(), 0.0);
  double top = 0;
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    const double a = std::abs(f[c]);
    for (std::size_t n = 0; n < r.sites.size(); ++n) peak[n] = std::max(peak[n], a * std::abs(r.cells[c].v(n)));
    top = std::max(top, a);
  }
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < r.sites.size(); ++n)
    if (peak[n] > 1e-15 * top && peak[n] > 0) out.push_back(n);
  return out;
}

}  // namespace detail

/// (S f)(x) = (2 pi)^{-d/2} sum_cells w f(k) U(k, x), one inverse FFT per lattice site.
inline FieldState synthesize(const CoefficientField& f, const ProjectionRegion& r, const SpatialGrid& g,
                             double time = 0.0) {
  require(f.values.size() == r.cells.size(), "synthesize: field does not match region");
  FieldState out(g, time);
  if (r.cells.empty()) return out;
  std::vector<int> parity;
  const auto bins = detail::cell_bins(r, g, &parity);
  const auto active = detail::active_sites(r, f.values);
  if (active.empty()) return out;
  detail::nyquist_guard(r, g, active);
  FftPlan plan(g, FFTW_BACKWARD);
  const double pref = std::pow(2 * kPi, -0.5 * g.d) * r.weight();
  std::vector<cplx> buf(g.size());
  for (std::size_t n : active) {
    std::fill(buf.begin(), buf.end(), cplx(0.0));
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const cplx val = pref * f.values[c] * r.cells[c].v(n);
      buf[bins[c]] += parity[c] ? -val : val;
    }
    plan.execute(buf);
    const Vec& w = r.site_freq[n];
    const bool zero = w.squaredNorm() == 0.0;
    for (std::size_t i = 0; i < buf.size(); ++i)
      out.values[i] += zero ? buf[i] : buf[i] * std::polar(1.0, w.dot(g.point(i)));
  }
  return out;
}

/// (T F)(k) for a sampled field: F^(k + n.omega) from one forward FFT of F e^{-i n.omega x}
/// per lattice site.
inline CoefficientField forward_transform(const FieldState& F, const ProjectionRegion& r) {
  require(!r.empty(), "forward_transform: region is empty");
  const auto& g = F.grid;
  std::vector<int> parity;
  const auto bins = detail::cell_bins(r, g, &parity);
  std::vector<cplx> ones(r.cells.size(), 1.0);
  const auto active = detail::active_sites(r, ones);
  detail::nyquist_guard(r, g, active);
  FftPlan plan(g, FFTW_FORWARD);
  const double pref = std::pow(2 * kPi, -0.5 * g.d) * g.cell_volume();
  CoefficientField out;
  out.values.assign(r.cells.size(), 0.0);
  std::vector<cplx> buf(g.size());
  for (std::size_t n : active) {
    const Vec& w = r.site_freq[n];
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = F.values[i] * std::polar(1.0, -w.dot(g.point(i)));
    plan.execute(buf);
    for (std::size_t c = 0; c < r.cells.size(); ++c) {
      const cplx fhat = pref * (parity[c] ? -buf[bins[c]] : buf[bins[c]]);
      out.values[c] += std::conj(r.cells[c].v(n)) * fhat;
    }
  }
  return out;
}

inline FieldState apply_projection(const GaussianProfile& F, const ProjectionRegion& r, const SpatialGrid& g) {
  return synthesize(forward_transform(F, r), r, g);
}

inline FieldState apply_projection(const FieldState& F, const ProjectionRegion& r) {
  return synthesize(forward_transform(F, r), r, F.grid);
}

struct ParsevalResult {
  double lhs = 0.0;  // ||E F||^2
  double rhs = 0.0;  // sum_cells w |(T F)(k)|^2
  double relerr = 0.0;
};

inline ParsevalResult parseval_check(const GaussianProfile& F, const ProjectionRegion& r, const SpatialGrid& g) {
  const auto f = forward_transform(F, r);
  ParsevalResult p;
  p.lhs = std::pow(synthesize(f, r, g).norm(), 2);
  p.rhs = std::pow(f.norm(r), 2);
  const double scale = std::max(p.lhs, p.rhs);
  p.relerr = scale > 0 ? std::abs(p.lhs - p.rhs) / scale : 0.0;
  return p;
}

/// ||E F - F* chi F F|| / ||F||, both projections on the same cells.
inline double compare_free_projection(const GaussianProfile& F, const ProjectionRegion& r, const SpatialGrid& g) {
  const auto free_r = free_copy(r);
  const FieldState a = apply_projection(F, r, g);
  const FieldState b = apply_projection(F, free_r, g);
  return l2_distance(a, b) / std::sqrt(F.norm2());
}

}  // namespace qplab
