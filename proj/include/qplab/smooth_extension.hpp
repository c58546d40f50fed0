#pragma once

// Mollified cutoffs over flagged momentum cells and the blended dispersion
// lambda_ext(k) = |k|^2 + (lambda(k) - |k|^2) eta(k).

#include <qplab/resonance.hpp>

#include <cmath>
#include <functional>
#include <memory>

namespace qplab {

/// Uniform grid of momentum cells: centres origin + i * step, 0 <= i_j < counts[j].
class CellBox {
 public:
  CellBox() = default;
  CellBox(Vec origin, double step, std::vector<int> counts)
      : origin_(std::move(origin)), step_(step), counts_(std::move(counts)) {
    require(step_ > 0, "CellBox: step must be positive");
    require(static_cast<int>(counts_.size()) == origin_.size(), "CellBox: counts must match dimension");
    total_ = 1;
    for (int c : counts_) {
      require(c >= 1, "CellBox: every axis needs at least one cell");
      total_ *= static_cast<std::size_t>(c);
    }
    flags_.assign(total_, 0);
  }

  /// Square box of half-width `half` (in cells) centred on `centre`.
  static CellBox around(const Vec& centre, double step, int half) {
    std::vector<int> counts(centre.size(), 2 * half + 1);
    return CellBox(centre - Vec::Constant(centre.size(), half * step), step, counts);
  }

  int dim() const { return static_cast<int>(origin_.size()); }
  double step() const { return step_; }
  double cell_volume() const { return std::pow(step_, dim()); }
  std::size_t size() const { return total_; }
  const Vec& origin() const { return origin_; }
  const std::vector<int>& counts() const { return counts_; }

  std::vector<int> multi_index(std::size_t idx) const {
    std::vector<int> m(dim());
    for (int j = dim() - 1; j >= 0; --j) {
      m[j] = static_cast<int>(idx % counts_[j]);
      idx /= counts_[j];
    }
    return m;
  }

  long flat(const std::vector<int>& m) const {
    long idx = 0;
    for (int j = 0; j < dim(); ++j) {
      if (m[j] < 0 || m[j] >= counts_[j]) return -1;
      idx = idx * counts_[j] + m[j];
    }
    return idx;
  }

  Vec centre(std::size_t idx) const {
    const auto m = multi_index(idx);
    Vec c = origin_;
    for (int j = 0; j < dim(); ++j) c(j) += m[j] * step_;
    return c;
  }

  /// Cell whose centre is nearest to k, or -1 outside the box.
  long locate(const Vec& k) const {
    std::vector<int> m(dim());
    for (int j = 0; j < dim(); ++j) m[j] = static_cast<int>(std::lround((k(j) - origin_(j)) / step_));
    return flat(m);
  }

  bool contains(const Vec& k, double margin = 0.0) const {
    for (int j = 0; j < dim(); ++j) {
      const double lo = origin_(j) - 0.5 * step_ - margin;
      const double hi = origin_(j) + (counts_[j] - 0.5) * step_ + margin;
      if (k(j) < lo || k(j) > hi) return false;
    }
    return true;
  }

  bool flag(std::size_t idx) const { return flags_[idx] != 0; }
  void set_flag(std::size_t idx, bool v) { flags_[idx] = v ? 1 : 0; }
  void set_all(bool v) { std::fill(flags_.begin(), flags_.end(), v ? 1 : 0); }
  std::size_t flagged_count() const {
    std::size_t n = 0;
    for (char f : flags_) n += f != 0;
    return n;
  }

 private:
  Vec origin_;
  double step_ = 1.0;
  std::vector<int> counts_;
  std::size_t total_ = 0;
  std::vector<char> flags_;
};

/// Flags every cell whose centre passes `classify`.
inline void flag_nonresonant(CellBox& box, int M, const PotentialSpec& spec, double coupling,
                             const NonResonanceCriterion& crit = {}, int threads = 1) {
  std::vector<char> ok(box.size(), 0);
  parallel_for(box.size(), threads, [&](std::size_t i) {
    ok[i] = classify(box.centre(i), M, spec, coupling, crit).accepted() ? 1 : 0;
  });
  for (std::size_t i = 0; i < box.size(); ++i) box.set_flag(i, ok[i] != 0);
}

/// eta(k) = sum_c chi(c) b(k - c) / sum_c b(k - c) with b(q) = exp(-1 / (1 - |q|^2 / r^2)),
/// r = delta / 2, and chi the indicator of the flagged cells dilated by delta / 2.
/// The bump is renormalized to unit discrete mass at every k, so eta is 1 on the
/// region and vanishes beyond distance delta from it.
class SmoothCutoff {
 public:
  SmoothCutoff() = default;
  SmoothCutoff(CellBox box, double delta) : box_(std::move(box)), delta_(delta), radius_(0.5 * delta) {
    require(delta_ >= 2.0 * box_.step(), "build_cutoff: delta must be at least twice the grid step");
    dilated_.assign(box_.size(), 0);
    const int reach = static_cast<int>(std::floor(radius_ / box_.step() + 1e-12));
    for (std::size_t i = 0; i < box_.size(); ++i) {
      if (!box_.flag(i)) continue;
      const auto m = box_.multi_index(i);
      for_each_offset(reach, [&](const std::vector<int>& off) {
        double r2 = 0;
        std::vector<int> q(m);
        for (int j = 0; j < box_.dim(); ++j) {
          q[j] += off[j];
          r2 += std::pow(off[j] * box_.step(), 2);
        }
        if (r2 > radius_ * radius_ * (1 + 1e-12)) return;
        const long f = box_.flat(q);
        if (f >= 0) dilated_[f] = 1;
      });
    }
  }

  const CellBox& box() const { return box_; }
  double delta() const { return delta_; }

  double value(const Vec& k) const { return eval(k, nullptr); }

  Vec gradient(const Vec& k) const {
    Vec g = Vec::Zero(box_.dim());
    eval(k, &g);
    return g;
  }

  double eval(const Vec& k, Vec* grad) const {
    const int d = box_.dim();
    std::vector<int> lo(d), hi(d);
    for (int j = 0; j < d; ++j) {
      lo[j] = static_cast<int>(std::ceil((k(j) - radius_ - box_.origin()(j)) / box_.step()));
      hi[j] = static_cast<int>(std::floor((k(j) + radius_ - box_.origin()(j)) / box_.step()));
      lo[j] = std::max(lo[j], 0);
      hi[j] = std::min(hi[j], box_.counts()[j] - 1);
      if (lo[j] > hi[j]) {
        if (grad) grad->setZero(d);
        return 0.0;
      }
    }
    double A = 0, B = 0;
    Vec gA = Vec::Zero(d), gB = Vec::Zero(d);
    std::vector<int> m(lo);
    const double r2 = radius_ * radius_;
    while (true) {
      Vec q = k;
      for (int j = 0; j < d; ++j) q(j) -= box_.origin()(j) + m[j] * box_.step();
      const double s = q.squaredNorm() / r2;
      if (s < 1.0) {
        const double b = std::exp(-1.0 / (1.0 - s));
        const bool in = dilated_[box_.flat(m)] != 0;
        B += b;
        if (in) A += b;
        if (grad) {
          const Vec db = b * (-2.0 / (r2 * (1.0 - s) * (1.0 - s))) * q;
          gB += db;
          if (in) gA += db;
        }
      }
      int j = d - 1;
      while (j >= 0 && m[j] == hi[j]) {
        m[j] = lo[j];
        --j;
      }
      if (j < 0) break;
      ++m[j];
    }
    if (B <= 0.0) {
      if (grad) grad->setZero(d);
      return 0.0;
    }
    if (grad) *grad = (gA * B - A * gB) / (B * B);
    return A / B;
  }

  /// True when eta is identically 1 in a neighbourhood of k.
  bool saturated(const Vec& k) const {
    Vec g;
    return eval(k, &g) == 1.0 && g.squaredNorm() == 0.0;
  }

  /// C_m = delta^m max |D^m eta| for m = 1, 2, sampled on a grid `refine` times
  /// finer than the cell grid (second derivatives by differencing the gradient).
  std::pair<double, double> derivative_constants(int refine = 4) const {
    const int d = box_.dim();
    const double h = box_.step() / refine;
    std::vector<int> counts(d);
    for (int j = 0; j < d; ++j) counts[j] = box_.counts()[j] * refine;
    const CellBox fine(box_.origin(), h, counts);
    double g1 = 0, g2 = 0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
      const Vec k = fine.centre(i);
      g1 = std::max(g1, gradient(k).norm());
      for (int j = 0; j < d; ++j) {
        Vec kp = k, km = k;
        kp(j) += 0.5 * h;
        km(j) -= 0.5 * h;
        g2 = std::max(g2, ((gradient(kp) - gradient(km)) / h).norm());
      }
    }
    return {g1 * delta_, g2 * delta_ * delta_};
  }

 private:
  template <typename Fn>
  void for_each_offset(int reach, Fn&& fn) const {
    const int d = box_.dim();
    std::vector<int> off(d, -reach);
    while (true) {
      fn(off);
      int j = d - 1;
      while (j >= 0 && off[j] == reach) off[j--] = -reach;
      if (j < 0) break;
      ++off[j];
    }
  }

  CellBox box_;
  double delta_ = 0.0;
  double radius_ = 0.0;
  std::vector<char> dilated_;
};

inline SmoothCutoff build_cutoff(const CellBox& region, double delta) { return SmoothCutoff(region, delta); }

/// lambda_ext(k) = |k|^2 + (lambda(k) - |k|^2) eta(k) with a fresh eigensolve at k.
class ExtendedDispersion {
 public:
  ExtendedDispersion(PotentialSpec spec, double coupling, int M, SmoothCutoff cutoff, double fd_step = 1e-4)
      : spec_(std::move(spec)), coupling_(coupling), M_(M), cutoff_(std::move(cutoff)), fd_step_(fd_step) {}

  const SmoothCutoff& cutoff() const { return cutoff_; }
  const PotentialSpec& spec() const { return spec_; }
  double coupling() const { return coupling_; }
  int M() const { return M_; }

  /// Max-|v_0| eigenpair of H_M(k), regardless of acceptance.
  ExtractionResult raw_pair(const Vec& k) const { return extract_pair(build_operator(k, M_, spec_, coupling_), 0.0); }

  double lambda(const Vec& k) const {
    check(k);
    const double eta = cutoff_.value(k);
    const double k2 = k.squaredNorm();
    if (eta == 0.0) return k2;
    return k2 + (raw_pair(k).pair.lambda - k2) * eta;
  }

  /// Product rule on the blend with the Hellmann-Feynman gradient of the raw
  /// branch. Falls back to centred differences where that branch is not
  /// plane-wave dominated.
  Vec grad(const Vec& k) const {
    check(k);
    Vec geta;
    const double eta = cutoff_.eval(k, &geta);
    if (eta == 0.0 && geta.squaredNorm() == 0.0) return 2.0 * k;
    const auto r = raw_pair(k);
    if (r.reason == Rejection::DominanceFailure) return fd_grad(k);
    const double k2 = k.squaredNorm();
    return 2.0 * k + (lambda_gradient(r.pair, spec_.freq()) - 2.0 * k) * eta + (r.pair.lambda - k2) * geta;
  }

  /// Exact perturbative Hessian where eta is saturated and the cell accepted,
  /// otherwise centred differences of grad, symmetrized.
  Mat hess(const Vec& k) const {
    check(k);
    const int d = static_cast<int>(k.size());
    const double eta = cutoff_.value(k);
    if (eta == 0.0 && cutoff_.gradient(k).squaredNorm() == 0.0) return 2.0 * Mat::Identity(d, d);
    const long cell = cutoff_.box().locate(k);
    if (cutoff_.saturated(k) && cell >= 0 && cutoff_.box().flag(cell)) {
      const auto op = build_operator(k, M_, spec_, coupling_);
      const auto r = extract_pair(op, 0.0);
      if (r.reason != Rejection::DominanceFailure) return pair_jet(op, r.pair).hessian;
    }
    Mat H(d, d);
    for (int j = 0; j < d; ++j) {
      Vec kp = k, km = k;
      kp(j) += fd_step_;
      km(j) -= fd_step_;
      H.col(j) = (grad(kp) - grad(km)) / (2 * fd_step_);
    }
    return 0.5 * (H + H.transpose());
  }

  /// Blended eigen data: lambda_ext and v_ext = e_0 + eta (v - e_0).
  struct Blend {
    double lambda = 0.0;
    CVec v;
    double eta = 0.0;
    Vec grad_eta;
    ExtractionResult raw;
  };

  Blend blend(const Vec& k) const {
    check(k);
    Blend b;
    b.eta = cutoff_.eval(k, &b.grad_eta);
    const auto op = build_operator(k, M_, spec_, coupling_);
    const long o = op.origin();
    const double k2 = k.squaredNorm();
    if (b.eta == 0.0) {
      b.lambda = k2;
      b.v = CVec::Zero(op.dim());
      b.v(o) = 1.0;
      return b;
    }
    b.raw = extract_pair(op, 0.0);
    b.lambda = k2 + (b.raw.pair.lambda - k2) * b.eta;
    b.v = b.eta * b.raw.pair.v;
    b.v(o) += 1.0 - b.eta;
    return b;
  }

  Vec fd_grad(const Vec& k) const {
    const int d = static_cast<int>(k.size());
    Vec g(d);
    for (int j = 0; j < d; ++j) {
      Vec kp = k, km = k;
      kp(j) += fd_step_;
      km(j) -= fd_step_;
      g(j) = (lambda(kp) - lambda(km)) / (2 * fd_step_);
    }
    return g;
  }

 private:
  void check(const Vec& k) const {
    require(k.size() == spec_.dim(), "ExtendedDispersion: dimension mismatch");
    if (!cutoff_.box().contains(k, cutoff_.delta())) throw PreconditionError("ExtendedDispersion: k outside grid");
  }

  PotentialSpec spec_;
  double coupling_;
  int M_;
  SmoothCutoff cutoff_;
  double fd_step_;
};

}  // namespace qplab
