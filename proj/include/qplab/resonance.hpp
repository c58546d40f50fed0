#pragma once

// Non-resonant set, isoenergetic radii kappa(lambda, nu) and surface statistics.

#include <qplab/lattice_operator.hpp>

#include <cmath>
#include <limits>
#include <optional>

namespace qplab {

/// Acceptance rule for a quasi-momentum. A pair is accepted when its eigenvector
/// is plane-wave dominated (|psi_0|^2 > 1/2), its gap reaches
///   gap_floor(k) = c_gap * coupling * max|V_n| / |k|,
/// and every direct coupling n of the potential has a divisor
///   ||k + n.omega|^2 - |k|^2| >= c_div |k|^(1 - sigma).
struct NonResonanceCriterion {
  double c_gap = 2.0;
  double c_div = 0.1;
  double sigma = 0.0025;
  bool divisor_check = true;

  double gap_floor(const Vec& k, const PotentialSpec& spec, double coupling) const {
    const double r = k.norm();
    if (r == 0.0) return std::numeric_limits<double>::infinity();
    return c_gap * std::abs(coupling) * spec.max_abs_coefficient() / r;
  }

  /// Smallest first-order divisor over the coupling stencil, or +inf when V = 0.
  static double min_divisor(const Vec& k, const PotentialSpec& spec, double coupling) {
    double m = std::numeric_limits<double>::infinity();
    if (coupling == 0.0) return m;
    const double k2 = k.squaredNorm();
    for (const auto& [n, v] : spec.coeffs())
      m = std::min(m, std::abs((k + frequency_of(n, spec.freq())).squaredNorm() - k2));
    return m;
  }

  bool divisors_ok(const Vec& k, const PotentialSpec& spec, double coupling) const {
    if (!divisor_check || coupling == 0.0) return true;
    return min_divisor(k, spec, coupling) >= c_div * std::pow(k.norm(), 1.0 - sigma);
  }
};

/// extract_pair followed by the small-divisor test.
inline ExtractionResult classify(const Vec& k, int M, const PotentialSpec& spec, double coupling,
                                 const NonResonanceCriterion& crit = {}) {
  auto r = extract_pair(build_operator(k, M, spec, coupling), crit.gap_floor(k, spec, coupling));
  if (r.accepted() && !crit.divisors_ok(k, spec, coupling)) r.reason = Rejection::SmallDivisor;
  return r;
}

struct ScanCell {
  Vec k;
  bool accepted = false;
  Rejection reason = Rejection::None;
  double lambda = 0.0;
  double gap = 0.0;
  double dominance = 0.0;
  double u_bound = 0.0;
};

struct NonResonantScan {
  double r_min = 0.0;
  double r_max = 0.0;
  double step = 0.0;
  std::vector<ScanCell> cells;
  double fraction = 0.0;
  double fraction_stderr = 0.0;

  std::size_t accepted_count() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.accepted;
    return n;
  }
};

namespace detail {

inline void finish_scan(NonResonantScan& scan) {
  require(!scan.cells.empty(), "scan: empty cell grid");
  const double n = static_cast<double>(scan.cells.size());
  scan.fraction = static_cast<double>(scan.accepted_count()) / n;
  scan.fraction_stderr = std::sqrt(scan.fraction * (1.0 - scan.fraction) / n);
}

inline void fill_cells(std::vector<ScanCell>& cells, int M, const PotentialSpec& spec, double coupling,
                       const NonResonanceCriterion& crit, int threads) {
  parallel_for(cells.size(), threads, [&](std::size_t i) {
    const auto r = classify(cells[i].k, M, spec, coupling, crit);
    cells[i].accepted = r.accepted();
    cells[i].reason = r.reason;
    cells[i].lambda = r.pair.lambda;
    cells[i].gap = r.pair.gap;
    cells[i].dominance = r.pair.dominance;
    cells[i].u_bound = u_sup_bound(r.pair);
  });
}

inline void check_inner_radius(double r_min, int M, const PotentialSpec& spec) {
  require(r_min > 2.0 * (spec.Q() * M + 1) * spec.freq().max_norm(),
          "scan: inner radius must exceed 2 (Q M + 1) max|omega|");
}

}  // namespace detail

/// Cells of the cubic grid step * Z^d whose centres lie in R_min <= |k| < R_max.
inline NonResonantScan scan_nonresonant(double r_min, double r_max, double step, int M, const PotentialSpec& spec,
                                        double coupling, const NonResonanceCriterion& crit = {},
                                        int threads = 1) {
  require(step > 0, "scan_nonresonant: step must be positive");
  require(r_max > r_min, "scan_nonresonant: empty annulus");
  detail::check_inner_radius(r_min, M, spec);
  NonResonantScan scan{r_min, r_max, step, {}, 0.0, 0.0};
  const int d = spec.dim();
  const int half = static_cast<int>(std::ceil(r_max / step));
  std::vector<int> idx(d, -half);
  while (true) {
    Vec k(d);
    for (int i = 0; i < d; ++i) k(i) = idx[i] * step;
    const double r = k.norm();
    if (r >= r_min && r < r_max) scan.cells.push_back({k});
    int j = d - 1;
    while (j >= 0 && idx[j] == half) idx[j--] = -half;
    if (j < 0) break;
    ++idx[j];
  }
  detail::fill_cells(scan.cells, M, spec, coupling, crit, threads);
  detail::finish_scan(scan);
  return scan;
}

/// Equi-angular (d = 2) or Fibonacci (d = 3) unit directions, one per column.
inline Mat sphere_directions(int d, int count) {
  require(d == 2 || d == 3, "sphere_directions: only d = 2 or 3");
  require(count >= 1, "sphere_directions: need at least one direction");
  Mat out(d, count);
  for (int i = 0; i < count; ++i) {
    if (d == 2) {
      const double phi = 2.0 * kPi * i / count;
      out.col(i) << std::cos(phi), std::sin(phi);
    } else {
      const double z = 1.0 - (2.0 * i + 1.0) / count;
      const double phi = kPi * (3.0 - std::sqrt(5.0)) * i;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      out.col(i) << r * std::cos(phi), r * std::sin(phi), z;
    }
  }
  return out;
}

/// Classification of the points R * nu over a direction set.
inline NonResonantScan scan_sphere(double radius, int n_directions, int M, const PotentialSpec& spec,
                                   double coupling, const NonResonanceCriterion& crit = {}, int threads = 1) {
  detail::check_inner_radius(radius, M, spec);
  const Mat dirs = sphere_directions(spec.dim(), n_directions);
  NonResonantScan scan{radius, radius, 2.0 * kPi * radius / n_directions, {}, 0.0, 0.0};
  for (int i = 0; i < n_directions; ++i) scan.cells.push_back({radius * dirs.col(i)});
  detail::fill_cells(scan.cells, M, spec, coupling, crit, threads);
  detail::finish_scan(scan);
  return scan;
}

enum class KappaFailure { None, DirectionRejected, NewtonDivergence };

inline const char* to_string(KappaFailure f) {
  switch (f) {
    case KappaFailure::None: return "none";
    case KappaFailure::DirectionRejected: return "direction_rejected";
    case KappaFailure::NewtonDivergence: return "newton_divergence";
  }
  return "unknown";
}

struct KappaResult {
  std::optional<double> kappa;
  KappaFailure failure = KappaFailure::None;
  Rejection reason = Rejection::None;
  double residual = 0.0;
  int iterations = 0;
};

inline constexpr double kDefaultLambdaFloor = 50.0;

/// Root of lambda(kappa nu) = lambda_target by Newton with the bisection bracket
/// [sqrt(lambda) - 1, sqrt(lambda) + 1], started at sqrt(lambda). Iterates past the
/// 1e-9 relative acceptance tolerance down to the rounding floor so that the
/// deviation kappa - sqrt(lambda) stays resolved at large lambda.
inline KappaResult kappa(double lambda_target, const Vec& nu, int M, const PotentialSpec& spec, double coupling,
                         const NonResonanceCriterion& crit = {}, double lambda_floor = kDefaultLambdaFloor) {
  require(lambda_target > lambda_floor, "kappa: target energy below the configured floor");
  require(std::abs(nu.norm() - 1.0) < 1e-12, "kappa: direction must be a unit vector");
  const double root = std::sqrt(lambda_target);
  const double tol = 1e-9 * lambda_target;
  const double polish = 1e-13 * lambda_target;
  double lo = root - 1.0, hi = root + 1.0, x = root;
  double best_x = x, best_f = std::numeric_limits<double>::infinity();
  KappaResult out;
  for (int it = 0; it < 60; ++it) {
    out.iterations = it + 1;
    const auto r = extract_pair(build_operator(x * nu, M, spec, coupling), 0.0);
    if (r.reason != Rejection::None) {
      out.failure = KappaFailure::DirectionRejected;
      out.reason = r.reason;
      return out;
    }
    const double f = r.pair.lambda - lambda_target;
    if (std::abs(f) < best_f) {
      best_f = std::abs(f);
      best_x = x;
    }
    if (std::abs(f) <= polish) break;
    (f > 0 ? hi : lo) = x;
    const double slope = nu.dot(lambda_gradient(r.pair, spec.freq()));
    double next = (slope > 0) ? x - f / slope : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo < 4e-16 * root) break;
    x = next;
  }
  out.residual = best_f;
  if (!(best_f < tol)) {
    out.failure = KappaFailure::NewtonDivergence;
    return out;
  }
  const auto c = classify(best_x * nu, M, spec, coupling, crit);
  if (!c.accepted()) {
    out.failure = KappaFailure::DirectionRejected;
    out.reason = c.reason;
    return out;
  }
  out.kappa = best_x;
  return out;
}

struct SurfaceSample {
  Vec nu;
  double phi = 0.0;
  double theta = 0.0;  // polar angle, d = 3 only
  bool accepted = false;
  double kappa = 0.0;
  double deviation = 0.0;  // kappa - sqrt(lambda)
  KappaFailure failure = KappaFailure::None;
  Rejection reason = Rejection::None;
};

struct IsoenergeticSurface {
  double lambda_target = 0.0;
  int dim = 2;
  std::vector<SurfaceSample> samples;
  double good_fraction = 0.0;
  double max_deviation = 0.0;
  double angular_resolution = 0.0;
};

inline IsoenergeticSurface surface(double lambda_target, int n_directions, int M, const PotentialSpec& spec,
                                   double coupling, const NonResonanceCriterion& crit = {}, int threads = 1,
                                   double lambda_floor = kDefaultLambdaFloor) {
  require(n_directions >= 8, "surface: need at least 8 directions");
  require(lambda_target > lambda_floor, "surface: target energy below the configured floor");
  IsoenergeticSurface s;
  s.lambda_target = lambda_target;
  s.dim = spec.dim();
  const Mat dirs = sphere_directions(spec.dim(), n_directions);
  s.samples.resize(n_directions);
  s.angular_resolution = spec.dim() == 2 ? 2.0 * kPi / n_directions : std::sqrt(4.0 * kPi / n_directions);
  parallel_for(s.samples.size(), threads, [&](std::size_t i) {
    auto& smp = s.samples[i];
    smp.nu = dirs.col(i);
    smp.phi = std::atan2(smp.nu(1), smp.nu(0));
    if (spec.dim() == 2) smp.phi = 2.0 * kPi * i / n_directions;
    if (spec.dim() == 3) smp.theta = std::acos(std::clamp(smp.nu(2), -1.0, 1.0));
    const auto r = kappa(lambda_target, smp.nu, M, spec, coupling, crit, lambda_floor);
    smp.failure = r.failure;
    smp.reason = r.reason;
    if (r.kappa) {
      smp.accepted = true;
      smp.kappa = *r.kappa;
      smp.deviation = smp.kappa - std::sqrt(lambda_target);
    }
  });
  std::size_t good = 0;
  for (const auto& smp : s.samples) {
    if (!smp.accepted) continue;
    ++good;
    s.max_deviation = std::max(s.max_deviation, std::abs(smp.deviation));
  }
  s.good_fraction = static_cast<double>(good) / n_directions;
  return s;
}

struct NeighborRejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Centred difference of kappa over the two neighbouring directions (d = 2).
inline double angular_derivative(const IsoenergeticSurface& s, std::size_t index) {
  require(s.dim == 2, "angular_derivative: defined on d = 2 surfaces");
  require(index < s.samples.size(), "angular_derivative: index out of range");
  const std::size_t n = s.samples.size();
  const auto& prev = s.samples[(index + n - 1) % n];
  const auto& next = s.samples[(index + 1) % n];
  if (!prev.accepted || !next.accepted) throw NeighborRejected("angular_derivative: neighbouring direction rejected");
  return (next.kappa - prev.kappa) / (2.0 * s.angular_resolution);
}

}  // namespace qplab
