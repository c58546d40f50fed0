#pragma once

// Stationary points of <k, z> - lambda(k) and the oscillatory integrals that
// describe a packet along the ray x = z t.

#include <qplab/smooth_extension.hpp>

#include <functional>
#include <memory>

namespace qplab {

/// lambda with its first two derivatives.
struct Dispersion {
  std::function<double(const Vec&)> lambda;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
};

inline Dispersion free_dispersion() {
  return {[](const Vec& k) { return k.squaredNorm(); }, [](const Vec& k) -> Vec { return 2.0 * k; },
          [](const Vec& k) -> Mat { return 2.0 * Mat::Identity(k.size(), k.size()); }};
}

inline Dispersion extended_dispersion(std::shared_ptr<const ExtendedDispersion> ext) {
  return {[ext](const Vec& k) { return ext->lambda(k); }, [ext](const Vec& k) { return ext->grad(k); },
          [ext](const Vec& k) { return ext->hess(k); }};
}

/// Extension of lambda on a flagged box around `centre` (step, half-width in cells).
inline std::shared_ptr<const ExtendedDispersion> local_extension(const PotentialSpec& spec, double coupling, int M,
                                                                 const Vec& centre, double step = 0.25, int half = 8,
                                                                 double delta = 0.5,
                                                                 const NonResonanceCriterion& crit = {},
                                                                 int threads = 1) {
  CellBox box = CellBox::around(centre, step, half);
  flag_nonresonant(box, M, spec, coupling, crit, threads);
  return std::make_shared<const ExtendedDispersion>(spec, coupling, M, build_cutoff(box, delta));
}

struct PhasePoint {
  Vec z;
  Vec k0;
  Mat hessian;  // Hess lambda(k0)
  double residual = 0.0;
  int iterations = 0;
};

/// Newton solve of grad lambda(k) = z started at z / 2.
inline PhasePoint stationary_point(const Vec& z, const Dispersion& disp, double lambda_star = 0.0,
                                   int max_iter = 40) {
  require(z.squaredNorm() > lambda_star, "stationary_point: |z|^2 must exceed lambda_*");
  PhasePoint p;
  p.z = z;
  p.k0 = 0.5 * z;
  const double scale = std::max(1.0, z.norm());
  for (p.iterations = 0; p.iterations < max_iter; ++p.iterations) {
    const Vec r = disp.grad(p.k0) - z;
    p.residual = r.norm();
    if (p.residual < 1e-13 * scale) break;
    const Vec step = disp.hess(p.k0).ldlt().solve(r);
    guard(step.allFinite(), "stationary_point: singular Hessian");
    p.k0 -= step;
    guard(step.norm() < 1.0 + scale, "stationary_point: Newton step diverged");
  }
  p.residual = (disp.grad(p.k0) - z).norm();
  guard(p.residual < 1e-9, "stationary_point: Newton did not converge");
  p.hessian = disp.hess(p.k0);
  return p;
}

namespace detail {

inline double smooth_step_core(double x) { return x > 0 ? std::exp(-1.0 / x) : 0.0; }

}  // namespace detail

/// 1 - eta_hat: one for |k - k0| <= 1, zero for |k - k0| >= 2, smooth in between.
inline double inner_window(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  const double a = detail::smooth_step_core(2.0 - r), b = detail::smooth_step_core(r - 1.0);
  return a / (a + b);
}

struct OscillatoryResult {
  cplx value = 0.0;
  double error = 0.0;  // difference between the last two refinements
  double step = 0.0;
  int refinements = 0;
};

/// (2 pi)^{-d/2} int_{|k - k0| < 2} e^{i t (<k, z> - lambda(k))} g3(k) (1 - eta_hat(k)) dk by the
/// trapezoid rule on k0 + h Z^d, halving h until two levels agree to rel_tol.
inline OscillatoryResult oscillatory_integral(double t, const PhasePoint& p, const std::function<cplx(const Vec&)>& g3,
                                              const Dispersion& disp, double rel_tol = 1e-6,
                                              double max_points = 4e8) {
  require(t > 0, "oscillatory_integral: t must be positive");
  const int d = static_cast<int>(p.k0.size());
  const double lam0 = disp.lambda(p.k0);

  // Largest phase gradient on a coarse sample of the ball fixes the first step.
  double gmax = 1e-12;
  const int coarse = 16;
  for (long i = 0; i < std::lround(std::pow(2 * coarse + 1, d)); ++i) {
    Vec q(d);
    long c = i;
    for (int j = 0; j < d; ++j) {
      q(j) = 2.0 * static_cast<double>(c % (2 * coarse + 1) - coarse) / coarse;
      c /= 2 * coarse + 1;
    }
    if (q.norm() >= 2.0) continue;
    gmax = std::max(gmax, (p.z - disp.grad(p.k0 + q)).norm());
  }
  double h = 0.5 / (t * gmax);
  int n = static_cast<int>(std::ceil(2.0 / h));
  h = 2.0 / n;
  guard(std::pow(2.0 * n + 1, d) * 4.0 <= max_points, "oscillatory_integral: phase resolution needs too many points");

  auto integrand = [&](const Vec& q) -> cplx {
    const double w = inner_window(q.norm());
    if (w == 0.0) return 0.0;
    const Vec k = p.k0 + q;
    const double phase = q.dot(p.z) - (disp.lambda(k) - lam0);
    return w * g3(k) * std::polar(1.0, t * phase);
  };

  // Sum of the integrand over lattice points h m with |m|_inf <= n, optionally only
  // those with at least one odd coordinate.
  auto lattice_sum = [&](int nn, double hh, bool odd_only) {
    cplx s = 0;
    std::vector<int> m(d, -nn);
    while (true) {
      bool odd = false;
      for (int j = 0; j < d; ++j) odd |= (m[j] % 2 != 0);
      if (!odd_only || odd) {
        Vec q(d);
        for (int j = 0; j < d; ++j) q(j) = hh * m[j];
        s += integrand(q);
      }
      int j = d - 1;
      while (j >= 0 && m[j] == nn) m[j--] = -nn;
      if (j < 0) break;
      ++m[j];
    }
    return s;
  };

  const cplx base_phase = std::polar(std::pow(2 * kPi, -0.5 * d), t * (p.k0.dot(p.z) - lam0));
  cplx sum = lattice_sum(n, h, false);
  OscillatoryResult out;
  out.value = base_phase * sum * std::pow(h, d);
  out.step = h;
  for (int level = 1; level <= 4; ++level) {
    if (std::pow(4.0 * n + 1, d) > max_points) break;
    n *= 2;
    h *= 0.5;
    sum += lattice_sum(n, h, true);
    const cplx next = base_phase * sum * std::pow(h, d);
    out.error = std::abs(next - out.value);
    out.value = next;
    out.step = h;
    out.refinements = level;
    if (out.error <= rel_tol * std::abs(next) || next == cplx(0.0)) break;
  }
  return out;
}

/// Leading stationary-phase term t^{-d/2} |det Hess lambda|^{-1/2} e^{i pi sgn / 4}
/// e^{i t (<k0, z> - lambda(k0))} g3(k0), sgn the signature of -Hess lambda.
inline cplx asymptotic_leading(double t, const PhasePoint& p, const std::function<cplx(const Vec&)>& g3,
                               const Dispersion& disp) {
  require(t > 0, "asymptotic_leading: t must be positive");
  const int d = static_cast<int>(p.k0.size());
  Eigen::SelfAdjointEigenSolver<Mat> es(p.hessian);
  const Vec ev = es.eigenvalues();
  guard(ev.cwiseAbs().minCoeff() > 1e-8, "asymptotic_leading: singular Hessian");
  int sgn = 0;
  for (int j = 0; j < d; ++j) sgn += ev(j) > 0 ? -1 : 1;
  const double det = std::abs(ev.prod());
  const double phase = t * (p.k0.dot(p.z) - disp.lambda(p.k0)) + kPi * sgn / 4.0;
  return std::pow(t, -0.5 * d) / std::sqrt(det) * std::polar(1.0, phase) * g3(p.k0);
}

/// (2 pi)^{-d/2} int e^{i t (<k, z> - |k|^2)} A exp(-|k - kg|^2 / (4 s^2)) dk over R^d.
inline cplx gaussian_fresnel(double t, const Vec& z, cplx A, const Vec& kg, double s) {
  const cplx a(1.0 / (4 * s * s), t);
  cplx out = A * std::pow(2 * kPi, -0.5 * z.size());
  for (int j = 0; j < z.size(); ++j) {
    const cplx b(kg(j) / (2 * s * s), t * z(j));
    out *= std::sqrt(kPi / a) * std::exp(b * b / (4.0 * a) - kg(j) * kg(j) / (4 * s * s));
  }
  return out;
}

/// Diagnostic size of the stationary-phase remainder: sum over |m| <= d + 3 of
/// sup_{|k - k0| < 2} |D^m g3|, derivatives by nested central differences.
inline double remainder_diagnostic(const PhasePoint& p, const std::function<cplx(const Vec&)>& g3, double h = 0.02,
                                   int samples = 9) {
  const int d = static_cast<int>(p.k0.size());
  const int order = d + 3;
  // Multi-indices with |m| <= order.
  std::vector<std::vector<int>> indices;
  std::vector<int> m(d, 0);
  while (true) {
    int s = 0;
    for (int v : m) s += v;
    if (s <= order) indices.push_back(m);
    int j = d - 1;
    while (j >= 0 && m[j] == order) m[j--] = 0;
    if (j < 0) break;
    ++m[j];
  }
  auto derivative = [&](const Vec& k, const std::vector<int>& mi) {
    // Product of binomial stencils (Delta_h)^{m_j} / h^{m_j}, centred.
    cplx acc = 0;
    std::vector<int> c(d, 0);
    while (true) {
      double w = 1;
      Vec q = k;
      for (int j = 0; j < d; ++j) {
        double binom = 1;
        for (int r = 0; r < c[j]; ++r) binom = binom * (mi[j] - r) / (r + 1);
        w *= binom * (((mi[j] - c[j]) % 2) ? -1.0 : 1.0);
        q(j) += h * (c[j] - 0.5 * mi[j]);
      }
      acc += w * g3(q);
      int j = d - 1;
      while (j >= 0 && c[j] == mi[j]) c[j--] = 0;
      if (j < 0) break;
      ++c[j];
    }
    int total = 0;
    for (int v : mi) total += v;
    return std::abs(acc) / std::pow(h, total);
  };
  double sum = 0;
  for (const auto& mi : indices) {
    double sup = 0;
    std::vector<int> s(d, -samples);
    while (true) {
      Vec q(d);
      for (int j = 0; j < d; ++j) q(j) = 2.0 * s[j] / (samples + 1);
      if (q.norm() < 2.0) sup = std::max(sup, derivative(p.k0 + q, mi));
      int j = d - 1;
      while (j >= 0 && s[j] == samples) s[j--] = -samples;
      if (j < 0) break;
      ++s[j];
    }
    sum += sup;
  }
  return sum;
}

}  // namespace qplab
