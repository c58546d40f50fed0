#pragma once

// Complex fields on a periodic spatial box and FFTW plumbing.

#include <qplab/core.hpp>

#include <fftw3.h>

#include <memory>
#include <mutex>

namespace qplab {

/// N^d points x_j = -L/2 + j L / N per axis; the origin sits at index N/2. Row-major,
/// last axis fastest.
struct SpatialGrid {
  int d = 2;
  int N = 0;
  double L = 0.0;

  SpatialGrid() = default;
  SpatialGrid(int d_, int N_, double L_) : d(d_), N(N_), L(L_) {
    require(d >= 1 && d <= 3, "SpatialGrid: dimension must be 1, 2 or 3");
    require(N >= 4 && N % 2 == 0, "SpatialGrid: N must be even and >= 4");
    require(L > 0, "SpatialGrid: L must be positive");
  }

  /// Box whose Nyquist momentum pi / dx equals k_nyquist.
  static SpatialGrid with_nyquist(int d, int N, double k_nyquist) {
    return SpatialGrid(d, N, N * kPi / k_nyquist);
  }

  double dx() const { return L / N; }
  double dk() const { return 2.0 * kPi / L; }
  double k_nyquist() const { return kPi / dx(); }
  double cell_volume() const { return std::pow(dx(), d); }
  std::size_t size() const {
    std::size_t s = 1;
    for (int j = 0; j < d; ++j) s *= static_cast<std::size_t>(N);
    return s;
  }

  Vec point(std::size_t idx) const {
    Vec x(d);
    for (int j = d - 1; j >= 0; --j) {
      x(j) = -0.5 * L + static_cast<double>(idx % N) * dx();
      idx /= N;
    }
    return x;
  }

  /// Signed frequency index of FFT bin b along one axis.
  int signed_bin(int b) const { return b < N / 2 ? b : b - N; }
};

struct FieldState {
  SpatialGrid grid;
  std::vector<cplx> values;
  double time = 0.0;

  FieldState() = default;
  explicit FieldState(const SpatialGrid& g, double t = 0.0) : grid(g), values(g.size(), 0.0), time(t) {}

  double norm() const {
    double s = 0;
    for (const auto& v : values) s += std::norm(v);
    return std::sqrt(s * grid.cell_volume());
  }

  cplx inner(const FieldState& other) const {
    require(other.values.size() == values.size(), "FieldState: grid mismatch");
    cplx s = 0;
    for (std::size_t i = 0; i < values.size(); ++i) s += std::conj(values[i]) * other.values[i];
    return s * grid.cell_volume();
  }

  FieldState& operator-=(const FieldState& o) {
    require(o.values.size() == values.size(), "FieldState: grid mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) values[i] -= o.values[i];
    return *this;
  }

  friend FieldState operator-(FieldState a, const FieldState& b) { return a -= b; }
};

inline double l2_distance(const FieldState& a, const FieldState& b) { return (a - b).norm(); }

/// ||X psi||^2 = int |x|^2 |psi|^2 dx by grid quadrature.
inline double second_moment(const FieldState& s) {
  double m = 0;
  for (std::size_t i = 0; i < s.values.size(); ++i) m += s.grid.point(i).squaredNorm() * std::norm(s.values[i]);
  return m * s.grid.cell_volume();
}

namespace detail {
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Unnormalized in-place d-dimensional DFT of a fixed size. Plans are built with
/// FFTW_ESTIMATE so results do not depend on timing measurements.
class FftPlan {
 public:
  FftPlan(const SpatialGrid& g, int sign) : size_(g.size()) {
    buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
    std::vector<int> n(g.d, g.N);
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    plan_ = fftw_plan_dft(g.d, n.data(), buffer_, buffer_, sign, FFTW_ESTIMATE);
    guard(plan_ != nullptr, "FftPlan: FFTW could not build a plan");
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buffer_);
  }

  void execute(std::vector<cplx>& data) {
    require(data.size() == size_, "FftPlan: size mismatch");
    std::copy(data.begin(), data.end(), reinterpret_cast<cplx*>(buffer_));
    fftw_execute(plan_);
    std::copy(reinterpret_cast<cplx*>(buffer_), reinterpret_cast<cplx*>(buffer_) + size_, data.begin());
  }

 private:
  std::size_t size_;
  fftw_complex* buffer_ = nullptr;
  fftw_plan plan_ = nullptr;
};

}  // namespace qplab
