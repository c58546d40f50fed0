#pragma once

// Quasi-periodic potentials V(x) = sum_{|n|<=Q} V_n exp(i <n.omega, x>) and the
// frequency arithmetic on Z^l.

#include <qplab/core.hpp>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <utility>

namespace qplab {

/// Basic frequencies omega_1..omega_l in R^d, stored column-wise (d x l).
class FrequencyVector {
 public:
  FrequencyVector() = default;

  explicit FrequencyVector(Mat omega) : omega_(std::move(omega)) {
    require(dim() >= 2, "FrequencyVector: spatial dimension must be >= 2");
    require(count() > dim(), "FrequencyVector: need l > d basic frequencies");
    for (Eigen::Index j = 0; j < omega_.cols(); ++j)
      for (Eigen::Index i = 0; i < omega_.rows(); ++i)
        require(std::abs(omega_(i, j)) <= 0.5, "FrequencyVector: components must lie in [-1/2, 1/2]");
  }

  int dim() const { return static_cast<int>(omega_.rows()); }
  int count() const { return static_cast<int>(omega_.cols()); }
  const Mat& matrix() const { return omega_; }
  Vec omega(int j) const { return omega_.col(j); }
  double max_norm() const { return omega_.colwise().norm().maxCoeff(); }

 private:
  Mat omega_;
};

/// Uniform draw of l vectors in [-1/2, 1/2]^d from a 64-bit Mersenne twister.
/// The double is built from the top 53 bits so the stream is portable.
inline FrequencyVector sample_frequencies(std::uint64_t seed, int d, int l) {
  require(d >= 2, "sample_frequencies: d must be >= 2");
  require(l > d, "sample_frequencies: l must exceed d");
  std::mt19937_64 gen(seed);
  Mat om(d, l);
  for (int j = 0; j < l; ++j)
    for (int i = 0; i < d; ++i) om(i, j) = static_cast<double>(gen() >> 11) * 0x1.0p-53 - 0.5;
  return FrequencyVector(std::move(om));
}

/// n.omega = sum_j n_j omega_j.
inline Vec frequency_of(const LatticeIndex& n, const FrequencyVector& freq) {
  require(static_cast<int>(n.size()) == freq.count(), "frequency_of: index length must equal l");
  Vec out = Vec::Zero(freq.dim());
  for (int j = 0; j < freq.count(); ++j)
    if (n[j] != 0) out += n[j] * freq.matrix().col(j);
  return out;
}

/// True when n is the representative of {n, -n}: first nonzero entry positive.
inline bool is_canonical(const LatticeIndex& n) {
  for (int v : n)
    if (v != 0) return v > 0;
  return false;
}

/// All n with |n| == shell in lexicographic order.
inline std::vector<LatticeIndex> lattice_shell(int l, int shell) {
  std::vector<LatticeIndex> out;
  LatticeIndex n(l, -shell);
  while (true) {
    if (sup_norm(n) == shell) out.push_back(n);
    int j = l - 1;
    while (j >= 0 && n[j] == shell) n[j--] = -shell;
    if (j < 0) break;
    ++n[j];
  }
  return out;
}

struct DiophantineMargin {
  LatticeIndex worst_n;
  double margin = 0.0;
};

/// min over 0 < |n| <= N of |n.omega| |n|^tau. A finite-window diagnostic only.
/// Shells are visited in increasing |n| and ties keep the first hit.
inline DiophantineMargin diophantine_margin(const FrequencyVector& freq, int N, double tau) {
  require(N >= 1, "diophantine_margin: N must be >= 1");
  require(tau > 0, "diophantine_margin: tau must be positive");
  DiophantineMargin best;
  best.margin = std::numeric_limits<double>::infinity();
  for (int s = 1; s <= N; ++s) {
    const double weight = std::pow(static_cast<double>(s), tau);
    for (const auto& n : lattice_shell(freq.count(), s)) {
      if (!is_canonical(n)) continue;
      const double m = frequency_of(n, freq).norm() * weight;
      if (m < best.margin) {
        best.margin = m;
        best.worst_n = n;
      }
    }
  }
  return best;
}

/// Finite Fourier data of a real quasi-periodic potential. Both members of every
/// +-n pair are stored; V_0 is always zero.
class PotentialSpec {
 public:
  using Coeffs = std::map<LatticeIndex, cplx>;

  PotentialSpec() = default;

  /// Entries may list one or both members of a pair; missing mirrors are filled
  /// in by conjugation, inconsistent mirrors are rejected.
  PotentialSpec(FrequencyVector freq, int Q, const std::vector<std::pair<LatticeIndex, cplx>>& entries)
      : freq_(std::move(freq)), Q_(Q) {
    require(Q >= 1, "PotentialSpec: Q must be a positive integer");
    for (const auto& [n, v] : entries) {
      require(static_cast<int>(n.size()) == freq_.count(), "PotentialSpec: index length must equal l");
      require(sup_norm(n) <= Q, "PotentialSpec: coefficient outside |n| <= Q");
      if (sup_norm(n) == 0) {
        require(v == cplx(0.0), "PotentialSpec: V_0 must be zero");
        continue;
      }
      insert_checked(n, v);
      insert_checked(negate(n), std::conj(v));
    }
    // Drop exact zeros so the coupling stencil reflects the true support.
    for (auto it = coeffs_.begin(); it != coeffs_.end();)
      it = (it->second == cplx(0.0)) ? coeffs_.erase(it) : std::next(it);
  }

  const FrequencyVector& freq() const { return freq_; }
  int Q() const { return Q_; }
  int dim() const { return freq_.dim(); }
  int count() const { return freq_.count(); }
  const Coeffs& coeffs() const { return coeffs_; }

  cplx coefficient(const LatticeIndex& n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? cplx(0.0) : it->second;
  }

  double max_abs_coefficient() const {
    double m = 0;
    for (const auto& [n, v] : coeffs_) m = std::max(m, std::abs(v));
    return m;
  }

  /// sup_x |V(x)| <= sum |V_n|.
  double sup_bound() const {
    double s = 0;
    for (const auto& [n, v] : coeffs_) s += std::abs(v);
    return s;
  }

 private:
  void insert_checked(const LatticeIndex& n, cplx v) {
    auto [it, fresh] = coeffs_.emplace(n, v);
    if (!fresh) {
      const double scale = std::max(1.0, std::abs(v));
      if (std::abs(it->second - v) > 1e-14 * scale)
        throw PreconditionError("PotentialSpec: Hermitian symmetry V_{-n} = conj(V_n) violated");
    }
  }

  FrequencyVector freq_;
  int Q_ = 1;
  Coeffs coeffs_;
};

/// V(x); the imaginary residue of the finite sum must stay below 1e-12.
inline double eval_potential(const PotentialSpec& spec, const Vec& x, double coupling = 1.0) {
  require(x.size() == spec.dim(), "eval_potential: point dimension mismatch");
  cplx sum = 0.0;
  for (const auto& [n, v] : spec.coeffs()) {
    const double phase = frequency_of(n, spec.freq()).dot(x);
    sum += v * std::polar(1.0, phase);
  }
  guard(std::abs(sum.imag()) < 1e-12, "eval_potential: imaginary residue above 1e-12");
  return coupling * sum.real();
}

// JSON: {"d","l","Q","omega":[[..],..],"coeffs":[{"n":[..],"re","im"}]}; one
// member of each +-n pair is written.
inline nlohmann::json to_json(const PotentialSpec& spec) {
  nlohmann::json j;
  j["d"] = spec.dim();
  j["l"] = spec.count();
  j["Q"] = spec.Q();
  nlohmann::json om = nlohmann::json::array();
  for (int c = 0; c < spec.count(); ++c) {
    nlohmann::json col = nlohmann::json::array();
    for (int r = 0; r < spec.dim(); ++r) col.push_back(spec.freq().matrix()(r, c));
    om.push_back(col);
  }
  j["omega"] = om;
  nlohmann::json cs = nlohmann::json::array();
  for (const auto& [n, v] : spec.coeffs()) {
    if (!is_canonical(n)) continue;
    cs.push_back({{"n", n}, {"re", v.real()}, {"im", v.imag()}});
  }
  j["coeffs"] = cs;
  return j;
}

inline PotentialSpec potential_from_json(const nlohmann::json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int l = j.at("l").get<int>();
    const int Q = j.at("Q").get<int>();
    const auto& om = j.at("omega");
    require(om.is_array() && static_cast<int>(om.size()) == l, "potential JSON: omega must list l vectors");
    Mat omega(d, l);
    for (int c = 0; c < l; ++c) {
      require(static_cast<int>(om[c].size()) == d, "potential JSON: omega vectors must have d components");
      for (int r = 0; r < d; ++r) omega(r, c) = om[c][r].get<double>();
    }
    std::vector<std::pair<LatticeIndex, cplx>> entries;
    for (const auto& c : j.at("coeffs")) {
      entries.emplace_back(c.at("n").get<LatticeIndex>(),
                           cplx(c.at("re").get<double>(), c.value("im", 0.0)));
    }
    return PotentialSpec(FrequencyVector(std::move(omega)), Q, entries);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("potential JSON: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
}

/// V = sum_j a (e^{i omega_j x} + e^{-i omega_j x}), the coupling stencil used by
/// the desk configurations.
inline PotentialSpec cosine_potential(const FrequencyVector& freq, double amplitude = 1.0) {
  std::vector<std::pair<LatticeIndex, cplx>> entries;
  for (int j = 0; j < freq.count(); ++j) {
    LatticeIndex n(freq.count(), 0);
    n[j] = 1;
    entries.emplace_back(n, cplx(amplitude));
  }
  return PotentialSpec(freq, 1, entries);
}

}  // namespace qplab
