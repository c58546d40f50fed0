#pragma once

// Experiment configuration for the qplab runner: JSON parsing, defaults and the
// eager checks that must pass before any output is written.

#include <qplab/dynamics.hpp>
#include <qplab/stationary_phase.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace qplab {

struct PotentialConfig {
  std::string kind = "cosine";  // cosine | free | inline | file
  std::uint64_t seed = 22;
  int d = 2;
  int l = 3;
  double amplitude = 1.0;
  nlohmann::json spec;  // inline or loaded potential JSON
};

struct PacketConfig {
  Vec kc = (Vec(2) << 12.0, 0.0).finished();
  double s = 0.5;
};

struct ScanConfig {
  std::string mode = "sphere";  // sphere | annulus
  std::vector<double> radii{10.0, 14.0, 20.0};
  int directions = 360;
  double r_min = 10.0, r_max = 11.0, step = 0.1;
};

struct SurfaceConfig {
  std::vector<double> lambdas{100.0, 400.0, 1600.0};
  int directions = 720;
  double lambda_floor = kDefaultLambdaFloor;
};

struct ProjectConfig {
  int N = 256;
  double L = 40.0;
  PacketConfig packet;
  double radius = 2.0;
  std::vector<double> lambda_floors{-std::numeric_limits<double>::infinity()};
  double lambda_cap = std::numeric_limits<double>::infinity();
};

struct TransportConfig {
  PacketConfig packet;
  TransportSettings settings;
};

struct StationaryConfig {
  std::vector<double> z_norms{24.0, 48.0};
  double direction_deg = 0.0;
  std::vector<double> times{50.0, 100.0, 200.0};
  double s2 = 3.0;
  double lambda_star = 100.0;
  double step = 0.25;
  int half = 8;
  double delta = 0.5;
};

struct DiophantineConfig {
  int N = 10;
  double tau = 4.0;
};

struct ExperimentConfig {
  PotentialConfig potential;
  std::vector<double> couplings{0.05};
  int M = 2;
  NonResonanceCriterion crit;
  int threads = 0;  // 0: QPLAB_THREADS or 1
  std::string output;
  ScanConfig scan;
  SurfaceConfig surface;
  ProjectConfig project;
  TransportConfig transport;
  StationaryConfig stationary;
  DiophantineConfig diophantine;
  nlohmann::json raw;
};

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"scan", "surface", "project", "transport", "stationary", "diophantine"};
  return s;
}

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
T field(const nlohmann::json& j, const std::string& where, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where + "." + key + ": expected a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& where, const std::string& key,
                                       std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array() || v.empty()) throw ConfigError(where + "." + key + ": expected a number or non-empty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(where + "." + key + ": array entries must be numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

inline void expect(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

inline PacketConfig parse_packet(const nlohmann::json& j, const std::string& where, PacketConfig p) {
  check_keys(j, where, {"kc", "s"});
  if (j.contains("kc")) {
    const auto kc = number_list(j, where, "kc", {});
    expect(kc.size() >= 2, where + ".kc: needs d components");
    p.kc = Eigen::Map<const Vec>(kc.data(), static_cast<long>(kc.size()));
  }
  p.s = field(j, where, "s", p.s);
  expect(p.s > 0, where + ".s: must be positive");
  return p;
}

}  // namespace detail

/// Parses a config document; `base_dir` resolves relative potential file paths.
inline ExperimentConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = ".") {
  using namespace detail;
  ExperimentConfig c;
  c.raw = j;
  check_keys(j, "config", {"potential", "coupling", "M", "criterion", "threads", "output", "scan", "surface",
                           "project", "transport", "stationary", "diophantine"});

  if (j.contains("potential")) {
    const auto& p = j.at("potential");
    check_keys(p, "potential", {"kind", "seed", "d", "l", "amplitude", "spec", "file"});
    auto& pc = c.potential;
    pc.kind = field<std::string>(p, "potential", "kind", pc.kind);
    pc.seed = field<std::uint64_t>(p, "potential", "seed", pc.seed);
    pc.d = field(p, "potential", "d", pc.d);
    pc.l = field(p, "potential", "l", pc.l);
    pc.amplitude = field(p, "potential", "amplitude", pc.amplitude);
    if (pc.kind == "inline") {
      expect(p.contains("spec"), "potential.spec: required for kind 'inline'");
      pc.spec = p.at("spec");
    } else if (pc.kind == "file") {
      const auto path = base_dir / field<std::string>(p, "potential", "file", "");
      std::ifstream in(path);
      expect(in.good(), "potential.file: cannot open " + path.string());
      try {
        pc.spec = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError("potential.file: " + std::string(e.what()));
      }
    } else {
      expect(pc.kind == "cosine" || pc.kind == "free", "potential.kind: expected cosine, free, inline or file");
    }
  }

  c.couplings = number_list(j, "config", "coupling", c.couplings);
  for (double e : c.couplings) expect(std::isfinite(e) && e >= 0, "coupling: entries must be finite and >= 0");
  c.M = field(j, "config", "M", c.M);
  expect(c.M >= 1 && c.M <= 6, "M: must lie in [1, 6]");
  c.threads = field(j, "config", "threads", c.threads);
  expect(c.threads >= 0, "threads: must be >= 0");
  c.output = field<std::string>(j, "config", "output", c.output);

  if (j.contains("criterion")) {
    const auto& k = j.at("criterion");
    check_keys(k, "criterion", {"c_gap", "c_div", "sigma", "divisor_check"});
    c.crit.c_gap = field(k, "criterion", "c_gap", c.crit.c_gap);
    c.crit.c_div = field(k, "criterion", "c_div", c.crit.c_div);
    c.crit.sigma = field(k, "criterion", "sigma", c.crit.sigma);
    c.crit.divisor_check = field(k, "criterion", "divisor_check", c.crit.divisor_check);
    expect(c.crit.c_gap >= 0 && c.crit.c_div >= 0, "criterion: constants must be >= 0");
    expect(c.crit.sigma >= 0 && c.crit.sigma < 1, "criterion.sigma: must lie in [0, 1)");
  }

  if (j.contains("scan")) {
    const auto& s = j.at("scan");
    check_keys(s, "scan", {"mode", "radii", "directions", "r_min", "r_max", "step"});
    auto& sc = c.scan;
    sc.mode = field<std::string>(s, "scan", "mode", sc.mode);
    expect(sc.mode == "sphere" || sc.mode == "annulus", "scan.mode: expected sphere or annulus");
    sc.radii = number_list(s, "scan", "radii", sc.radii);
    sc.directions = field(s, "scan", "directions", sc.directions);
    sc.r_min = field(s, "scan", "r_min", sc.r_min);
    sc.r_max = field(s, "scan", "r_max", sc.r_max);
    sc.step = field(s, "scan", "step", sc.step);
    expect(sc.directions >= 1, "scan.directions: must be positive");
    expect(sc.step > 0 && sc.r_max > sc.r_min, "scan: need step > 0 and r_max > r_min");
  }

  if (j.contains("surface")) {
    const auto& s = j.at("surface");
    check_keys(s, "surface", {"lambdas", "directions", "lambda_floor"});
    auto& sc = c.surface;
    sc.lambdas = number_list(s, "surface", "lambdas", sc.lambdas);
    sc.directions = field(s, "surface", "directions", sc.directions);
    sc.lambda_floor = field(s, "surface", "lambda_floor", sc.lambda_floor);
    expect(sc.directions >= 8, "surface.directions: need at least 8");
    for (double l : sc.lambdas) expect(l > sc.lambda_floor, "surface.lambdas: every target must exceed lambda_floor");
  }

  if (j.contains("project")) {
    const auto& s = j.at("project");
    check_keys(s, "project", {"N", "L", "packet", "radius", "lambda_floors", "lambda_cap"});
    auto& pc = c.project;
    pc.N = field(s, "project", "N", pc.N);
    pc.L = field(s, "project", "L", pc.L);
    if (s.contains("packet")) pc.packet = parse_packet(s.at("packet"), "project.packet", pc.packet);
    pc.radius = field(s, "project", "radius", pc.radius);
    pc.lambda_floors = number_list(s, "project", "lambda_floors", pc.lambda_floors);
    pc.lambda_cap = field(s, "project", "lambda_cap", pc.lambda_cap);
    expect(pc.N >= 8 && pc.N % 2 == 0, "project.N: must be an even integer >= 8");
    expect(pc.L > 0 && pc.radius > 0, "project: L and radius must be positive");
  }

  if (j.contains("transport")) {
    const auto& s = j.at("transport");
    check_keys(s, "transport", {"packet", "T0", "Tmax", "dt", "step", "radius", "delta", "M", "floor_factor",
                                "site_threshold", "pair_threshold"});
    auto& tc = c.transport;
    if (s.contains("packet")) tc.packet = parse_packet(s.at("packet"), "transport.packet", tc.packet);
    auto& ts = tc.settings;
    ts.T0 = field(s, "transport", "T0", ts.T0);
    ts.Tmax = field(s, "transport", "Tmax", ts.Tmax);
    ts.dt = field(s, "transport", "dt", ts.dt);
    ts.floor_factor = field(s, "transport", "floor_factor", ts.floor_factor);
    ts.momentum.step = field(s, "transport", "step", ts.momentum.step);
    ts.momentum.radius = field(s, "transport", "radius", ts.momentum.radius);
    ts.momentum.delta = field(s, "transport", "delta", ts.momentum.delta);
    ts.momentum.M = field(s, "transport", "M", c.M);
    ts.momentum.site_threshold = field(s, "transport", "site_threshold", ts.momentum.site_threshold);
    ts.momentum.pair_threshold = field(s, "transport", "pair_threshold", ts.momentum.pair_threshold);
    expect(ts.T0 > 0 && ts.Tmax >= ts.T0, "transport: need 0 < T0 <= Tmax");
    expect(ts.dt > 0 && ts.dt <= 0.1 * ts.T0, "transport.dt: must lie in (0, T0 / 10]");
    expect(ts.momentum.step > 0 && ts.momentum.radius > 0 && ts.momentum.delta > 0,
           "transport: step, radius and delta must be positive");
    expect(ts.momentum.M >= 1 && ts.momentum.M <= 6, "transport.M: must lie in [1, 6]");
  } else {
    c.transport.settings.momentum.M = c.M;
  }
  c.transport.settings.momentum.crit = c.crit;

  if (j.contains("stationary")) {
    const auto& s = j.at("stationary");
    check_keys(s, "stationary",
               {"z_norms", "direction_deg", "times", "s2", "lambda_star", "step", "half", "delta"});
    auto& sc = c.stationary;
    sc.z_norms = number_list(s, "stationary", "z_norms", sc.z_norms);
    sc.direction_deg = field(s, "stationary", "direction_deg", sc.direction_deg);
    sc.times = number_list(s, "stationary", "times", sc.times);
    sc.s2 = field(s, "stationary", "s2", sc.s2);
    sc.lambda_star = field(s, "stationary", "lambda_star", sc.lambda_star);
    sc.step = field(s, "stationary", "step", sc.step);
    sc.half = field(s, "stationary", "half", sc.half);
    sc.delta = field(s, "stationary", "delta", sc.delta);
    for (double t : sc.times) expect(t > 0, "stationary.times: entries must be positive");
    expect(sc.s2 > 0 && sc.step > 0 && sc.half >= 2 && sc.delta > 0, "stationary: bad extension settings");
  }

  if (j.contains("diophantine")) {
    const auto& s = j.at("diophantine");
    check_keys(s, "diophantine", {"N", "tau"});
    c.diophantine.N = field(s, "diophantine", "N", c.diophantine.N);
    c.diophantine.tau = field(s, "diophantine", "tau", c.diophantine.tau);
    expect(c.diophantine.N >= 1 && c.diophantine.N <= 40, "diophantine.N: must lie in [1, 40]");
  }
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j, path.parent_path());
}

/// The potential named by the config; `seed` overrides the configured seed when set.
inline PotentialSpec resolve_potential(const ExperimentConfig& c, std::optional<std::uint64_t> seed = {}) {
  const auto& p = c.potential;
  try {
    if (p.kind == "inline" || p.kind == "file") return potential_from_json(p.spec);
    const auto freq = sample_frequencies(seed.value_or(p.seed), p.d, p.l);
    return cosine_potential(freq, p.kind == "free" ? 0.0 : p.amplitude);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
}

/// Eager guard checks for one subcommand, run before anything is written.
inline void validate_for(const ExperimentConfig& c, const std::string& sub, const PotentialSpec& spec) {
  using detail::expect;
  const int d = spec.dim();
  auto check_packet = [&](const PacketConfig& p, const std::string& where) {
    expect(p.kc.size() == d, where + ".kc: must have d components");
  };
  const double reach = 2.0 * (spec.Q() * c.M + 1) * spec.freq().max_norm();
  if (sub == "scan") {
    if (c.scan.mode == "sphere") {
      for (double r : c.scan.radii) expect(r > reach, "scan.radii: every radius must exceed 2 (Q M + 1) max|omega|");
    } else {
      expect(c.scan.r_min > reach, "scan.r_min: must exceed 2 (Q M + 1) max|omega|");
      const double cells = std::pow(2.0 * c.scan.r_max / c.scan.step, d);
      expect(cells < 5e6, "scan: annulus grid too large");
    }
  } else if (sub == "surface") {
    expect(d == 2 || d == 3, "surface: d must be 2 or 3");
  } else if (sub == "project") {
    const auto& pc = c.project;
    check_packet(pc.packet, "project.packet");
    const SpatialGrid g(d, pc.N, pc.L);
    const double kmax = pc.packet.kc.norm() + pc.radius + spec.Q() * c.M * spec.freq().max_norm() * spec.count();
    expect(kmax < g.k_nyquist(), "project: grid Nyquist wavenumber must exceed the largest shifted momentum");
    expect(pc.radius >= g.dk(), "project.radius: must cover at least one momentum cell");
  } else if (sub == "transport") {
    check_packet(c.transport.packet, "transport.packet");
    const auto& m = c.transport.settings.momentum;
    const double inner = c.transport.packet.kc.norm() - m.radius - 2 * m.delta;
    expect(inner > 2.0 * (spec.Q() * m.M + 1) * spec.freq().max_norm(),
           "transport: momentum ball must stay outside 2 (Q M + 1) max|omega|");
    expect(m.delta >= 2 * m.step, "transport.delta: must be at least twice the momentum step");
  } else if (sub == "stationary") {
    expect(d == 2 || d == 3, "stationary: d must be 2 or 3");
    const auto& s = c.stationary;
    for (double z : s.z_norms) expect(z * z > s.lambda_star, "stationary.z_norms: need |z|^2 > lambda_star");
    expect(s.delta >= 2 * s.step, "stationary.delta: must be at least twice the extension step");
  } else if (sub != "diophantine") {
    throw ConfigError("unknown subcommand '" + sub + "'");
  }
}

}  // namespace qplab
