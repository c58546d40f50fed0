// qplab: batch experiment runner.
//
//   qplab <scan|surface|project|transport|stationary|diophantine> --config <path>
//         [--out <dir>] [--seed <int>] [--threads <int>]
//
// Exit codes: 0 success (verdicts in summary.json), 2 configuration error,
// 3 numerical guard tripped (manifest.json still written).

#include <qplab/config.hpp>
#include <qplab/plot.hpp>
#include <qplab/resonance.hpp>

#include <CLI11.hpp>
#include <png.h>

#include <charconv>
#include <chrono>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace qplab;

namespace {

constexpr const char* kVersion = "1.0.0";

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string index_string(const LatticeIndex& n) {
  std::string s = "(";
  for (std::size_t i = 0; i < n.size(); ++i) s += (i ? "," : "") + std::to_string(n[i]);
  return s + ")";
}

class Csv {
 public:
  explicit Csv(std::string header) : text_(std::move(header) + "\n") {}

  template <typename... Cells>
  void row(const Cells&... cells) {
    std::string line;
    ((line += (line.empty() ? "" : ",") + cell(cells)), ...);
    text_ += line + "\n";
  }

  const std::string& text() const { return text_; }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return "\"" + v + "\""; }

  std::string text_;
};

// Everything a run produces, held in memory until the run has finished.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::pair<std::string, PlotSpec>> plots;
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json runtimes = nlohmann::json::object();
};

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

double slope_or_nan(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > 0 && y[i] > 0) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  if (lx.size() < 2) return NAN;
  return fit_line(lx, ly).slope;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); }

// ---------------------------------------------------------------------------

Artifacts run_scan(const ExperimentConfig& c, const PotentialSpec& spec, int threads) {
  Artifacts a;
  Stopwatch sw;
  const int d = spec.dim();
  std::string header = d == 2 ? "kx,ky" : "kx,ky,kz";
  for (int j = 3; j < d; ++j) header += ",k" + std::to_string(j);
  header += ",accepted,gap,dominance";

  Csv table("coupling,radius,cells,accepted,fraction,fraction_stderr,max_abs_shift,max_u_bound");
  nlohmann::json runs = nlohmann::json::array();
  std::size_t total = 0, good = 0;
  PlotSpec shift_plot{"max |lambda - |k|^2| over accepted k", "|k|", "max shift", true, true};
  PlotSpec frac_plot{"non-resonant fraction", "|k|", "fraction"};

  for (double eps : c.couplings) {
    std::vector<NonResonantScan> scans;
    if (c.scan.mode == "sphere") {
      for (double r : c.scan.radii) scans.push_back(scan_sphere(r, c.scan.directions, c.M, spec, eps, c.crit, threads));
    } else {
      scans.push_back(scan_nonresonant(c.scan.r_min, c.scan.r_max, c.scan.step, c.M, spec, eps, c.crit, threads));
    }
    PlotSeries shift_s{{}, {}, "eps " + tag(eps), true, true}, frac_s{{}, {}, "eps " + tag(eps), true, true};
    for (const auto& s : scans) {
      double max_shift = 0, max_u = 0;
      std::string text = header + "\n";
      for (const auto& cell : s.cells) {
        for (int j = 0; j < d; ++j) text += num(cell.k(j)) + ",";
        text += std::string(cell.accepted ? "1" : "0") + "," + num(cell.gap) + "," + num(cell.dominance) + "\n";
        if (cell.accepted) {
          max_shift = std::max(max_shift, std::abs(cell.lambda - cell.k.squaredNorm()));
          max_u = std::max(max_u, cell.u_bound);
        }
      }
      const double radius = c.scan.mode == "sphere" ? s.r_min : 0.5 * (s.r_min + s.r_max);
      const std::string name = c.scan.mode == "sphere" ? "scan_e" + tag(eps) + "_r" + tag(radius) + ".csv"
                                                       : "scan_e" + tag(eps) + ".csv";
      a.files.emplace_back(name, text);
      table.row(eps, radius, s.cells.size(), s.accepted_count(), s.fraction, s.fraction_stderr, max_shift, max_u);
      runs.push_back({{"coupling", eps},
                      {"radius", radius},
                      {"cells", s.cells.size()},
                      {"accepted", s.accepted_count()},
                      {"fraction", s.fraction},
                      {"fraction_stderr", s.fraction_stderr},
                      {"max_abs_shift", max_shift},
                      {"max_u_bound", max_u},
                      {"file", name}});
      total += s.cells.size();
      good += s.accepted_count();
      shift_s.x.push_back(radius);
      shift_s.y.push_back(max_shift);
      frac_s.x.push_back(radius);
      frac_s.y.push_back(s.fraction);
    }
    if (scans.size() >= 2) {
      a.summary["slopes"].push_back({{"coupling", eps},
                                     {"shift_slope", finite_or_null(slope_or_nan(shift_s.x, shift_s.y))}});
    }
    shift_plot.series.push_back(shift_s);
    frac_plot.series.push_back(frac_s);
  }
  a.files.emplace_back("scan_summary.csv", table.text());
  a.summary["runs"] = runs;
  a.summary["fraction"] = static_cast<double>(good) / static_cast<double>(total);
  if (c.scan.mode == "sphere" && c.scan.radii.size() >= 2) {
    a.plots.emplace_back("scan_shift.png", shift_plot);
    a.plots.emplace_back("scan_fraction.png", frac_plot);
  }
  a.runtimes["scan"] = sw.lap();
  return a;
}

Artifacts run_surface(const ExperimentConfig& c, const PotentialSpec& spec, int threads) {
  Artifacts a;
  Stopwatch sw;
  const bool d3 = spec.dim() == 3;
  Csv table("coupling,lambda,directions,good_fraction,max_deviation");
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec dev_plot{"kappa - sqrt(lambda) by direction", "phi", "deviation"};
  PlotSpec max_plot{"max |kappa - sqrt(lambda)|", "lambda", "max deviation", true, true};
  for (double eps : c.couplings) {
    PlotSeries max_s{{}, {}, "eps " + tag(eps), true, true};
    for (double lam : c.surface.lambdas) {
      const auto s = surface(lam, c.surface.directions, c.M, spec, eps, c.crit, threads, c.surface.lambda_floor);
      std::string text = d3 ? "phi,theta,accepted,kappa,deviation\n" : "phi,accepted,kappa,deviation\n";
      PlotSeries dev_s{{}, {}, "lambda " + tag(lam) + ", eps " + tag(eps), false, true};
      for (const auto& smp : s.samples) {
        text += num(smp.phi) + ",";
        if (d3) text += num(smp.theta) + ",";
        text += std::string(smp.accepted ? "1" : "0") + "," + (smp.accepted ? num(smp.kappa) : "nan") + "," +
                (smp.accepted ? num(smp.deviation) : "nan") + "\n";
        if (smp.accepted) {
          dev_s.x.push_back(smp.phi);
          dev_s.y.push_back(smp.deviation);
        }
      }
      const std::string name = "surface_e" + tag(eps) + "_l" + tag(lam) + ".csv";
      a.files.emplace_back(name, text);
      table.row(eps, lam, c.surface.directions, s.good_fraction, s.max_deviation);
      runs.push_back({{"coupling", eps},
                      {"lambda", lam},
                      {"good_fraction", s.good_fraction},
                      {"max_deviation", s.max_deviation},
                      {"file", name}});
      max_s.x.push_back(lam);
      max_s.y.push_back(s.max_deviation);
      if (!d3) dev_plot.series.push_back(dev_s);
    }
    if (c.surface.lambdas.size() >= 2)
      a.summary["slopes"].push_back(
          {{"coupling", eps}, {"max_deviation_slope", finite_or_null(slope_or_nan(max_s.x, max_s.y))}});
    max_plot.series.push_back(max_s);
  }
  a.files.emplace_back("surface_summary.csv", table.text());
  a.summary["runs"] = runs;
  if (!d3) a.plots.emplace_back("surface_deviation.png", dev_plot);
  if (c.surface.lambdas.size() >= 2) a.plots.emplace_back("surface_max_deviation.png", max_plot);
  a.runtimes["surface"] = sw.lap();
  return a;
}

Artifacts run_project(const ExperimentConfig& c, const PotentialSpec& spec, int threads) {
  Artifacts a;
  Stopwatch sw;
  const auto& pc = c.project;
  const SpatialGrid grid(spec.dim(), pc.N, pc.L);
  const GaussianProfile F(pc.packet.kc, pc.packet.s);
  Csv table(
      "coupling,lambda_floor,cells,parseval_lhs,parseval_rhs,parseval_relerr,free_discrepancy,max_u_bound");
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec plot{"distance to the free projection", "lambda floor", "||EF - F*chiF F|| / ||F||", false, true};
  const long origin = LatticeWindow(spec.count(), c.M).index(LatticeIndex(spec.count(), 0));
  for (double eps : c.couplings) {
    PlotSeries s{{}, {}, "eps " + tag(eps), true, true};
    for (double floor : pc.lambda_floors) {
      const auto region = build_region(aligned_box(grid, F.kc, pc.radius), c.M, spec, eps, c.crit, floor,
                                       pc.lambda_cap, threads, &F.kc, pc.radius);
      nlohmann::json run{{"coupling", eps}, {"lambda_floor", finite_or_null(floor)}, {"cells", region.cells.size()}};
      if (region.empty()) {
        table.row(eps, floor, std::size_t{0}, NAN, NAN, NAN, NAN, NAN);
        run["empty"] = true;
        runs.push_back(run);
        continue;
      }
      double max_u = 0;
      for (const auto& cell : region.cells) max_u = std::max(max_u, cell.v.cwiseAbs().sum() - std::abs(cell.v(origin)));
      const auto p = parseval_check(F, region, grid);
      const double disc = compare_free_projection(F, region, grid);
      table.row(eps, floor, region.cells.size(), p.lhs, p.rhs, p.relerr, disc, max_u);
      run.update({{"parseval_lhs", p.lhs},
                  {"parseval_rhs", p.rhs},
                  {"parseval_relerr", p.relerr},
                  {"free_discrepancy", disc},
                  {"max_u_bound", max_u}});
      runs.push_back(run);
      if (std::isfinite(floor)) {
        s.x.push_back(floor);
        s.y.push_back(disc);
      }
    }
    plot.series.push_back(s);
  }
  a.files.emplace_back("project.csv", table.text());
  a.summary["runs"] = runs;
  if (pc.lambda_floors.size() >= 2) a.plots.emplace_back("project_discrepancy.png", plot);
  a.runtimes["project"] = sw.lap();
  return a;
}

Artifacts run_transport_cmd(const ExperimentConfig& c, const PotentialSpec& spec, int threads) {
  Artifacts a;
  Stopwatch sw;
  const auto& tc = c.transport;
  const GaussianProfile F(tc.packet.kc, tc.packet.s);
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec abel_plot{"time-averaged second moment", "T", "<<X^2>>_T", true, true};
  PlotSpec series_plot{"||X Psi(t)||^2", "t", "m2", false, false};
  const bool sweep = c.couplings.size() > 1;
  for (std::size_t ci = 0; ci < c.couplings.size(); ++ci) {
    const double eps = c.couplings[ci];
    const auto r = run_transport(F, spec, eps, tc.settings, threads);
    const std::string sfx = sweep ? "_e" + tag(eps) : "";
    Csv table("T,abel_m2,cesaro_m2,beta_running");
    for (std::size_t i = 0; i < r.T.size(); ++i) table.row(r.T[i], r.abel[i], r.cesaro[i], r.running[i]);
    Csv raw("t,m2");
    for (std::size_t i = 0; i < r.series.t.size(); ++i) raw.row(r.series.t[i], r.series.m2[i]);
    a.files.emplace_back("transport" + sfx + ".csv", table.text());
    a.files.emplace_back("series" + sfx + ".csv", raw.text());

    nlohmann::json run{{"coupling", eps},
                       {"beta", r.beta.beta},
                       {"beta_stderr", r.beta.stderr_},
                       {"beta_cesaro", r.beta_cesaro.beta},
                       {"c1", r.verdict.c1},
                       {"C1", r.verdict.C1},
                       {"C2", r.verdict.C2},
                       {"c1_floor", r.verdict.floor},
                       {"verdict", r.verdict.ballistic ? "ballistic" : "not_ballistic"},
                       {"norm2", r.norm2},
                       {"grad_lambda_norm", r.grad_norm},
                       {"accepted_fraction", r.accepted_fraction},
                       {"active_sites", r.active_sites},
                       {"cross_pairs", r.cross_pairs}};
    double lo = INFINITY, hi = 0;
    for (std::size_t i = 0; i < r.T.size(); ++i) {
      lo = std::min(lo, r.abel[i] / (r.T[i] * r.T[i]));
      hi = std::max(hi, r.abel[i] / (r.T[i] * r.T[i]));
    }
    run["abel_over_T2_spread"] = (hi - lo) / hi;
    if (ci == 0)
      for (const auto& [k, v] : run.items()) a.summary[k] = v;
    runs.push_back(run);

    abel_plot.series.push_back({r.T, r.abel, "Abel, eps " + tag(eps), true, true});
    abel_plot.series.push_back({r.T, r.cesaro, "Cesaro, eps " + tag(eps), true, true});
    PlotSeries ms{{}, {}, "eps " + tag(eps)};
    const std::size_t stride = std::max<std::size_t>(1, r.series.t.size() / 2000);
    for (std::size_t i = 0; i < r.series.t.size(); i += stride) {
      ms.x.push_back(r.series.t[i]);
      ms.y.push_back(r.series.m2[i]);
    }
    series_plot.series.push_back(ms);
  }
  if (sweep) a.summary["runs"] = runs;
  a.plots.emplace_back("transport_abel.png", abel_plot);
  a.plots.emplace_back("transport_series.png", series_plot);
  a.runtimes["transport"] = sw.lap();
  return a;
}

Artifacts run_stationary(const ExperimentConfig& c, const PotentialSpec& spec, int threads) {
  Artifacts a;
  Stopwatch sw;
  const auto& sc = c.stationary;
  const int d = spec.dim();
  Vec dir = Vec::Zero(d);
  dir(0) = std::cos(sc.direction_deg * kPi / 180.0);
  dir(1) = std::sin(sc.direction_deg * kPi / 180.0);
  Csv table("t,z_norm,numeric_re,numeric_im,leading_re,leading_im,relerr");
  nlohmann::json runs = nlohmann::json::array();
  PlotSpec plot{"relative error of the leading term", "t", "relerr", true, true};
  const bool free_potential = spec.coeffs().empty();
  for (double eps : c.couplings) {
    const bool coupled = eps != 0.0 && !free_potential;
    std::vector<double> offsets;
    for (double zn : sc.z_norms) {
      const Vec z = zn * dir;
      const Dispersion disp = coupled ? extended_dispersion(local_extension(spec, eps, c.M, 0.5 * z, sc.step, sc.half,
                                                                           sc.delta, c.crit, threads))
                                      : free_dispersion();
      const auto p = stationary_point(z, disp, sc.lambda_star);
      const Vec k0 = p.k0;
      const double s2 = sc.s2;
      auto g3 = [k0, s2](const Vec& k) { return cplx(std::exp(-(k - k0).squaredNorm() / (4 * s2)), 0.0); };
      PlotSeries ps{{}, {}, "|z| " + tag(zn) + ", eps " + tag(eps), true, true};
      std::vector<double> errs;
      for (double t : sc.times) {
        const cplx lead = asymptotic_leading(t, p, g3, disp);
        cplx numeric(NAN, NAN);
        double relerr = NAN;
        if (!coupled) {
          numeric = oscillatory_integral(t, p, g3, disp).value;
          relerr = std::abs(numeric - lead) / std::abs(lead);
          ps.x.push_back(t);
          ps.y.push_back(relerr);
          errs.push_back(relerr);
        }
        table.row(t, zn, numeric.real(), numeric.imag(), lead.real(), lead.imag(), relerr);
      }
      const double offset = (p.k0 - 0.5 * z).norm();
      offsets.push_back(offset);
      nlohmann::json run{{"coupling", eps},
                         {"z_norm", zn},
                         {"k0", std::vector<double>(p.k0.data(), p.k0.data() + d)},
                         {"k0_offset", offset},
                         {"residual", p.residual},
                         {"newton_iterations", p.iterations},
                         {"remainder_diagnostic", remainder_diagnostic(p, g3)}};
      if (errs.size() >= 2) {
        run["relerr_slope"] = finite_or_null(slope_or_nan(sc.times, errs));
        std::vector<double> ratios;
        for (std::size_t i = 1; i < errs.size(); ++i) ratios.push_back(errs[i] / errs[i - 1]);
        run["relerr_ratios"] = ratios;
      }
      runs.push_back(run);
      if (!ps.x.empty()) plot.series.push_back(ps);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < offsets.size(); ++i) decreasing &= offsets[i] < offsets[i - 1];
    if (coupled && offsets.size() >= 2) a.summary["offset_decreasing"].push_back({{"coupling", eps}, {"value", decreasing}});
  }
  a.files.emplace_back("stationary.csv", table.text());
  a.summary["runs"] = runs;
  if (!plot.series.empty()) a.plots.emplace_back("stationary_relerr.png", plot);
  a.runtimes["stationary"] = sw.lap();
  return a;
}

Artifacts run_diophantine(const ExperimentConfig& c, const PotentialSpec& spec, int) {
  Artifacts a;
  Stopwatch sw;
  Csv table("N,margin,worst_n");
  PlotSpec plot{"Diophantine margin", "N", "min |n.omega| |n|^tau", false, true};
  PlotSeries s{{}, {}, "tau " + tag(c.diophantine.tau), true, true};
  DiophantineMargin last;
  for (int N = 1; N <= c.diophantine.N; ++N) {
    last = diophantine_margin(spec.freq(), N, c.diophantine.tau);
    table.row(N, last.margin, index_string(last.worst_n));
    s.x.push_back(N);
    s.y.push_back(last.margin);
  }
  plot.series.push_back(s);
  a.files.emplace_back("diophantine.csv", table.text());
  a.plots.emplace_back("diophantine.png", plot);
  a.summary = {{"N", c.diophantine.N},
               {"tau", c.diophantine.tau},
               {"margin", last.margin},
               {"worst_n", last.worst_n},
               {"omega", to_json(spec)["omega"]}};
  a.runtimes["diophantine"] = sw.lap();
  return a;
}

// ---------------------------------------------------------------------------

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

nlohmann::json versions() {
  return {{"qplab", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"libpng", PNG_LIBPNG_VER_STRING},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__},
          {"cxx_standard", __cplusplus}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qplab: quasi-periodic Schrodinger operator laboratory"};
  std::string sub, config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads_opt;
  app.add_option("subcommand", sub, "scan | surface | project | transport | stationary | diophantine")
      ->required()
      ->check(CLI::IsMember(subcommands()));
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "frequency seed, overrides the config");
  app.add_option("--threads", threads_opt, "worker threads, overrides the config and QPLAB_THREADS")
      ->check(CLI::PositiveNumber);
  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  // Configuration: every check here runs before the output directory exists.
  ExperimentConfig cfg;
  PotentialSpec spec;
  int threads = 1;
  try {
    cfg = load_config(config_path);
    spec = resolve_potential(cfg, seed);
    validate_for(cfg, sub, spec);
    threads = threads_opt.value_or(cfg.threads > 0 ? cfg.threads : default_threads());
  } catch (const ConfigError& e) {
    std::cerr << "qplab: config error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "qplab: config error: " << e.what() << "\n";
    return 2;
  }
  if (out_dir.empty()) out_dir = cfg.output.empty() ? "qplab-" + sub : cfg.output;

  nlohmann::json manifest{{"subcommand", sub},
                          {"config_path", config_path},
                          {"config_hash", "fnv1a64:" + [&] {
                             char buf[20];
                             std::snprintf(buf, sizeof buf, "%016llx",
                                           static_cast<unsigned long long>(fnv1a(cfg.raw.dump())));
                             return std::string(buf);
                           }()},
                          {"config", cfg.raw},
                          {"seed", seed ? nlohmann::json(*seed) : nlohmann::json(cfg.potential.seed)},
                          {"threads", threads},
                          {"potential", to_json(spec)},
                          {"versions", versions()}};

  const auto started = std::chrono::steady_clock::now();
  int rc = 0;
  Artifacts art;
  try {
    if (sub == "scan") art = run_scan(cfg, spec, threads);
    if (sub == "surface") art = run_surface(cfg, spec, threads);
    if (sub == "project") art = run_project(cfg, spec, threads);
    if (sub == "transport") art = run_transport_cmd(cfg, spec, threads);
    if (sub == "stationary") art = run_stationary(cfg, spec, threads);
    if (sub == "diophantine") art = run_diophantine(cfg, spec, threads);
    manifest["status"] = "ok";
  } catch (const NumericalGuard& e) {
    std::cerr << "qplab: numerical guard: " << e.what() << "\n";
    manifest["status"] = "numerical_guard";
    manifest["error"] = e.what();
    rc = 3;
  } catch (const PreconditionError& e) {
    std::cerr << "qplab: config error: " << e.what() << "\n";
    return 2;
  }
  art.runtimes["total"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  manifest["runtimes"] = art.runtimes;
  manifest["exit_code"] = rc;

  try {
    fs::create_directories(out_dir);
    nlohmann::json outputs = nlohmann::json::array();
    if (rc == 0) {
      for (const auto& [name, text] : art.files) {
        write_text(fs::path(out_dir) / name, text);
        outputs.push_back(name);
      }
      for (const auto& [name, plot] : art.plots) {
        write_plot((fs::path(out_dir) / name).string(), plot);
        outputs.push_back(name);
      }
      write_text(fs::path(out_dir) / "summary.json", art.summary.dump(2) + "\n");
      outputs.push_back("summary.json");
    }
    manifest["outputs"] = outputs;
    write_text(fs::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "qplab: " << e.what() << "\n";
    return rc == 0 ? 3 : rc;
  }
  if (rc == 0) std::cout << art.summary.dump(2) << "\n";
  return rc;
}
