#include "spde/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "spde/digest.hpp"
#include "spde/errors.hpp"
#include "spde/noise.hpp"
#include "spde/parallel.hpp"
#include "spde/report.hpp"
#include "spde/rng.hpp"
#include "spde/scheme.hpp"
#include "spde/series.hpp"
#include "spde/verify.hpp"

namespace spde {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_out_dir(const ExperimentConfig& config, const RunOptions& options) {
  if (!options.out_dir.empty()) return options.out_dir;
  if (!config.output_dir.empty()) return config.output_dir;
  if (const char* env = std::getenv("SPDE_OUT_DIR"); env && *env) return env;
  return "spde-out";
}

EmbeddingTable load_embedding_table(const ExperimentConfig& config) {
  return EmbeddingTable::load(config.embedding_path.empty() ? default_embedding_path() : config.embedding_path);
}

namespace {

std::string utc_now() {
  std::time_t t;
  if (const char* e = std::getenv("SOURCE_DATE_EPOCH"); e && *e) {
    t = static_cast<std::time_t>(std::strtoll(e, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json provenance(const EmbeddingEstimate& e) {
  return {{"kind", e.kind}, {"exponent", e.exponent}, {"lebesgue_p", e.lebesgue_p}, {"modes", e.modes},
          {"iters", e.iters}, {"seed", e.seed},        {"raw", e.raw},               {"safety", e.safety},
          {"value", e.value()}};
}

std::string p_label(double p) {
  std::string s = format_double(p);
  std::replace(s.begin(), s.end(), '.', '_');
  return s;
}

CheckReport aggregate_paths(std::string name, const std::vector<CheckReport>& rs, bool asserted) {
  CheckReport out;
  out.name = std::move(name);
  out.asserted = asserted;
  out.samples = rs.size();
  std::size_t ok = 0;
  double worst = -INFINITY;
  for (const auto& r : rs) {
    if (r.passed) ++ok;
    double ratio = r.rhs > 0.0 ? r.lhs / r.rhs : (r.lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > worst) {
      worst = ratio;
      out.tolerances = r.tolerances;
    }
  }
  out.passed = ok == rs.size();
  out.lhs = worst;
  out.rhs = 1.0;
  out.margin = 1.0 - worst;
  out.notes = "pass rate " + std::to_string(ok) + "/" + std::to_string(rs.size());
  return out;
}

}  // namespace

std::vector<CheckReport> run_verify_suite(const ExperimentConfig& config, const EmbeddingTable& table,
                                          unsigned threads) {
  const VerifySettings& vs = config.verify;
  const std::uint64_t seed = config.seed;
  std::vector<CheckReport> out;
  const double C_sup = table.sup_value(vs.gamma_beta, vs.gamma_p);

  for (const std::string& name : vs.presets) {
    EquationSpec eq = preset_equation(name);
    resolve_theta(eq, table);
    const double ratio = table.lebesgue_value(eq.rho, lipschitz_lebesgue_exponent(eq), eq.c0);
    out.push_back(check_coercivity_suite(eq, vs.random_pairs, vs.random_n, seed, threads));
    out.push_back(check_lipschitz_suite(eq, ratio, vs.random_pairs, vs.random_n, seed, threads));
    if (eq.kind == EquationKind::Burgers) out.push_back(check_skew_suite(1000, vs.random_n, seed));
    out.push_back(check_drift_oracle_suite(eq, 200, 64, seed));

    const double eta = select_eta(vs.gamma_p, vs.gamma_beta, config.T, eq.gamma, eq.c0, C_sup);
    CheckReport g = check_gamma_condition(vs.gamma_p, vs.gamma_beta, config.T, eq.gamma, eta, eq.c0, C_sup);
    g.name += "-" + to_string(eq.kind);
    out.push_back(g);

    GridSpec grid(config.T, vs.M);
    NoiseLadder ladder(seed, vs.M, vs.n, config.T, vs.bound.eta, eq.c0);
    SchemeConfig sc{eq, vs.n, grid, SpectralField(config.xi, eq.c0), true, true};
    BoundCheckConfig tight = vs.bound;
    tight.slack = 1.0;
    std::vector<CheckReport> main(vs.paths), diag(vs.paths);
    parallel_for(vs.paths, threads, [&](std::size_t i) {
      Trajectory tr = run(sc, ladder, i);
      main[i] = check_apriori_bound(tr, eq, vs.bound).report;
      diag[i] = check_apriori_bound(tr, eq, tight).report;
    });
    out.push_back(aggregate_paths("apriori-bound-" + to_string(eq.kind), main, true));
    out.push_back(aggregate_paths("apriori-bound-slack1-" + to_string(eq.kind), diag, false));
  }

  const double c0 = config.equation.c0;
  for (NormKind k : {NormKind::Sup, NormKind::H}) {
    NoiseLadder ladder(seed, 1, 16, 1.0, 0.0, c0);
    FieldSampler sampler = [&ladder](std::uint64_t i) {
      std::vector<double> a(16);
      for (std::size_t j = 1; j <= 16; ++j) a[j - 1] = ladder.fine_increment(i, j, 0).o;
      return SpectralField(std::move(a), ladder.c0());
    };
    out.push_back(check_fernique(sampler, vs.fernique_samples, vs.fernique_samples, k, threads));
  }
  out.push_back(check_sup_moment_bound(16, 1.0, 0.0, vs.gamma_beta, vs.gamma_p, vs.sup_moment_samples,
                                       C_sup, c0, seed, threads));
  out.push_back(check_noise_rate(config.rate_n, config.rate_t, config.rate_rho, config.epsilon, config.rate_p,
                                 vs.noise_samples, c0, seed, threads)
                    .report);
  out.push_back(check_series_limit(0.0, 2.0, {0.0, 1.0, 1e2, 1e4, 1e6}).report);
  SeriesValue basel = power_series_sum(0.0, 2.0, 1.0, 0.0);
  CheckReport b = CheckReport::compare("series-basel", std::abs(basel.value - std::numbers::pi * std::numbers::pi / 6.0),
                                       0.0, 0.0, 1e-10);
  b.samples = 1;
  out.push_back(b);
  return out;
}

RunResult run_experiment(ExperimentConfig config, const RunOptions& options) {
  if (options.seed) config.seed = *options.seed;
  const EmbeddingTable table = load_embedding_table(config);
  resolve_theta(config.equation, table);
  const std::string hash = config.hash();

  RunResult res;
  res.out_dir = resolve_out_dir(config, options);
  const VerifySettings& vs = config.verify;
  const EquationSpec& eq = config.equation;
  const EmbeddingEstimate& sup_est = table.sup(vs.gamma_beta, vs.gamma_p);
  const EmbeddingEstimate& leb_est = table.lebesgue(eq.rho, lipschitz_lebesgue_exponent(eq));
  res.eta = select_eta(vs.gamma_p, vs.gamma_beta, config.T, eq.gamma, eq.c0, sup_est.value());

  std::map<std::string, std::string> files;
  const unsigned threads = options.threads;
  json ladder_info;
  auto note_ladder = [&](const NoiseLadder& l) {
    ladder_info = {{"seed", l.seed()}, {"fine_steps", l.fine_steps()}, {"fine_modes", l.fine_modes()},
                   {"T", l.T()}, {"eta", l.eta()}, {"rng", kRngName}};
  };

  switch (config.kind) {
    case ExperimentKind::Simulate: {
      GridSpec grid(config.T, config.M);
      NoiseLadder ladder(config.seed, config.M, config.n, config.T, res.eta, eq.c0);
      note_ladder(ladder);
      SchemeConfig sc{eq, config.n, grid, config.initial(), config.taming, false};
      std::vector<std::string> csv(config.samples), digest(config.samples);
      parallel_for(config.samples, threads, [&](std::size_t i) {
        Trajectory tr = run(sc, ladder, i);
        csv[i] = trajectory_table(tr).str();
        digest[i] = trajectory_digest(tr);
      });
      res.trajectory_digest = digest[0];
      if (config.samples == 1) {
        files["trajectory.csv"] = csv[0];
      } else {
        CsvTable d({"sample", "digest"});
        for (std::size_t i = 0; i < config.samples; ++i) {
          files["trajectory_" + std::to_string(i) + ".csv"] = csv[i];
          d.add_row(std::vector<std::string>{std::to_string(i), digest[i]});
        }
        files["digests.csv"] = d.str();
      }
      break;
    }
    case ExperimentKind::ConvergeSpace:
    case ExperimentKind::ConvergeTime: {
      const Resolution ref = config.reference;
      NoiseLadder ladder(config.seed, ref.M, ref.n, config.T, 0.0, eq.c0);
      note_ladder(ladder);
      SpectralField xi = config.initial();
      SchemeConfig rc{eq, ref.n, GridSpec(config.T, ref.M), xi, config.taming, false};
      std::vector<SchemeConfig> coarse;
      for (const Resolution& r : config.levels)
        coarse.push_back({eq, r.n, GridSpec(config.T, r.M), xi, config.taming, false});
      auto results = strong_error_study(coarse, rc, ladder, config.samples, config.p_moments, threads);
      const bool space = config.kind == ExperimentKind::ConvergeSpace;
      CsvTable t({"n", "M", "p", "error", "std_error"});
      for (const auto& R : results) {
        CsvTable per({"t", "error"});
        for (const auto& lv : R.levels) {
          t.add_row(std::vector<std::string>{std::to_string(lv.n), std::to_string(lv.M), format_double(R.p),
                                             format_double(lv.value), format_double(lv.std_error)});
        }
        const auto& fine = R.levels.back();
        for (std::size_t k = 0; k < fine.per_time.size(); ++k)
          per.add_row(std::vector<double>{config.T * static_cast<double>(k) / static_cast<double>(fine.M),
                                          fine.per_time[k]});
        files["per_time_p" + p_label(R.p) + ".csv"] = per.str();
      }
      files[space ? "error_vs_n.csv" : "error_vs_M.csv"] = t.str();
      break;
    }
    case ExperimentKind::NoiseRate: {
      NoiseRateResult nr = check_noise_rate(config.rate_n, config.rate_t, config.rate_rho, config.epsilon,
                                            config.rate_p, config.samples, eq.c0, config.seed, threads);
      CsvTable t({"n", "mc_mean", "mc_std_error", "oracle", "oracle_tail_bound", "rate_lhs", "rate_rhs"});
      for (const auto& r : nr.rows)
        t.add_row(std::vector<std::string>{std::to_string(r.n), format_double(r.mc_mean), format_double(r.mc_se),
                                           format_double(r.oracle), format_double(r.oracle_tail),
                                           format_double(r.rate_lhs), format_double(r.rate_rhs)});
      files["noise_rate.csv"] = t.str();
      res.reports.push_back(nr.report);
      break;
    }
    case ExperimentKind::Fernique: {
      const std::size_t n = config.fernique_n;
      NoiseLadder ladder(config.seed, 1, n, config.fernique_t, 0.0, eq.c0);
      note_ladder(ladder);
      FieldSampler sampler = [&ladder, n](std::uint64_t i) {
        std::vector<double> a(n);
        for (std::size_t j = 1; j <= n; ++j) a[j - 1] = ladder.fine_increment(i, j, 0).o;
        return SpectralField(std::move(a), ladder.c0());
      };
      for (NormKind k : config.norms)
        res.reports.push_back(check_fernique(sampler, config.samples, config.quantile_samples, k, threads));
      break;
    }
    case ExperimentKind::VerifyAll:
      res.reports = run_verify_suite(config, table, threads);
      break;
  }

  for (auto& r : res.reports) r.config_hash = hash;
  if (!res.reports.empty()) {
    files["reports.jsonl"] = json_lines(res.reports);
    files["summary.txt"] = summary_table(res.reports);
  }
  if (config.svg) {
    for (const char* name : {"error_vs_n.csv", "error_vs_M.csv"}) {
      auto it = files.find(name);
      if (it == files.end()) continue;
      std::string x = std::string(name) == "error_vs_n.csv" ? "n" : "M";
      files[std::string(name).substr(0, std::string(name).size() - 4) + ".svg"] =
          svg_chart(it->second, x, "error", "p");
    }
  }

  fs::create_directories(res.out_dir);
  for (const auto& [name, text] : files) {
    std::ofstream f(fs::path(res.out_dir) / name, std::ios::binary | std::ios::trunc);
    f << text;
    if (!f) throw std::runtime_error("cannot write " + (fs::path(res.out_dir) / name).string());
    res.files.push_back({name, sha256_hex(text), text.size()});
  }

  for (const auto& r : res.reports)
    if (r.asserted && !r.passed) res.exit_code = 1;

  json manifest;
  manifest["config_hash"] = hash;
  manifest["config"] = config.resolved();
  manifest["seed"] = config.seed;
  manifest["rng"] = kRngName;
  manifest["software"] = "spde " + software_version();
  manifest["timestamp"] = utc_now();
  manifest["eta"] = res.eta;
  manifest["eta_condition"] = {{"p", vs.gamma_p}, {"beta", vs.gamma_beta}, {"gamma", eq.gamma}};
  manifest["embedding_constants"] = {{"sup", provenance(sup_est)}, {"lipschitz", provenance(leb_est)}};
  manifest["equation_theta"] = eq.theta;
  if (!ladder_info.is_null()) manifest["ladder"] = ladder_info;
  if (!res.trajectory_digest.empty()) manifest["trajectory_digest"] = res.trajectory_digest;
  json fl = json::array();
  for (const auto& f : res.files) fl.push_back({{"name", f.name}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  manifest["files"] = fl;
  manifest["exit_code"] = res.exit_code;
  res.manifest_path = (fs::path(res.out_dir) / "manifest.json").string();
  std::ofstream mf(res.manifest_path, std::ios::binary | std::ios::trunc);
  mf << manifest.dump(2) << "\n";
  if (!mf) throw std::runtime_error("cannot write " + res.manifest_path);
  return res;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string svg_chart(const std::string& csv_text, const std::string& x, const std::string& y,
                      const std::string& group, bool logx, bool logy) {
  std::stringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("svg: empty CSV");
  auto header = split(line);
  auto col = [&](const std::string& name) -> std::ptrdiff_t {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw ConfigError("svg: no column '" + name + "'");
    return it - header.begin();
  };
  const auto xi = col(x), yi = col(y);
  const std::ptrdiff_t gi = group.empty() ? -1 : col(group);
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    double xv = std::stod(cells.at(xi)), yv = std::stod(cells.at(yi));
    if ((logx && xv <= 0.0) || (logy && yv <= 0.0)) continue;
    series[gi >= 0 ? cells.at(gi) : ""].push_back({logx ? std::log10(xv) : xv, logy ? std::log10(yv) : yv});
  }
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& [_, pts] : series)
    for (auto [a, b] : pts) {
      x0 = std::min(x0, a), x1 = std::max(x1, a), y0 = std::min(y0, b), y1 = std::max(y1, b);
    }
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double W = 640, H = 400, m = 50;
  auto px = [&](double a) { return m + (a - x0) / (x1 - x0) * (W - 2 * m); };
  auto py = [&](double b) { return H - m - (b - y0) / (y1 - y0) * (H - 2 * m); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << H - m << "\" x2=\"" << W - m << "\" y2=\"" << H - m
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << m << "\" y1=\"" << m << "\" x2=\"" << m << "\" y2=\"" << H - m << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << (logx ? "log10 " : "") << x
     << "</text>\n";
  os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2 << ")\" text-anchor=\"middle\">"
     << (logy ? "log10 " : "") << y << "</text>\n";
  std::size_t c = 0;
  for (const auto& [name, pts] : series) {
    const char* color = colors[c++ % 5];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
    for (auto [a, b] : pts) os << px(a) << "," << py(b) << " ";
    os << "\"/>\n";
    if (!name.empty())
      os << "<text x=\"" << W - m << "\" y=\"" << m + 15.0 * static_cast<double>(c) << "\" fill=\"" << color
         << "\" text-anchor=\"end\">" << group << "=" << name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace spde
