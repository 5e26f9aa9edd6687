// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "spde/config.hpp"
#include "spde/errors.hpp"
#include "spde/harness.hpp"
#include "spde/noise.hpp"
#include "spde/parallel.hpp"
#include "spde/scheme.hpp"
#include "spde/series.hpp"
#include "spde/verify.hpp"

using namespace spde;
using std::numbers::pi;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string g(double x) { return fmt("%.6g", x); }

unsigned g_threads = 1;
std::uint64_t g_seed = 20240601;
EmbeddingTable g_table;

double max_abs_diff(const SpectralField& a, const SpectralField& b) {
  double m = 0.0;
  for (std::size_t j = 1; j <= std::min(a.size(), b.size()); ++j) m = std::max(m, std::abs(a.coeff(j) - b.coeff(j)));
  return m;
}

Outcome noise_spatial_error() {
  auto r = check_noise_rate({8, 16, 32}, 1.0, 0.1875, 0.05, 2.0, 10000, 1.0, g_seed, g_threads);
  std::string d;
  bool ok = r.report.passed;
  for (const auto& row : r.rows) {
    double z = std::abs(row.mc_mean - row.oracle) / row.mc_se;
    ok = ok && std::abs(row.mc_mean - row.oracle) <= 3.0 * row.mc_se + row.oracle_tail &&
         row.rate_lhs <= row.rate_rhs;
    d += "n=" + std::to_string(row.n) + " |dev|/se=" + fmt("%.2f", z) + " envelope=" + g(row.rate_lhs) + "/" +
         g(row.rate_rhs) + "; ";
  }
  return {ok, d + "10000 samples"};
}

Outcome fernique() {
  NoiseLadder ladder(g_seed, 1, 16, 1.0, 0.0);
  FieldSampler s = [&ladder](std::uint64_t i) {
    std::vector<double> a(16);
    for (std::size_t j = 1; j <= 16; ++j) a[j - 1] = ladder.fine_increment(i, j, 0).o;
    return SpectralField(std::move(a));
  };
  bool ok = true;
  std::string d;
  for (NormKind k : {NormKind::Sup, NormKind::H}) {
    auto r = check_fernique(s, 10000, 10000, k, g_threads);
    ok = ok && r.passed;
    d += to_string(k) + ": mean+3se=" + g(r.lhs) + " < 13; ";
  }
  return {ok, d + "10000 samples"};
}

Outcome norm_identities() {
  double worst_id = 0.0, worst_ratio = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    PhiloxStream r(g_seed, 1000 + i);
    double c0 = std::exp(r.uniform(-2.0, 2.0));
    SpectralField v = random_test_field(r, 1 + i % 64, c0);
    double s = 0.0;
    for (std::size_t j = 1; j <= v.size(); ++j) s += double(j * j) * pi * pi * v.coeff(j) * v.coeff(j);
    double h = hr_norm(v, 0.5);
    worst_id = std::max(worst_id, std::abs(h * h - c0 * s) / (c0 * s));
  }
  std::vector<double> ratios(10000);
  parallel_for(ratios.size(), g_threads, [&](std::size_t i) {
    PhiloxStream r(g_seed, 5000 + i);
    double c0 = std::exp(r.uniform(-2.0, 2.0));
    SpectralField v = random_test_field(r, 32, c0);
    ratios[i] = dual_half_norm(derivative_sine_expansion(v, 4096)) / hr_norm(v, 0.0) * std::sqrt(c0);
  });
  for (double x : ratios) worst_ratio = std::max(worst_ratio, x);
  // Sine expansion of sqrt2 cos(pi x), truncated at 512 modes.
  std::vector<double> w(512, 0.0);
  for (std::size_t j = 2; j <= 512; j += 2) w[j - 1] = 4.0 * double(j) / (pi * (double(j * j) - 1.0));
  SpectralField wit(w);
  double witness = dual_half_norm(derivative_sine_expansion(wit, 4096)) / hr_norm(wit, 0.0);
  bool ok = worst_id <= 1e-14 && worst_ratio <= 1.0 + 1e-10 && witness >= 0.98;
  return {ok, "identity max rel err=" + g(worst_id) + " (1e3 fields); sup ratio*sqrt(c0)=" + fmt("%.12f", worst_ratio) +
                  " (1e4 fields); witness=" + fmt("%.12f", witness)};
}

Outcome drift_oracle() {
  bool ok = true;
  std::string d;
  for (auto eq : {burgers_preset(), allen_cahn_preset()}) {
    auto r = check_drift_oracle_suite(eq, 200, 64, g_seed, 1e-10);
    ok = ok && r.passed;
    d += to_string(eq.kind) + " max diff=" + g(r.lhs) + "; ";
  }
  auto e1 = SpectralField::mode(1, 1);
  double worst = 0.0;
  for (const auto& F : {burgers_apply_exact(e1, -0.5), burgers_apply_fast(e1, -0.5)}) {
    worst = std::max(worst, std::abs(F.coeff(1)));
    worst = std::max(worst, std::abs(F.coeff(2) + std::numbers::sqrt2 * pi / 2));
  }
  for (double a : {0.5, 1.0, 2.0}) {
    auto v = SpectralField::mode(1, 1, 1.0, a);
    for (const auto& F : {allen_cahn_apply_exact(v, 1.0, 1.0), allen_cahn_apply(v, 1.0, 1.0)}) {
      worst = std::max(worst, std::abs(F.coeff(1) - (a - 1.5 * a * a * a)));
      worst = std::max(worst, std::abs(F.coeff(2)));
      worst = std::max(worst, std::abs(F.coeff(3) - a * a * a / 2));
    }
  }
  ok = ok && worst <= 1e-12;
  return {ok, d + "single-mode max err=" + g(worst)};
}

Outcome inequality_suites() {
  bool ok = true;
  std::string d;
  for (const char* name : {"burgers", "allen-cahn"}) {
    EquationSpec eq = preset_equation(name);
    double k = g_table.lebesgue_value(eq.rho, lipschitz_lebesgue_exponent(eq), eq.c0);
    auto c = check_coercivity_suite(eq, 10000, 16, g_seed, g_threads);
    auto l = check_lipschitz_suite(eq, k, 10000, 16, g_seed, g_threads);
    ok = ok && c.passed && l.passed;
    d += std::string(name) + " coercivity worst=" + g(c.lhs) + " lipschitz worst=" + g(l.lhs) + "; ";
  }
  auto s = check_skew_suite(10000, 16, g_seed, 1e-10);
  ok = ok && s.passed;
  return {ok, d + "skew worst=" + g(s.lhs) + " (1e4 each)"};
}

Outcome apriori() {
  bool ok = true;
  std::string d;
  for (const char* name : {"burgers", "allen-cahn"}) {
    EquationSpec eq = preset_equation(name);
    resolve_theta(eq, g_table);
    BoundCheckConfig bc, tight;
    tight.slack = 1.0;
    NoiseLadder ladder(g_seed, 256, 16, 1.0, bc.eta, eq.c0);
    SchemeConfig sc{eq, 16, GridSpec(1.0, 256), SpectralField({0.5, 0.25}, eq.c0), true, true};
    std::vector<int> pass(100), pass1(100);
    std::vector<double> worst(100);
    parallel_for(100, g_threads, [&](std::size_t i) {
      Trajectory tr = run(sc, ladder, i);
      auto a = check_apriori_bound(tr, eq, bc);
      pass[i] = a.report.passed;
      pass1[i] = check_apriori_bound(tr, eq, tight).report.passed;
      double w = 0.0;
      for (std::size_t k = 0; k < a.lhs.size(); ++k) w = std::max(w, a.rhs[k] > 0 ? a.lhs[k] / a.rhs[k] : 0.0);
      worst[i] = w;
    });
    int n = 0, n1 = 0;
    double w = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      n += pass[i];
      n1 += pass1[i];
      w = std::max(w, worst[i]);
    }
    ok = ok && n == 100;
    d += std::string(name) + " " + std::to_string(n) + "/100 (worst lhs/rhs=" + g(w) + ", slack 1.0: " +
         std::to_string(n1) + "/100); ";
  }
  return {ok, d};
}

Outcome strong_convergence() {
  EquationSpec eq = burgers_preset();
  resolve_theta(eq, g_table);
  SpectralField xi({0.5, 0.25});
  NoiseLadder ladder(g_seed, 2048, 256, 1.0, 0.0);
  SchemeConfig ref{eq, 256, GridSpec(1.0, 2048), xi};
  std::vector<SchemeConfig> coarse;
  for (auto [n, M] : {std::pair{8, 64}, {16, 128}, {32, 256}, {64, 512}})
    coarse.push_back({eq, std::size_t(n), GridSpec(1.0, std::size_t(M)), xi});
  auto res = strong_error_study(coarse, ref, ladder, 1000, {2.0}, g_threads).front();
  bool ok = true;
  std::string d;
  for (std::size_t l = 0; l < res.levels.size(); ++l) {
    const auto& lv = res.levels[l];
    if (l > 0 && !(lv.value < res.levels[l - 1].value)) ok = false;
    d += "(" + std::to_string(lv.n) + "," + std::to_string(lv.M) + ")=" + g(lv.value) + "+-" + g(lv.std_error) + " ";
  }
  double ratio = res.levels.back().value / res.levels.front().value;
  ok = ok && ratio < 0.25;
  return {ok, d + "finest/coarsest=" + g(ratio) + " (1000 samples, p=2)"};
}

Outcome taming_contrast() {
  EquationSpec eq = burgers_preset();
  const std::size_t n = 8, M = 20;
  const double T = 2.0, h = 0.1;
  NoiseLadder ladder(g_seed, M, n, T, 0.0);
  auto path = convolution_path(ladder, 0, n, GridSpec(T, M));
  SpectralField xi = SpectralField::mode(1, n, 1.0, 1000.0);

  SchemeConfig cfg{eq, n, GridSpec(T, M), xi};
  cfg.taming = false;
  SpectralField x = xi;
  std::size_t blew = 0;
  double peak = 0.0;
  for (std::size_t k = 0; k < M && blew == 0; ++k) {
    try {
      x = step(x, path.O[k], path.O[k + 1], semigroup_apply(xi, k * h), cfg, k);
      peak = hr_norm(x, 0.0);
      if (!(peak <= 1e10)) blew = k + 1;
    } catch (const OverflowError&) {
      peak = INFINITY;
      blew = k + 1;
    }
  }

  cfg.taming = true;
  Trajectory tr = run_on_path(cfg, path);
  double sup_o = 0.0, sup_xi = 0.0, drift = 0.0, sup_x = 0.0;
  for (std::size_t k = 0; k <= M; ++k) {
    sup_o = std::max(sup_o, hr_norm(tr.O[k], 0.0));
    sup_xi = std::max(sup_xi, hr_norm(tr.Xi[k], 0.0));
    sup_x = std::max(sup_x, hr_norm(tr.X[k], 0.0));
  }
  for (std::size_t k = 0; k < M; ++k) {
    if (!tr.indicator[k]) continue;
    SpectralField f = apply_drift(eq, tr.X[k]);
    for (std::size_t j = 1; j <= n; ++j) f.mutable_coeffs()[j - 1] *= phi1_weight(j, h, 0.0, eq.c0);
    drift = std::max(drift, hr_norm(f, 0.0));
  }
  const double budget = 2.0 * std::pow(h, -eq.chi) + sup_o + sup_xi + drift;
  bool ok = blew >= 1 && blew <= 20 && sup_x <= budget;
  return {ok, "untamed |X|_H > 1e10 at step " + std::to_string(blew) + "; tamed sup |X|_H=" + g(sup_x) +
                  " <= budget " + g(budget)};
}

Outcome determinism(const fs::path& scratch) {
  std::vector<json> docs{
      {{"kind", "simulate"}, {"samples", 4}, {"seed", 42}, {"equation", {{"preset", "burgers"}}}},
      {{"kind", "simulate"}, {"samples", 2}, {"seed", 9}, {"equation", {{"preset", "allen-cahn"}}}},
      {{"kind", "converge-space"},
       {"samples", 40},
       {"equation", {{"preset", "burgers"}}},
       {"ladder", {{"levels", {{8, 64}, {16, 64}}}, {"reference", {32, 64}}, {"p", {1.0, 2.0}}}}},
      {{"kind", "converge-time"},
       {"samples", 40},
       {"equation", {{"preset", "allen-cahn"}}},
       {"ladder", {{"levels", {{16, 16}, {16, 32}}}, {"reference", {16, 64}}}}},
      {{"kind", "noise-rate"}, {"samples", 500}, {"equation", {{"preset", "burgers"}}}},
      {{"kind", "fernique"}, {"samples", 500}, {"equation", {{"preset", "burgers"}}}, {"fernique", {{"quantile_samples", 500}}}},
  };
  unsigned many = std::max(4u, g_threads);
  bool ok = true;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ExperimentConfig c = parse_config(docs[i], "determinism-" + std::to_string(i));
    json files[2];
    unsigned counts[2] = {1, many};
    for (int t = 0; t < 2; ++t) {
      auto dir = scratch / ("det" + std::to_string(i) + "_" + std::to_string(counts[t]));
      RunResult r = run_experiment(c, {dir.string(), counts[t], {}});
      std::ifstream in(r.manifest_path);
      json m = json::parse(in);
      files[t] = {{"files", m["files"]}, {"config_hash", m["config_hash"]}, {"eta", m["eta"]}};
    }
    ok = ok && files[0] == files[1];
  }
  return {ok, std::to_string(docs.size()) + " experiments, 1 vs " + std::to_string(many) +
                  " threads, manifest checksums identical"};
}

Outcome eta_machinery() {
  bool ok = true;
  std::string d;
  const double C = g_table.sup_value(0.2, 8.0);
  for (const char* name : {"burgers", "allen-cahn"}) {
    EquationSpec eq = preset_equation(name);
    double eta = select_eta(8.0, 0.2, 1.0, eq.gamma, eq.c0, C);
    auto r = check_gamma_condition(8.0, 0.2, 1.0, eq.gamma, eta, eq.c0, C);
    ok = ok && r.passed;
    d += std::string(name) + " eta=2^" + std::to_string(std::ilogb(eta)) + " lhs=" + g(r.lhs) + "; ";
  }
  auto s = power_series_sum(0.0, 2.0, 1.0, 0.0);
  double err = std::abs(s.value - pi * pi / 6.0);
  ok = ok && err <= 1e-10;
  return {ok, d + "|S - pi^2/6|=" + g(err)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spde acceptance criteria"};
  std::string table_path = default_embedding_path();
  std::string scratch = (fs::temp_directory_path() / "spde-acceptance").string();
  std::vector<int> only;
  app.add_option("--threads", g_threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--seed", g_seed, "base seed");
  app.add_option("--embedding", table_path, "embedding constants file");
  app.add_option("--scratch", scratch, "directory for experiment outputs");
  app.add_option("--only", only, "criterion numbers to run");
  CLI11_PARSE(app, argc, argv);
  if (g_threads == 0) g_threads = std::max(1u, std::thread::hardware_concurrency());

  try {
    g_table = EmbeddingTable::load(table_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "cannot load embedding constants: %s\n", e.what());
    return 2;
  }
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all{
      {1, "noise-spatial-error", noise_spatial_error},
      {2, "fernique", fernique},
      {3, "norm-identities", norm_identities},
      {4, "drift-oracle", drift_oracle},
      {5, "inequality-suites", inequality_suites},
      {6, "apriori-bound", apriori},
      {7, "strong-convergence", strong_convergence},
      {8, "taming-contrast", taming_contrast},
      {9, "determinism", [&] { return determinism(scratch); }},
      {10, "eta-condition", eta_machinery},
  };

  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::printf("%s %2d %-20s %s [%.1fs]\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  fs::remove_all(scratch);
  return failed ? 1 : 0;
}
