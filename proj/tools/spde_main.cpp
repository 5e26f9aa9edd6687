#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "spde/config.hpp"
#include "spde/embedding.hpp"
#include "spde/errors.hpp"
#include "spde/harness.hpp"
#include "spde/report.hpp"

namespace {

struct RunArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
};

void add_run(CLI::App& app, const char* name, const char* help, RunArgs& a) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--config", a.config, "TOML or JSON experiment config")->required();
  sub->add_option("--seed", a.seed, "override the config seed");
  sub->add_option("--out", a.out, "output directory (default: config, then $SPDE_OUT_DIR)");
  sub->add_option("--threads", a.threads, "worker threads, 0 = all cores");
}

int run(const std::string& kind, CLI::App& app, const RunArgs& a) {
  spde::ExperimentConfig cfg = spde::load_config(a.config, spde::experiment_kind_from_string(kind));
  spde::RunOptions opt;
  opt.out_dir = a.out;
  opt.threads = a.threads;
  if (app.get_subcommand(kind == "verify-all" ? "verify" : kind)->count("--seed")) opt.seed = a.seed;
  spde::RunResult r = spde::run_experiment(cfg, opt);
  if (!r.reports.empty()) std::cout << spde::summary_table(r.reports);
  if (!r.trajectory_digest.empty()) std::cout << "trajectory digest " << r.trajectory_digest << "\n";
  std::cout << "eta " << spde::format_double(r.eta) << "\n";
  std::cout << "wrote " << r.files.size() << " file(s) and " << r.manifest_path << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tamed exponential Euler simulations and numerical checks for stochastic Burgers and Allen-Cahn"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "spde " + spde::software_version());

  RunArgs a;
  add_run(app, "simulate", "simulate sample paths", a);
  add_run(app, "converge-space", "strong error against a spatially refined reference", a);
  add_run(app, "converge-time", "strong error against a temporally refined reference", a);
  add_run(app, "noise-rate", "truncation error of the stochastic convolution", a);
  add_run(app, "fernique", "exponential square moment of the stochastic convolution", a);
  add_run(app, "verify", "run the full verification suite", a);

  std::string const_out = spde::default_embedding_path();
  std::size_t lmodes = 64, liters = 1000, smodes = 8, siters = 400;
  std::uint64_t cseed = 1;
  auto* cons = app.add_subcommand("constants", "estimate the embedding constants and write the cache");
  cons->add_option("--out", const_out, "output JSON");
  cons->add_option("--modes", lmodes, "modes for the L^q / H_r ratios");
  cons->add_option("--iters", liters, "ascent iterations per level");
  cons->add_option("--sup-modes", smodes, "modes for the sup / W^{beta,p} ratio");
  cons->add_option("--sup-iters", siters, "evaluations per restart for the sup ratio");
  cons->add_option("--seed", cseed, "estimator seed");

  std::string csv, x = "n", y = "error", group, svg_out;
  bool linear = false;
  auto* svg = app.add_subcommand("svg", "line chart from a CSV table");
  svg->add_option("--csv", csv, "input CSV")->required()->check(CLI::ExistingFile);
  svg->add_option("--x", x, "x column");
  svg->add_option("--y", y, "y column");
  svg->add_option("--group", group, "one line per value of this column");
  svg->add_option("--out", svg_out, "output SVG (default: stdout)");
  svg->add_flag("--linear", linear, "linear axes instead of log-log");

  CLI11_PARSE(app, argc, argv);

  try {
    for (const char* k : {"simulate", "converge-space", "converge-time", "noise-rate", "fernique"})
      if (app.got_subcommand(k)) return run(k, app, a);
    if (app.got_subcommand("verify")) return run("verify-all", app, a);
    if (app.got_subcommand("constants")) {
      spde::EmbeddingTable t;
      try {
        t = spde::EmbeddingTable::load(const_out);
      } catch (const spde::ConfigError&) {
      }
      for (auto [r, q] : {std::pair{0.125, 4.0}, std::pair{1.0 / 6.0, 6.0}}) {
        spde::EmbeddingEstimate e = spde::estimate_embedding(r, q, lmodes, liters, cseed);
        std::cout << "L^" << q << " / H_" << r << ": " << spde::format_double(e.raw) << "\n";
        t.add(e);
      }
      spde::EmbeddingEstimate s = spde::estimate_sup_embedding(0.2, 8.0, smodes, siters, cseed);
      std::cout << "sup / W^{0.2,8}: " << spde::format_double(s.raw) << "\n";
      t.add(s);
      std::ofstream f(const_out, std::ios::trunc);
      f << t.to_json().dump(2) << "\n";
      if (!f) throw std::runtime_error("cannot write " + const_out);
      std::cout << "wrote " << const_out << "\n";
      return 0;
    }
    if (app.got_subcommand("svg")) {
      std::ifstream in(csv);
      std::stringstream ss;
      ss << in.rdbuf();
      std::string chart = spde::svg_chart(ss.str(), x, y, group, !linear, !linear);
      if (svg_out.empty()) {
        std::cout << chart;
      } else {
        std::ofstream f(svg_out, std::ios::trunc);
        f << chart;
      }
      return 0;
    }
  } catch (const spde::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
