#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sstream>

#include "spde/config.hpp"
#include "spde/digest.hpp"
#include "spde/harness.hpp"
#include "spde/report.hpp"
#include "tmpdir.hpp"

using namespace spde;
using nlohmann::json;

namespace {

const char* kGolden = "1db986e65e4faefdd55f78e83703b4f3081de540b0c40196fce47d2eb81ffc6a";

std::string config_path(const std::string& name) { return std::string(SPDE_TEST_CONFIG_DIR) + "/" + name; }

std::set<std::string> listing(const std::string& dir) {
  std::set<std::string> s;
  for (const auto& e : std::filesystem::directory_iterator(dir)) s.insert(e.path().filename().string());
  return s;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("golden trajectory digest") {
  TempDir d;
  auto cfg = load_config(config_path("burgers-thm1_1.toml"));
  auto res = run_experiment(cfg, {d.sub("out"), 1, {}});
  CHECK(res.trajectory_digest == kGolden);
  CHECK(res.eta == std::ldexp(1.0, 273));
  CHECK(res.exit_code == 0);
  auto m = json::parse(read_file(res.manifest_path));
  CHECK(m["trajectory_digest"] == kGolden);
  CHECK(m["seed"] == 42);
  CHECK(m["rng"] == kRngName);
  CHECK(m["ladder"]["fine_steps"] == 256);
  CHECK(m["ladder"]["fine_modes"] == 16);
  CHECK(m["config_hash"] == sha256_hex(m["config"].dump()));
  CHECK(m["config"]["equation"]["theta"].get<double>() > 1.0);

  // The CSV carries the same state: k, t, indicator, X_1..X_16.
  auto rows = lines(read_file(d.sub("out/trajectory.csv")));
  REQUIRE(rows.size() == 258);
  CHECK(rows[0].rfind("k,t,indicator,X_1,", 0) == 0);
  CHECK(rows[0].substr(rows[0].size() - 5) == ",X_16");
  CHECK(rows[1].rfind("0,0,", 0) == 0);
  CHECK(rows.back().rfind("256,1,,", 0) == 0);
}

TEST_CASE("outputs are exactly the manifest's files") {
  TempDir d;
  auto cfg = load_config(config_path("burgers-thm1_1.toml"));
  cfg.samples = 3;
  auto res = run_experiment(cfg, {d.sub("multi"), 2, {}});
  std::set<std::string> expect{"manifest.json"};
  auto m = json::parse(read_file(res.manifest_path));
  for (const auto& f : m["files"]) {
    expect.insert(f["name"].get<std::string>());
    CHECK(sha256_hex(read_file(d.sub("multi/" + f["name"].get<std::string>()))) == f["sha256"]);
  }
  CHECK(listing(d.sub("multi")) == expect);
  CHECK(expect.count("digests.csv") == 1);
  CHECK(expect.count("trajectory_2.csv") == 1);
  auto dig = lines(read_file(d.sub("multi/digests.csv")));
  CHECK(dig[1] == std::string("0,") + kGolden);
}

TEST_CASE("results do not depend on the thread count") {
  TempDir d;
  auto cfg = parse_config(json{{"kind", "converge-space"},
                               {"samples", 24},
                               {"seed", 5},
                               {"equation", {{"preset", "burgers"}}},
                               {"ladder", {{"levels", {{4, 32}, {8, 32}}}, {"reference", {16, 32}}, {"p", {1.0, 2.0}}}}},
                          "inline");
  auto a = run_experiment(cfg, {d.sub("t1"), 1, {}});
  auto b = run_experiment(cfg, {d.sub("t3"), 3, {}});
  CHECK(read_file(d.sub("t1/error_vs_n.csv")) == read_file(d.sub("t3/error_vs_n.csv")));
  CHECK(read_file(d.sub("t1/per_time_p2.csv")) == read_file(d.sub("t3/per_time_p2.csv")));
  auto rows = lines(read_file(d.sub("t1/error_vs_n.csv")));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "n,M,p,error,std_error");
  CHECK(rows[1].rfind("4,32,1,", 0) == 0);
}

TEST_CASE("seed override changes the run") {
  TempDir d;
  auto cfg = load_config(config_path("burgers-thm1_1.toml"));
  auto a = run_experiment(cfg, {d.sub("a"), 1, std::uint64_t{43}});
  CHECK(a.trajectory_digest != kGolden);
  CHECK(json::parse(read_file(a.manifest_path))["seed"] == 43);
}

TEST_CASE("output directory precedence") {
  auto cfg = load_config(config_path("burgers-thm1_1.toml"));
  ::unsetenv("SPDE_OUT_DIR");
  CHECK(resolve_out_dir(cfg, {}) == "spde-out");
  ::setenv("SPDE_OUT_DIR", "/tmp/env-out", 1);
  CHECK(resolve_out_dir(cfg, {}) == "/tmp/env-out");
  cfg.output_dir = "cfg-out";
  CHECK(resolve_out_dir(cfg, {}) == "cfg-out");
  CHECK(resolve_out_dir(cfg, {"opt-out", 1, {}}) == "opt-out");
  ::unsetenv("SPDE_OUT_DIR");
}

TEST_CASE("fernique and noise-rate experiments report") {
  TempDir d;
  auto f = parse_config(json{{"kind", "fernique"}, {"samples", 500}, {"equation", {{"preset", "burgers"}}},
                             {"fernique", {{"quantile_samples", 500}}}},
                        "inline");
  auto r = run_experiment(f, {d.sub("f"), 1, {}});
  REQUIRE(r.reports.size() == 2);
  for (const auto& rep : r.reports) {
    CHECK(rep.passed);
    CHECK(rep.config_hash == json::parse(read_file(r.manifest_path))["config_hash"]);
  }
  auto jl = lines(read_file(d.sub("f/reports.jsonl")));
  CHECK(jl.size() == 2);
  CHECK(json::parse(jl[0])["name"] == "fernique-sup");
  auto nr = parse_config(json{{"kind", "noise-rate"}, {"samples", 200}, {"equation", {{"preset", "burgers"}}}},
                         "inline");
  auto q = run_experiment(nr, {d.sub("nr"), 1, {}});
  CHECK(q.exit_code == 0);
  CHECK(lines(read_file(d.sub("nr/noise_rate.csv"))).size() == 4);
}

TEST_CASE("report formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(NAN) == "nan");
  auto rep = CheckReport::compare("x", 1.0, 1.0, 0.0, 0.0);
  CHECK(rep.passed);
  CHECK_FALSE(CheckReport::compare("x", 1.1, 1.0, 0.05, 0.0).passed);
  CHECK(CheckReport::compare("x", 1.1, 1.0, 0.05, 0.06).passed);
  auto j = to_json(rep);
  CHECK(j["name"] == "x");
  CHECK(j["passed"] == true);
  CsvTable t({"a", "b"});
  t.add_row(std::vector<double>{1.5, -2.0});
  t.add_row(std::vector<std::string>{"x", "y"});
  CHECK(t.str() == "a,b\n1.5,-2\nx,y\n");
  CHECK_THROWS(t.add_row(std::vector<double>{1.0}));
  auto summary = summary_table({rep, CheckReport::compare("y", 2.0, 1.0, 0.0, 0.0)});
  CHECK(summary.find("PASS") != std::string::npos);
  CHECK(summary.find("FAIL") != std::string::npos);
}

TEST_CASE("svg chart") {
  std::string csv = "n,M,p,error,std_error\n8,64,2,0.1,0.01\n16,64,2,0.05,0.01\n";
  auto svg = svg_chart(csv, "n", "error", "p");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK_THROWS(svg_chart(csv, "n", "missing"));
}

TEST_CASE("sha256") {
  CHECK(sha256_hex(std::string_view("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex(std::string_view("")) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
