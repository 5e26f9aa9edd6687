#include <doctest.h>

#include <string>

#include "spde/config.hpp"
#include "spde/errors.hpp"
#include "tmpdir.hpp"

using namespace spde;

namespace {

std::string error_of(const std::string& path) {
  try {
    load_config(path);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("shipped configs load") {
  for (const char* name : {"burgers-thm1_1.toml", "allen-cahn.toml", "converge-space.toml", "converge-time.toml",
                           "converge-dyadic.toml", "noise-rate.toml", "fernique.toml", "verify.toml",
                           "verify-smoke.toml"}) {
    CAPTURE(name);
    CHECK_NOTHROW(load_config(std::string(SPDE_TEST_CONFIG_DIR) + "/" + name));
  }
  auto c = load_config(std::string(SPDE_TEST_CONFIG_DIR) + "/burgers-thm1_1.toml");
  CHECK(c.kind == ExperimentKind::Simulate);
  CHECK(c.seed == 42);
  CHECK(c.n == 16);
  CHECK(c.M == 256);
  CHECK(c.equation.chi == 1.0 / 64);
  CHECK(c.equation.varrho == 0.1875);
  CHECK(load_config(std::string(SPDE_TEST_CONFIG_DIR) + "/noise-rate.toml", ExperimentKind::Fernique).kind ==
        ExperimentKind::Fernique);
}

TEST_CASE("missing required field is named") {
  TempDir d;
  auto p = d.write("a.toml", "kind = \"simulate\"\n[scheme]\nn = 8\n");
  auto msg = error_of(p);
  CHECK(contains(msg, p));
  CHECK(contains(msg, "missing required field 'equation"));
  auto q = d.write("b.toml", "kind = \"simulate\"\n[equation]\nc1 = 1.0\n");
  CHECK(contains(error_of(q), "equation.preset"));
}

TEST_CASE("chi at the admissible endpoint is accepted, beyond it rejected") {
  TempDir d;
  // varrho/2 - 1/16 = 1/32 for varrho = 3/16.
  auto ok = d.write("ok.toml", "[equation]\npreset = \"burgers\"\nvarrho = 0.1875\nchi = 0.03125\n");
  CHECK_NOTHROW(load_config(ok));
  auto bad = d.write("bad.toml", "[equation]\npreset = \"burgers\"\nvarrho = 0.1875\nchi = 0.0313\n");
  auto msg = error_of(bad);
  CHECK(contains(msg, "chi"));
  CHECK(contains(msg, "equation"));
  auto ac = d.write("ac.toml", "[equation]\npreset = \"allen-cahn\"\nvarrho = 0.2\nchi = 0.0112\n");
  CHECK(contains(error_of(ac), "chi"));
}

TEST_CASE("parse errors carry line and column") {
  TempDir d;
  auto t = d.write("p.toml", "kind = \"simulate\"\n[equation]\npreset = = 1\n");
  auto msg = error_of(t);
  CHECK(contains(msg, t + ":3:"));
  CHECK(contains(msg, "parse error"));
  auto j = d.write("p.json", "{\n  \"kind\": \"simulate\",\n  \"equation\": {\"preset\": }\n}\n");
  CHECK(contains(error_of(j), j + ":3:"));
  CHECK(contains(error_of(d.write("x.yaml", "a: 1")), "extension"));
  CHECK(contains(error_of(d.sub("absent.toml")), "cannot open"));
}

TEST_CASE("unknown fields and bad values are rejected with their path") {
  TempDir d;
  CHECK(contains(error_of(d.write("u.toml", "[equation]\npreset = \"burgers\"\n[scheme]\nNN = 3\n")),
                 "scheme.NN: unknown field"));
  CHECK(contains(error_of(d.write("k.toml", "kind = \"nope\"\n[equation]\npreset = \"burgers\"\n")), "kind"));
  CHECK(contains(error_of(d.write("n.toml", "[equation]\npreset = \"burgers\"\n[scheme]\nn = -2\n")), "scheme.n"));
  CHECK(contains(error_of(d.write("c2.toml", "[equation]\npreset = \"burgers\"\nc2 = 1.0\n")), "equation.c2"));
  CHECK(contains(error_of(d.write("g.toml", "[equation]\npreset = \"burgers\"\ngamma = 1.0\n")), "gamma"));
}

TEST_CASE("convergence ladders must nest") {
  TempDir d;
  const std::string head = "kind = \"converge-space\"\nsamples = 10\n[equation]\npreset = \"burgers\"\n";
  CHECK_NOTHROW(load_config(d.write("ok.toml", head + "[ladder]\nlevels = [[8, 64]]\nreference = [32, 128]\n")));
  CHECK(contains(error_of(d.write("nd.toml", head + "[ladder]\nlevels = [[12, 64]]\nreference = [32, 128]\n")),
                 "ladder.levels"));
  CHECK(contains(error_of(d.write("eq.toml", head + "[ladder]\nlevels = [[32, 128]]\nreference = [32, 128]\n")),
                 "ladder.levels"));
  CHECK(contains(error_of(d.write("s.toml", "kind = \"converge-space\"\nsamples = 1\n[equation]\npreset = "
                                            "\"burgers\"\n[ladder]\nlevels = [[8, 64]]\nreference = [32, 128]\n")),
                 "samples"));
}

TEST_CASE("config hash tracks only output-relevant fields") {
  auto base = parse_config(nlohmann::json{{"equation", {{"preset", "burgers"}}}}, "inline");
  auto same = parse_config(nlohmann::json{{"equation", {{"preset", "burgers"}}}, {"output_dir", "/tmp/x"}}, "inline");
  auto other = parse_config(nlohmann::json{{"equation", {{"preset", "burgers"}}}, {"seed", 43}}, "inline");
  CHECK(base.hash() == same.hash());
  CHECK(base.hash() != other.hash());
  CHECK(base.hash().size() == 64);
}

TEST_CASE("embedding table") {
  auto t = EmbeddingTable::load(std::string(SPDE_TEST_CONFIG_DIR) + "/embedding_constants.json");
  const auto& l4 = t.lebesgue(0.125, 4.0);
  CHECK(l4.value() == doctest::Approx(1.05 * l4.raw));
  CHECK(t.lebesgue_value(0.125, 4.0, 4.0) == doctest::Approx(l4.value() * std::pow(4.0, -0.125)));
  CHECK(t.sup_value(0.2, 8.0) > 1.0);
  CHECK_THROWS_AS(t.sup(0.1, 8.0), ConfigError);
  auto back = EmbeddingTable::from_json(t.to_json());
  CHECK(back.entries().size() == t.entries().size());
  CHECK(back.lebesgue(1.0 / 6.0, 6.0).raw == t.lebesgue(1.0 / 6.0, 6.0).raw);

  EquationSpec eq = burgers_preset();
  resolve_theta(eq, t);
  CHECK(eq.theta == doctest::Approx(preset_theta(eq, l4.value())));
  EquationSpec fixed = burgers_preset();
  fixed.theta = 7.0;
  resolve_theta(fixed, t);
  CHECK(fixed.theta == 7.0);
}
