#include "spde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "spde/digest.hpp"
#include "spde/errors.hpp"

namespace spde {

using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::ConvergeSpace: return "converge-space";
    case ExperimentKind::ConvergeTime: return "converge-time";
    case ExperimentKind::NoiseRate: return "noise-rate";
    case ExperimentKind::Fernique: return "fernique";
    case ExperimentKind::VerifyAll: return "verify-all";
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::Simulate, ExperimentKind::ConvergeSpace, ExperimentKind::ConvergeTime,
                 ExperimentKind::NoiseRate, ExperimentKind::Fernique, ExperimentKind::VerifyAll})
    if (to_string(k) == s) return k;
  if (s == "verify") return ExperimentKind::VerifyAll;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

std::string preset_dir() { return SPDE_PRESET_DIR; }
std::string software_version() { return SPDE_VERSION; }
std::string default_embedding_path() { return preset_dir() + "/embedding_constants.json"; }

double lipschitz_lebesgue_exponent(const EquationSpec& eq) {
  return eq.kind == EquationKind::Burgers ? 4.0 : 6.0;
}

// ---- embedding table

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

}  // namespace

EmbeddingTable EmbeddingTable::from_json(const json& j) {
  EmbeddingTable t;
  try {
    for (const auto& e : j.at("entries")) {
      EmbeddingEstimate x;
      x.kind = e.at("kind").get<std::string>();
      x.exponent = e.at("exponent").get<double>();
      x.lebesgue_p = e.at("lebesgue_p").get<double>();
      x.modes = e.at("modes").get<std::size_t>();
      x.iters = e.at("iters").get<std::size_t>();
      x.seed = e.at("seed").get<std::uint64_t>();
      x.c0 = e.value("c0", 1.0);
      x.raw = e.at("raw").get<double>();
      x.safety = e.value("safety", 1.05);
      if (x.kind != "lebesgue" && x.kind != "sup") throw ConfigError("embedding table: unknown kind " + x.kind);
      if (!(x.raw > 0.0)) throw ConfigError("embedding table: raw ratio must be positive");
      t.entries_.push_back(std::move(x));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("embedding table: ") + e.what());
  }
  return t;
}

EmbeddingTable EmbeddingTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open embedding table " + path);
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json EmbeddingTable::to_json() const {
  json arr = json::array();
  for (const auto& e : entries_) {
    arr.push_back({{"kind", e.kind}, {"exponent", e.exponent}, {"lebesgue_p", e.lebesgue_p}, {"modes", e.modes},
                   {"iters", e.iters}, {"seed", e.seed}, {"c0", e.c0}, {"raw", e.raw}, {"safety", e.safety},
                   {"value", e.value()}});
  }
  return {{"entries", arr}};
}

void EmbeddingTable::add(const EmbeddingEstimate& e) {
  for (auto& x : entries_) {
    if (x.kind == e.kind && close(x.exponent, e.exponent) && close(x.lebesgue_p, e.lebesgue_p)) {
      x = e;
      x.maximizer.clear();
      return;
    }
  }
  entries_.push_back(e);
  entries_.back().maximizer.clear();
}

const EmbeddingEstimate& EmbeddingTable::lebesgue(double r, double q) const {
  for (const auto& x : entries_)
    if (x.kind == "lebesgue" && close(x.exponent, r) && close(x.lebesgue_p, q)) return x;
  throw ConfigError("embedding table has no L^" + std::to_string(q) + "/H_" + std::to_string(r) +
                    " entry; run `spde constants`");
}

const EmbeddingEstimate& EmbeddingTable::sup(double beta, double p) const {
  for (const auto& x : entries_)
    if (x.kind == "sup" && close(x.exponent, beta) && close(x.lebesgue_p, p)) return x;
  throw ConfigError("embedding table has no sup/W^{" + std::to_string(beta) + "," + std::to_string(p) +
                    "} entry; run `spde constants`");
}

double EmbeddingTable::lebesgue_value(double r, double q, double c0) const {
  const EmbeddingEstimate& e = lebesgue(r, q);
  return e.value() * std::pow(c0 / e.c0, -r);
}

void resolve_theta(EquationSpec& eq, const EmbeddingTable& table) {
  if (eq.theta > 0.0) return;
  eq.theta = preset_theta(eq, table.lebesgue_value(eq.rho, lipschitz_lebesgue_exponent(eq), eq.c0));
}

EquationSpec preset_equation(const std::string& name) {
  EquationKind k = equation_kind_from_string(name);
  return k == EquationKind::Burgers ? burgers_preset() : allen_cahn_preset();
}

// ---- config parsing

namespace {

class Node {
 public:
  Node(const json& j, std::string path, const std::string& origin) : j_(j), path_(std::move(path)), origin_(origin) {}

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(origin_ + ": " + field(key) + ": " + msg);
  }
  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) fail(it.key(), "unknown field");
  }

  Node child(const std::string& key) const {
    static const json empty = json::object();
    if (!has(key)) return Node(empty, field(key), origin_);
    if (!j_.at(key).is_object()) fail(key, "expected a table");
    return Node(j_.at(key), field(key), origin_);
  }

  double num(const std::string& key, double def) const { return has(key) ? num(key) : def; }
  double num(const std::string& key) const {
    const json& v = req(key);
    if (!v.is_number()) fail(key, "expected a number");
    double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }
  std::size_t count(const std::string& key, std::size_t def) const { return has(key) ? count(key) : def; }
  std::size_t count(const std::string& key) const { return to_count(req(key), key); }
  std::uint64_t u64(const std::string& key, std::uint64_t def) const {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0))
      fail(key, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }
  bool flag(const std::string& key, bool def) const {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) fail(key, "expected true or false");
    return j_.at(key).get<bool>();
  }
  std::string str(const std::string& key) const {
    const json& v = req(key);
    if (!v.is_string()) fail(key, "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

  std::vector<double> nums(const std::string& key, std::vector<double> def) const {
    if (!has(key)) return def;
    std::vector<double> out;
    for (const json& x : arr(key)) {
      if (!x.is_number() || !std::isfinite(x.get<double>())) fail(key, "expected a list of finite numbers");
      out.push_back(x.get<double>());
    }
    return out;
  }
  std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> def) const {
    if (!has(key)) return def;
    std::vector<std::size_t> out;
    for (const json& x : arr(key)) out.push_back(to_count(x, key));
    return out;
  }
  std::vector<std::string> strs(const std::string& key, std::vector<std::string> def) const {
    if (!has(key)) return def;
    std::vector<std::string> out;
    for (const json& x : arr(key)) {
      if (!x.is_string()) fail(key, "expected a list of strings");
      out.push_back(x.get<std::string>());
    }
    return out;
  }
  Resolution resolution(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 2) fail(key, "expected an [n, M] pair");
    return {to_count(v[0], key), to_count(v[1], key)};
  }
  const json& arr(const std::string& key) const {
    const json& v = req(key);
    if (!v.is_array()) fail(key, "expected a list");
    return v;
  }
  const json& req(const std::string& key) const {
    if (!has(key)) throw ConfigError(origin_ + ": missing required field '" + field(key) + "'");
    return j_.at(key);
  }

 private:
  std::size_t to_count(const json& v, const std::string& key) const {
    if (!v.is_number_integer()) fail(key, "expected an integer");
    if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) fail(key, "must be nonnegative");
    return v.get<std::size_t>();
  }

  const json& j_;
  std::string path_;
  const std::string& origin_;
};

bool dyadic(std::size_t a, std::size_t b) {
  if (a == 0 || b % a != 0) return false;
  std::size_t r = b / a;
  return (r & (r - 1)) == 0;
}

EquationSpec parse_equation(const Node& e) {
  e.allow({"preset", "c0", "c1", "c2", "varrho", "chi", "gamma", "theta"});
  const std::string name = e.str("preset");
  EquationKind kind;
  try {
    kind = equation_kind_from_string(name);
  } catch (const ConfigError& err) {
    e.fail("preset", err.what());
  }
  EquationSpec base = kind == EquationKind::Burgers ? burgers_preset() : allen_cahn_preset();
  const double c0 = e.num("c0", base.c0), c1 = e.num("c1", base.c1), varrho = e.num("varrho", base.varrho);
  if (!(c0 > 0.0)) e.fail("c0", "must be positive");
  EquationSpec s;
  if (kind == EquationKind::Burgers) {
    if (e.has("c2")) e.fail("c2", "not used by the Burgers equation");
    s = burgers_preset(c0, c1, varrho);
  } else {
    s = allen_cahn_preset(c0, c1, e.num("c2", base.c2), varrho);
  }
  if (e.has("chi")) s.chi = e.num("chi");
  if (e.has("gamma")) s.gamma = e.num("gamma");
  if (e.has("theta")) {
    s.theta = e.num("theta");
    if (!(s.theta > 0.0)) e.fail("theta", "must be positive");
  }
  s.validate();
  return s;
}

void check(bool ok, const Node& n, const std::string& key, const std::string& msg) {
  if (!ok) n.fail(key, msg);
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::string& origin) {
  if (!doc.is_object()) throw ConfigError(origin + ": top level must be a table");
  Node root(doc, "", origin);
  root.allow({"kind", "seed", "samples", "output_dir", "embedding_constants", "equation", "scheme", "ladder",
              "noise_rate", "fernique", "verify", "output"});
  ExperimentConfig c;
  if (root.has("kind")) {
    try {
      c.kind = experiment_kind_from_string(root.str("kind"));
    } catch (const ConfigError& e) {
      root.fail("kind", e.what());
    }
  }
  c.seed = root.u64("seed", c.seed);
  c.samples = root.count("samples", c.kind == ExperimentKind::Simulate ? 1 : 1000);
  check(c.samples >= 1, root, "samples", "must be >= 1");
  c.output_dir = root.str("output_dir", "");
  c.embedding_path = root.str("embedding_constants", "");

  Node eq = root.child("equation");
  if (!root.has("equation")) root.req("equation");
  try {
    c.equation = parse_equation(eq);
  } catch (const ConfigError& e) {
    std::string msg = e.what();
    if (msg.rfind(origin, 0) == 0) throw;
    if (msg.rfind("equation.", 0) == 0) throw ConfigError(origin + ": " + msg);
    throw ConfigError(origin + ": equation: " + msg);
  }
  c.preset = to_string(c.equation.kind);

  Node sc = root.child("scheme");
  sc.allow({"T", "n", "M", "xi", "taming"});
  c.T = sc.num("T", c.T);
  check(c.T > 0.0, sc, "T", "must be positive");
  c.n = sc.count("n", c.n);
  check(c.n >= 1, sc, "n", "must be >= 1");
  c.M = sc.count("M", c.M);
  check(c.M >= 1, sc, "M", "must be >= 1");
  c.xi = sc.nums("xi", c.xi);
  check(!c.xi.empty(), sc, "xi", "must list at least one coefficient");
  c.taming = sc.flag("taming", c.taming);

  Node la = root.child("ladder");
  la.allow({"levels", "reference", "p"});
  if (la.has("levels")) {
    for (const json& v : la.arr("levels")) c.levels.push_back(la.resolution(v, "levels"));
  }
  if (la.has("reference")) c.reference = la.resolution(la.req("reference"), "reference");
  c.p_moments = la.nums("p", c.p_moments);
  for (double p : c.p_moments) check(p > 0.0, la, "p", "moments must be positive");
  check(!c.p_moments.empty(), la, "p", "needs at least one moment");

  Node nr = root.child("noise_rate");
  nr.allow({"n", "t", "rho", "epsilon", "p"});
  c.rate_n = nr.counts("n", c.rate_n);
  c.rate_t = nr.num("t", c.rate_t);
  c.rate_rho = nr.num("rho", c.equation.varrho);
  c.epsilon = nr.num("epsilon", c.epsilon);
  c.rate_p = nr.num("p", c.rate_p);

  Node fe = root.child("fernique");
  fe.allow({"n", "t", "norms", "quantile_samples"});
  c.fernique_n = fe.count("n", c.fernique_n);
  c.fernique_t = fe.num("t", c.fernique_t);
  c.quantile_samples = fe.count("quantile_samples", c.quantile_samples);
  c.norms.clear();
  for (const auto& s : fe.strs("norms", {"sup", "H"})) {
    if (s == "sup") c.norms.push_back(NormKind::Sup);
    else if (s == "H") c.norms.push_back(NormKind::H);
    else fe.fail("norms", "unknown norm '" + s + "' (expected sup or H)");
  }

  Node ve = root.child("verify");
  ve.allow({"presets", "random_pairs", "random_n", "paths", "n", "M", "fernique_samples", "sup_moment_samples",
            "noise_samples", "gamma_p", "gamma_beta", "bound"});
  VerifySettings& v = c.verify;
  v.presets = ve.strs("presets", v.presets);
  for (const auto& p : v.presets) {
    try {
      equation_kind_from_string(p);
    } catch (const ConfigError& e) {
      ve.fail("presets", e.what());
    }
  }
  v.random_pairs = ve.count("random_pairs", v.random_pairs);
  v.random_n = ve.count("random_n", v.random_n);
  v.paths = ve.count("paths", v.paths);
  v.n = ve.count("n", v.n);
  v.M = ve.count("M", v.M);
  v.fernique_samples = ve.count("fernique_samples", v.fernique_samples);
  v.sup_moment_samples = ve.count("sup_moment_samples", v.sup_moment_samples);
  v.noise_samples = ve.count("noise_samples", v.noise_samples);
  v.gamma_p = ve.num("gamma_p", v.gamma_p);
  v.gamma_beta = ve.num("gamma_beta", v.gamma_beta);
  check(v.gamma_beta > 0.0 && v.gamma_beta < 0.25, ve, "gamma_beta", "must lie in (0, 1/4)");
  check(v.gamma_p > 1.0 / v.gamma_beta, ve, "gamma_p", "must exceed 1/gamma_beta");
  check(v.random_n >= 1 && v.n >= 1 && v.M >= 1, ve, "n", "resolutions must be >= 1");
  Node bo = ve.child("bound");
  bo.allow({"beta", "psi", "varphi", "slack", "p", "eta"});
  v.bound.beta = bo.num("beta", v.bound.beta);
  v.bound.psi = bo.num("psi", v.bound.psi);
  if (bo.has("varphi")) v.bound.varphi_coeff = bo.num("varphi");
  v.bound.slack = bo.num("slack", v.bound.slack);
  v.bound.p = bo.num("p", v.bound.p);
  v.bound.eta = bo.num("eta", v.bound.eta);
  try {
    v.bound.validate(c.equation);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": verify." + std::string(e.what()));
  }

  Node out = root.child("output");
  out.allow({"svg"});
  c.svg = out.flag("svg", c.svg);

  // Kind-specific invariants.
  switch (c.kind) {
    case ExperimentKind::Simulate:
      break;
    case ExperimentKind::ConvergeSpace:
    case ExperimentKind::ConvergeTime: {
      check(!c.levels.empty(), la, "levels", "needs at least one coarse level");
      check(c.samples >= 2, root, "samples", "convergence studies need >= 2 samples");
      for (const Resolution& r : c.levels) {
        const std::string where = "(" + std::to_string(r.n) + ", " + std::to_string(r.M) + ")";
        check(r.n >= 1 && r.M >= 1, la, "levels", where + " has a zero entry");
        check(dyadic(r.n, c.reference.n) && dyadic(r.M, c.reference.M), la, "levels",
              where + " is not dyadically nested in the reference");
        check(r.n < c.reference.n || r.M < c.reference.M, la, "levels",
              where + " is not strictly coarser than the reference");
      }
      break;
    }
    case ExperimentKind::NoiseRate:
      check(!c.rate_n.empty(), nr, "n", "needs at least one n");
      for (auto n : c.rate_n) check(n >= 1, nr, "n", "entries must be >= 1");
      check(c.rate_t > 0.0, nr, "t", "must be positive");
      check(c.rate_rho >= 0.0 && c.rate_rho < 0.25, nr, "rho", "must lie in [0, 1/4)");
      check(c.epsilon >= 0.0 && c.epsilon < 0.25 - c.rate_rho, nr, "epsilon", "must lie in [0, 1/4 - rho)");
      check(c.rate_p >= 2.0, nr, "p", "must be >= 2");
      check(c.samples >= 2, root, "samples", "needs >= 2 samples");
      break;
    case ExperimentKind::Fernique:
      check(c.fernique_n >= 1, fe, "n", "must be >= 1");
      check(c.fernique_t > 0.0, fe, "t", "must be positive");
      check(c.quantile_samples >= 2, fe, "quantile_samples", "must be >= 2");
      check(c.samples >= 2, root, "samples", "needs >= 2 samples");
      check(!c.norms.empty(), fe, "norms", "needs at least one norm");
      break;
    case ExperimentKind::VerifyAll:
      break;
  }
  return c;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return std::to_string(line) + ":" + std::to_string(col);
}

}  // namespace

ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind) {
  const std::string text = slurp(path);
  const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
  const bool is_toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  if (!is_json && !is_toml) throw ConfigError(path + ": expected a .toml or .json extension");
  json doc;
  if (is_json) {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      // nlohmann reports the byte just past the offending token.
      throw ConfigError(path + ":" + line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": parse error: " + e.what());
    }
  } else {
    try {
      toml::table tbl = toml::parse(text, path);
      std::ostringstream os;
      os << toml::json_formatter{tbl};
      doc = json::parse(os.str());
    } catch (const toml::parse_error& e) {
      throw ConfigError(path + ":" + std::to_string(e.source().begin.line) + ":" +
                        std::to_string(e.source().begin.column) + ": parse error: " + std::string(e.description()));
    }
  }
  if (kind && doc.is_object()) doc["kind"] = to_string(*kind);
  ExperimentConfig c = parse_config(doc, path);
  if (!c.embedding_path.empty() && c.embedding_path.front() != '/') {
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) c.embedding_path = path.substr(0, slash + 1) + c.embedding_path;
  }
  return c;
}

json ExperimentConfig::resolved() const {
  json lv = json::array();
  for (const auto& r : levels) lv.push_back({r.n, r.M});
  json norm_names = json::array();
  for (auto k : norms) norm_names.push_back(to_string(k));
  const EquationSpec& e = equation;
  return {
      {"kind", to_string(kind)},
      {"seed", seed},
      {"samples", samples},
      {"equation",
       {{"kind", to_string(e.kind)}, {"c0", e.c0}, {"c1", e.c1}, {"c2", e.c2}, {"gamma", e.gamma},
        {"rho", e.rho}, {"varrho", e.varrho}, {"chi", e.chi}, {"alpha", e.alpha}, {"vartheta", e.vartheta},
        {"varphi", e.varphi}, {"theta", e.theta}}},
      {"scheme", {{"T", T}, {"n", n}, {"M", M}, {"xi", xi}, {"taming", taming}}},
      {"ladder", {{"levels", lv}, {"reference", {reference.n, reference.M}}, {"p", p_moments}}},
      {"noise_rate", {{"n", rate_n}, {"t", rate_t}, {"rho", rate_rho}, {"epsilon", epsilon}, {"p", rate_p}}},
      {"fernique", {{"n", fernique_n}, {"t", fernique_t}, {"norms", norm_names}, {"quantile_samples", quantile_samples}}},
      {"verify",
       {{"presets", verify.presets},
        {"random_pairs", verify.random_pairs},
        {"random_n", verify.random_n},
        {"paths", verify.paths},
        {"n", verify.n},
        {"M", verify.M},
        {"fernique_samples", verify.fernique_samples},
        {"sup_moment_samples", verify.sup_moment_samples},
        {"noise_samples", verify.noise_samples},
        {"gamma_p", verify.gamma_p},
        {"gamma_beta", verify.gamma_beta},
        {"bound",
         {{"beta", verify.bound.beta}, {"psi", verify.bound.psi},
          {"varphi", verify.bound.varphi_coeff ? json(*verify.bound.varphi_coeff) : json(nullptr)},
          {"slack", verify.bound.slack}, {"p", verify.bound.p}, {"eta", verify.bound.eta}}}}},
      {"output", {{"svg", svg}}},
  };
}

std::string ExperimentConfig::hash() const { return sha256_hex(resolved().dump()); }

}  // namespace spde
