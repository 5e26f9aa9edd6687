#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spde/embedding.hpp"
#include "spde/noise.hpp"
#include "spde/nonlinear.hpp"
#include "spde/verify.hpp"

namespace spde {

enum class ExperimentKind { Simulate, ConvergeSpace, ConvergeTime, NoiseRate, Fernique, VerifyAll };

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

// Cached embedding-constant estimates with their provenance. Lebesgue ratios
// are stored for c0 = 1 and rescaled by c0^{-r}.
class EmbeddingTable {
 public:
  static EmbeddingTable load(const std::string& path);
  static EmbeddingTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  void add(const EmbeddingEstimate& e);
  const EmbeddingEstimate& lebesgue(double r, double q) const;
  const EmbeddingEstimate& sup(double beta, double p) const;
  double lebesgue_value(double r, double q, double c0) const;
  double sup_value(double beta, double p) const { return sup(beta, p).value(); }
  const std::vector<EmbeddingEstimate>& entries() const { return entries_; }

 private:
  std::vector<EmbeddingEstimate> entries_;
};

std::string default_embedding_path();
std::string preset_dir();
std::string software_version();

// L^q exponent paired with the Lipschitz space of each equation.
double lipschitz_lebesgue_exponent(const EquationSpec& eq);

struct VerifySettings {
  std::vector<std::string> presets{"burgers", "allen-cahn"};
  std::size_t random_pairs = 10000;
  std::size_t random_n = 16;
  std::size_t paths = 100;
  std::size_t n = 16;
  std::size_t M = 256;
  std::size_t fernique_samples = 10000;
  std::size_t sup_moment_samples = 10000;
  std::size_t noise_samples = 10000;
  double gamma_p = 8.0;
  double gamma_beta = 0.2;
  BoundCheckConfig bound;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  std::string preset = "burgers";
  EquationSpec equation = burgers_preset();
  double T = 1.0;
  std::size_t n = 16;
  std::size_t M = 256;
  std::vector<double> xi{0.5, 0.25};
  bool taming = true;

  std::vector<Resolution> levels;
  Resolution reference{256, 2048};
  std::vector<double> p_moments{2.0};

  std::size_t samples = 1;
  std::uint64_t seed = 42;
  std::string output_dir;
  std::string embedding_path;

  std::vector<std::size_t> rate_n{8, 16, 32};
  double rate_t = 1.0;
  double rate_rho = 0.1875;
  double epsilon = 0.05;
  double rate_p = 2.0;

  std::size_t fernique_n = 16;
  double fernique_t = 1.0;
  std::vector<NormKind> norms{NormKind::Sup, NormKind::H};
  std::size_t quantile_samples = 10000;

  VerifySettings verify;
  bool svg = false;

  // Canonical resolved form; excludes output_dir so that the hash only
  // depends on what determines the outputs.
  nlohmann::json resolved() const;
  std::string hash() const;
  SpectralField initial() const { return SpectralField(xi, equation.c0); }
};

// TOML or JSON by extension. Errors name the file, the field path and, for
// parse errors, the line and column.
// `kind`, when given, replaces the file's kind before validation.
ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind = {});
ExperimentConfig parse_config(const nlohmann::json& doc, const std::string& origin);

// Sets equation.theta from the table unless it was given explicitly.
void resolve_theta(EquationSpec& eq, const EmbeddingTable& table);

EquationSpec preset_equation(const std::string& name);

}  // namespace spde
