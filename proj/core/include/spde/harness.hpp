#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spde/check_report.hpp"
#include "spde/config.hpp"

namespace spde {

struct RunOptions {
  std::string out_dir;                  // overrides config and SPDE_OUT_DIR
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;    // overrides the config seed
};

struct OutputFile {
  std::string name;
  std::string sha256;
  std::size_t bytes;
};

struct RunResult {
  std::string out_dir;
  std::vector<CheckReport> reports;
  std::vector<OutputFile> files;  // excludes the manifest itself
  std::string manifest_path;
  std::string trajectory_digest;  // simulate, sample 0
  double eta = 0.0;
  int exit_code = 0;              // nonzero iff an asserted check failed
};

// Precedence: options.out_dir, config.output_dir, $SPDE_OUT_DIR, "spde-out".
std::string resolve_out_dir(const ExperimentConfig& config, const RunOptions& options);

EmbeddingTable load_embedding_table(const ExperimentConfig& config);

RunResult run_experiment(ExperimentConfig config, const RunOptions& options);

std::vector<CheckReport> run_verify_suite(const ExperimentConfig& config, const EmbeddingTable& table,
                                          unsigned threads);

// Line chart of column y against column x of a CSV table; one polyline per
// distinct value of `group` when given.
std::string svg_chart(const std::string& csv_text, const std::string& x, const std::string& y,
                      const std::string& group = "", bool logx = true, bool logy = true);

}  // namespace spde
