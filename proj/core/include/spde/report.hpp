#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "spde/check_report.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"

namespace spde {

// Round-trip decimal with 17 significant digits.
std::string format_double(double x);

nlohmann::json to_json(const CheckReport& r);
nlohmann::json to_json(const SpectralField& v);
SpectralField field_from_json(const nlohmann::json& j);

// One JSON object per line, keys sorted.
std::string json_lines(const std::vector<CheckReport>& reports);
std::string summary_table(const std::vector<CheckReport>& reports);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  const std::vector<std::string>& header() const { return header_; }
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// k, t, indicator, X_1..X_n; the indicator column holds the flag used on the
// step leaving t_k (empty on the last row).
CsvTable trajectory_table(const Trajectory& traj);

}  // namespace spde
