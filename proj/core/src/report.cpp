#include "spde/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "spde/errors.hpp"

namespace spde {

CheckReport CheckReport::compare(std::string name, double lhs, double rhs, double rel_tol, double abs_tol) {
  CheckReport r;
  r.name = std::move(name);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.passed = lhs <= rhs * (1.0 + rel_tol) + abs_tol;
  r.tolerances = {{"rel_tol", rel_tol}, {"abs_tol", abs_tol}};
  return r;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// JSON has no inf/nan; they become strings.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json tol = nlohmann::json::object();
  for (const auto& [k, v] : r.tolerances) tol[k] = number(v);
  return {{"name", r.name},       {"passed", r.passed},   {"lhs", number(r.lhs)},
          {"rhs", number(r.rhs)}, {"margin", number(r.margin)}, {"samples", r.samples},
          {"tolerances", tol},    {"config_hash", r.config_hash}, {"notes", r.notes},
          {"asserted", r.asserted}};
}

nlohmann::json to_json(const SpectralField& v) {
  return {{"c0", v.c0()}, {"coeffs", std::vector<double>(v.coeffs().begin(), v.coeffs().end())}};
}

SpectralField field_from_json(const nlohmann::json& j) {
  try {
    return SpectralField(j.at("coeffs").get<std::vector<double>>(), j.value("c0", 1.0));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field: ") + e.what());
  }
}

std::string json_lines(const std::vector<CheckReport>& reports) {
  std::string out;
  for (const auto& r : reports) out += to_json(r).dump() + "\n";
  return out;
}

std::string summary_table(const std::vector<CheckReport>& reports) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-32s %-6s %14s %14s %8s\n", "check", "status", "lhs", "rhs", "samples");
  os << line;
  for (const auto& r : reports) {
    const char* st = r.passed ? "PASS" : (r.asserted ? "FAIL" : "info");
    std::snprintf(line, sizeof line, "%-32s %-6s %14.6g %14.6g %8zu\n", r.name.c_str(), st, r.lhs, r.rhs,
                  r.samples);
    os << line;
  }
  return os.str();
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
  if (header_.empty()) throw DomainError("CsvTable: empty header");
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(cells);
}

void CsvTable::add_row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw DomainError("CsvTable: row width differs from header");
  rows_.push_back(cells);
}

std::string CsvTable::str() const {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return out;
}

CsvTable trajectory_table(const Trajectory& traj) {
  std::vector<std::string> header{"k", "t", "indicator"};
  for (std::size_t j = 1; j <= traj.n; ++j) header.push_back("X_" + std::to_string(j));
  CsvTable t(header);
  for (std::size_t k = 0; k < traj.X.size(); ++k) {
    std::vector<std::string> row{std::to_string(k), format_double(traj.grid.time(k)),
                                 k < traj.indicator.size() ? std::to_string(traj.indicator[k]) : ""};
    for (double a : traj.X[k].coeffs()) row.push_back(format_double(a));
    t.add_row(row);
  }
  return t;
}

}  // namespace spde
