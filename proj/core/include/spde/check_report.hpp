#pragma once

#include <cstddef>
#include <map>
#include <string>

namespace spde {

struct CheckReport {
  std::string name;
  bool passed = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs, or the check's own slack measure
  std::size_t samples = 0;
  std::map<std::string, double> tolerances;
  std::string config_hash;
  std::string notes;
  bool asserted = true;  // diagnostics do not affect exit status

  // passed <=> lhs <= rhs (1 + rel_tol) + abs_tol
  static CheckReport compare(std::string name, double lhs, double rhs, double rel_tol, double abs_tol);
};

}  // namespace spde
