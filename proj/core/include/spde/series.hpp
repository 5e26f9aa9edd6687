#pragma once

#include <cstddef>

namespace spde {

struct SeriesValue {
  double value;
  double error_bound;  // bound on |value - exact|
};

// S = sum_{k>=1} k^alpha / (c k^beta + eta) for beta > 1 + alpha, c > 0, eta >= 0.
// Direct summation of the first `direct_terms` (>= 1024) terms plus an
// integral tail.
SeriesValue power_series_sum(double alpha, double beta, double c, double eta,
                             std::size_t direct_terms = 1u << 18);

// Partial sum over k = 1..n only.
double power_series_partial(double alpha, double beta, double c, double eta, std::size_t n);

}  // namespace spde
