#include "spde/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spde/errors.hpp"
#include "spde/parallel.hpp"

namespace spde {

MeanSE mean_se(std::span<const double> x) {
  if (x.size() < 2) throw DomainError("mean_se needs at least two values");
  const double n = static_cast<double>(x.size());
  const double m = pairwise_sum(x) / n;
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - m) * (x[i] - m);
  const double var = pairwise_sum(d) / (n - 1.0);
  return {m, std::sqrt(var / n)};
}

double order_statistic(std::vector<double> x, std::size_t rank) {
  if (x.empty()) throw DomainError("order_statistic of an empty sample");
  rank = std::clamp<std::size_t>(rank, 1, x.size());
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(rank - 1), x.end());
  return x[rank - 1];
}

std::size_t upper_quantile_rank(std::size_t N, double q, double z) {
  const double n = static_cast<double>(N);
  return static_cast<std::size_t>(std::ceil(n * q + z * std::sqrt(n * q * (1.0 - q))));
}

double gaussian_abs_moment_root(double p) {
  if (!(p > 0.0)) throw DomainError("gaussian_abs_moment_root: p must be positive");
  // E|Y|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
  double logm = 0.5 * p * std::log(2.0) + std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi);
  return std::exp(logm / p);
}

}  // namespace spde
