#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace spde {

struct MeanSE {
  double mean;
  double std_error;  // sample standard deviation / sqrt(N)
};

// Pairwise-summed mean and standard error; deterministic in the input order.
MeanSE mean_se(std::span<const double> x);

// k-th smallest value, 1-based rank clamped to [1, N].
double order_statistic(std::vector<double> x, std::size_t rank);

// Rank of the one-sided 99% upper confidence bound for the q-quantile from N
// samples (normal approximation to the binomial count).
std::size_t upper_quantile_rank(std::size_t N, double q, double z = 2.5758293035489004);

// (E|Y|^p)^{1/p} for standard normal Y.
double gaussian_abs_moment_root(double p);

}  // namespace spde
