#pragma once

// Exact sampling of the per-mode Ornstein-Uhlenbeck processes
//   O_j(t)  = int_0^t exp(-lambda_j (t-s)) dbeta_j(s)
//   Oe_j(t) = int_0^t exp(-(lambda_j + eta)(t-s)) dbeta_j(s)
// driven by one Brownian motion per mode, on nested time grids.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

struct IncrementPair {
  double o = 0.0;    // rate lambda
  double oe = 0.0;   // rate lambda + eta
};

struct OUCovariance {
  double var1, var2, cov;
};

OUCovariance ou_covariance(double lambda, double eta, double h);

IncrementPair sample_ou_increment(double lambda, double eta, double h,
                                  std::pair<double, double> gaussians);

// Combines r consecutive fine increments into one coarse increment such that
// the coarse recursion reproduces the fine one at coarse grid points.
IncrementPair coarsen(std::span<const IncrementPair> fine, double lambda, double eta, double h_fine);

class NoiseLadder {
 public:
  NoiseLadder(std::uint64_t seed, std::size_t fine_steps, std::size_t fine_modes, double T,
              double eta, double c0 = 1.0);

  // Ladder whose Gaussians are all zero; deterministic test cases.
  static NoiseLadder silent(std::size_t fine_steps, std::size_t fine_modes, double T, double eta,
                            double c0 = 1.0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t fine_steps() const noexcept { return fine_steps_; }
  std::size_t fine_modes() const noexcept { return fine_modes_; }
  double T() const noexcept { return T_; }
  double eta() const noexcept { return eta_; }
  double c0() const noexcept { return c0_; }
  bool is_silent() const noexcept { return silent_; }
  double h_fine() const noexcept { return T_ / static_cast<double>(fine_steps_); }

  // Fine increment for mode j (1-based) over fine step k of sample path `sample`.
  IncrementPair fine_increment(std::uint64_t sample, std::size_t j, std::size_t k) const;

  // All coarse increments of mode j on a grid with M steps.
  std::vector<IncrementPair> coarse_increments(std::uint64_t sample, std::size_t j, std::size_t M) const;

  // Throws ConfigError unless grid is nested in the ladder and n <= fine_modes.
  void check_compatible(std::size_t n, const GridSpec& grid) const;

 private:
  std::uint64_t seed_;
  std::size_t fine_steps_, fine_modes_;
  double T_, eta_, c0_;
  bool silent_ = false;
};

struct OUPath {
  GridSpec grid;
  std::size_t n;
  std::vector<SpectralField> O;     // rate lambda_j, index k = 0..M
  std::vector<SpectralField> Oeta;  // rate lambda_j + eta
  // Oeta + P_n exp(t(A - eta)) xi; filled by shifted_convolution_value.
  std::vector<SpectralField> Omega;
};

OUPath convolution_path(const NoiseLadder& ladder, std::uint64_t sample, std::size_t n,
                        const GridSpec& grid);

struct Resolution {
  std::size_t n;
  std::size_t M;
};

// Paths of one sample at several resolutions; each fine increment is drawn
// once and coarsened per grid. Results equal separate convolution_path calls.
std::vector<OUPath> convolution_paths(const NoiseLadder& ladder, std::uint64_t sample,
                                      std::span<const Resolution> res);

// Convolution restarted from zero at grid index k_begin, reported at
// k_begin..k_end (inclusive), using the same increments as convolution_path.
std::vector<SpectralField> convolution_segment(const NoiseLadder& ladder, std::uint64_t sample,
                                               std::size_t n, const GridSpec& grid,
                                               std::size_t k_begin, std::size_t k_end);

OUPath shifted_convolution_value(const NoiseLadder& ladder, std::uint64_t sample, std::size_t n,
                                 const GridSpec& grid, const SpectralField& xi);

struct TailSum {
  double value;
  double tail_bound;   // integral-comparison bound on the omitted remainder
  std::size_t terms;   // number of explicitly summed terms
};

// E||O_t - O^n_t||^2_{H_rho} = sum_{k>n} lambda_k^{2 rho} (1 - exp(-2 lambda_k t)) / (2 lambda_k)
TailSum noise_spatial_error_oracle(std::uint64_t n, double t, double rho, double c0);

}  // namespace spde
