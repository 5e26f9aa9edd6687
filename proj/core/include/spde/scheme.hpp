#pragma once

// Truncated exponential Euler scheme on P_n(H):
//   X_{k+1} = e^{hA}(X_k - O_k) + 1_k Phi1(h) P_n F(X_k) + O_{k+1},  X_0 = P_n xi,
//   1_k = [ ||X_k||_{H_varrho} + ||O_k + Xi_k||_{H_varrho} <= h^{-chi} ],  Xi_k = P_n e^{t_k A} xi.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "spde/noise.hpp"
#include "spde/nonlinear.hpp"
#include "spde/spectral.hpp"

namespace spde {

struct SchemeConfig {
  EquationSpec equation;
  std::size_t n;
  GridSpec grid;
  SpectralField xi;
  // false forces the indicator to 1 (plain exponential Euler, for contrast runs).
  bool taming = true;
  bool with_omega = false;
};

struct Trajectory {
  GridSpec grid;
  std::size_t n;
  std::vector<SpectralField> X, O, Xi, Omega;
  std::vector<std::uint8_t> indicator;  // indicator[k] used on step k -> k+1; size M
};

int indicator(const SpectralField& X, const SpectralField& O, const SpectralField& Xi, double varrho,
              double chi, double h);

// One step from t_k; `k` only labels a possible OverflowError.
SpectralField step(const SpectralField& X, const SpectralField& O, const SpectralField& O_next,
                   const SpectralField& Xi, const SchemeConfig& config, std::size_t k = 0,
                   int* indicator_out = nullptr);

// Validates the config against the ladder and simulates one sample path.
Trajectory run(const SchemeConfig& config, const NoiseLadder& ladder, std::uint64_t sample);

// Simulates on a precomputed noise path (path.n == config.n, same grid).
Trajectory run_on_path(const SchemeConfig& config, OUPath path);

// Mild-form value at t in [t_k, t_{k+1}] given the noise value O_t on the same path.
SpectralField dense_output(const Trajectory& traj, const SchemeConfig& config, double t,
                           const SpectralField& O_t);

struct StrongErrorLevel {
  std::size_t n, M;
  double value;                     // sup_k E||X^ref_{t_k} - X_{t_k}||_H^p
  double std_error;                 // jackknife
  std::vector<double> per_time;     // E||.||^p at each coarse grid point
};

struct StrongErrorResult {
  double p;
  std::size_t samples;
  std::vector<StrongErrorLevel> levels;
};

// Coarse levels share the reference ladder; each coarse (n, M) must satisfy
// n <= ref.n and M | ref.M. One result per entry of ps. Bit-identical for
// every thread count.
std::vector<StrongErrorResult> strong_error_study(const std::vector<SchemeConfig>& coarse,
                                                  const SchemeConfig& ref, const NoiseLadder& ladder,
                                                  std::size_t samples, const std::vector<double>& ps,
                                                  unsigned threads = 1);

StrongErrorLevel strong_error(const SchemeConfig& coarse, const SchemeConfig& ref,
                              const NoiseLadder& ladder, std::size_t samples, double p,
                              unsigned threads = 1);

}  // namespace spde
