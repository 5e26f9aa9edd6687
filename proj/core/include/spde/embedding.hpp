#pragma once

// Numerical lower estimates of embedding constants that are only known to be
// finite: sup ||u||_{L^q} / ||u||_{H_r} and sup |u|_inf / ||u||_{W^{beta,p}},
// each taken over span{e_1..e_modes}.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace spde {

struct EmbeddingEstimate {
  std::string kind;       // "lebesgue" or "sup"
  double exponent;        // r (lebesgue) or beta (sup)
  double lebesgue_p;      // q (lebesgue) or p (sup)
  std::size_t modes;
  std::size_t iters;
  std::uint64_t seed;
  double c0;
  double raw;             // best ratio found
  double safety = 1.05;
  double value() const { return raw * safety; }
  std::vector<double> maximizer;
};

// Ratio ||u||_{L^q} / ||u||_{H_r} for a coefficient vector.
double lebesgue_ratio(const std::vector<double>& coeffs, double r, double q, double c0);

// Random restarts + normalized gradient ascent with dyadic continuation in
// the mode count (8, 16, ..., modes); `iters` ascent steps per level and
// restart. Nondecreasing in `modes` for a fixed seed.
EmbeddingEstimate estimate_embedding(double r, double q, std::size_t modes, std::size_t iters,
                                     std::uint64_t seed = 1, double c0 = 1.0);

// sup|u| / ||u||_{W^{beta,p}} by random search and coordinate ascent.
double sup_ratio(const std::vector<double>& coeffs, double beta, double p);
EmbeddingEstimate estimate_sup_embedding(double beta, double p, std::size_t modes, std::size_t iters,
                                         std::uint64_t seed = 1);

}  // namespace spde
