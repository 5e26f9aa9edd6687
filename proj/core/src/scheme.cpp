#include "spde/scheme.hpp"

#include <cmath>
#include <string>

#include "spde/errors.hpp"
#include "spde/parallel.hpp"

namespace spde {

int indicator(const SpectralField& X, const SpectralField& O, const SpectralField& Xi, double varrho,
              double chi, double h) {
  if (!(h > 0.0)) throw DomainError("indicator: h must be positive");
  double lhs = hr_norm(X, varrho) + hr_norm(O + Xi, varrho);
  return lhs <= std::pow(h, -chi) ? 1 : 0;
}

SpectralField step(const SpectralField& X, const SpectralField& O, const SpectralField& O_next,
                   const SpectralField& Xi, const SchemeConfig& config, std::size_t k,
                   int* indicator_out) {
  const std::size_t n = config.n;
  if (X.size() != n || O.size() != n || O_next.size() != n || Xi.size() != n)
    throw DomainError("step: all fields must have n modes");
  const double h = config.grid.h();
  const EquationSpec& eq = config.equation;
  int ind = config.taming ? indicator(X, O, Xi, eq.varrho, eq.chi, h) : 1;
  if (indicator_out) *indicator_out = ind;
  std::vector<double> next(n);
  auto x = X.coeffs(), o = O.coeffs(), on = O_next.coeffs();
  for (std::size_t j = 0; j < n; ++j)
    next[j] = std::exp(-eigenvalue(j + 1, eq.c0) * h) * (x[j] - o[j]) + on[j];
  if (ind) {
    SpectralField f = apply_drift(eq, X, n);
    for (std::size_t j = 0; j < n; ++j) next[j] += phi1_weight(j + 1, h, 0.0, eq.c0) * f.coeffs()[j];
  }
  for (double a : next)
    if (!std::isfinite(a)) throw OverflowError("non-finite state after step " + std::to_string(k), k);
  return SpectralField(std::move(next), eq.c0);
}

Trajectory run_on_path(const SchemeConfig& config, OUPath path) {
  const std::size_t n = config.n, M = config.grid.M;
  if (path.n != n || path.grid.M != M || path.O.size() != M + 1)
    throw ConfigError("noise path does not match the scheme resolution");
  Trajectory tr{config.grid, n, {}, std::move(path.O), {}, {}, {}};
  if (config.with_omega) tr.Omega = std::move(path.Omega);
  const SpectralField pxi = project(config.xi, n);
  tr.Xi.reserve(M + 1);
  for (std::size_t k = 0; k <= M; ++k) tr.Xi.push_back(semigroup_apply(pxi, config.grid.time(k)));
  tr.X.reserve(M + 1);
  tr.X.push_back(pxi + tr.O[0]);
  tr.indicator.resize(M);
  for (std::size_t k = 0; k < M; ++k) {
    int ind = 0;
    tr.X.push_back(step(tr.X[k], tr.O[k], tr.O[k + 1], tr.Xi[k], config, k, &ind));
    tr.indicator[k] = static_cast<std::uint8_t>(ind);
  }
  return tr;
}

Trajectory run(const SchemeConfig& config, const NoiseLadder& ladder, std::uint64_t sample) {
  ladder.check_compatible(config.n, config.grid);
  if (std::abs(ladder.c0() - config.equation.c0) > 0.0)
    throw ConfigError("ladder c0 differs from the equation's c0");
  OUPath p = config.with_omega ? shifted_convolution_value(ladder, sample, config.n, config.grid, config.xi)
                               : convolution_path(ladder, sample, config.n, config.grid);
  return run_on_path(config, std::move(p));
}

SpectralField dense_output(const Trajectory& traj, const SchemeConfig& config, double t,
                           const SpectralField& O_t) {
  if (t < 0.0 || t > traj.grid.T * (1.0 + 1e-15)) throw DomainError("dense_output: t outside [0, T]");
  const double h = traj.grid.h();
  std::size_t k = static_cast<std::size_t>(std::floor(traj.grid.floor(t) / h + 0.5));
  if (k >= traj.grid.M) return traj.X.back();
  const double tau = t - traj.grid.time(k);
  if (tau == 0.0) return traj.X[k];
  SpectralField out = semigroup_apply(traj.X[k] - traj.O[k], tau) + project(O_t, traj.n);
  if (traj.indicator[k]) {
    SpectralField f = apply_drift(config.equation, traj.X[k], traj.n);
    auto o = out.mutable_coeffs();
    for (std::size_t j = 0; j < traj.n; ++j)
      o[j] += phi1_weight(j + 1, tau, 0.0, config.equation.c0) * f.coeffs()[j];
  }
  return out;
}

std::vector<StrongErrorResult> strong_error_study(const std::vector<SchemeConfig>& coarse,
                                                  const SchemeConfig& ref, const NoiseLadder& ladder,
                                                  std::size_t samples, const std::vector<double>& ps,
                                                  unsigned threads) {
  if (samples < 2) throw ConfigError("strong_error needs at least 2 samples");
  if (ps.empty()) throw ConfigError("strong_error needs at least one moment p");
  for (double p : ps)
    if (!(p > 0.0)) throw ConfigError("strong_error moment p must be positive");
  ladder.check_compatible(ref.n, ref.grid);
  std::vector<Resolution> res;
  for (const SchemeConfig& c : coarse) {
    ladder.check_compatible(c.n, c.grid);
    if (c.n > ref.n || ref.grid.M % c.grid.M != 0)
      throw ConfigError("coarse level (n=" + std::to_string(c.n) + ", M=" + std::to_string(c.grid.M) +
                        ") is not nested in the reference");
    res.push_back({c.n, c.grid.M});
  }
  res.push_back({ref.n, ref.grid.M});
  const std::size_t L = coarse.size();

  // err[i][l][k] = ||X^ref_{t_k} - X^l_{t_k}||_H for sample i.
  std::vector<std::vector<std::vector<double>>> err(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    std::vector<OUPath> paths = convolution_paths(ladder, i, res);
    Trajectory tref = run_on_path(ref, std::move(paths[L]));
    auto& e = err[i];
    e.resize(L);
    for (std::size_t l = 0; l < L; ++l) {
      Trajectory tc = run_on_path(coarse[l], std::move(paths[l]));
      const std::size_t Mc = coarse[l].grid.M, r = ref.grid.M / Mc;
      e[l].resize(Mc + 1);
      for (std::size_t k = 0; k <= Mc; ++k) {
        SpectralField d = tref.X[k * r] - project(tc.X[k], ref.n);
        e[l][k] = hr_norm(d, 0.0);
      }
    }
  });

  std::vector<StrongErrorResult> out;
  for (double p : ps) {
    StrongErrorResult R{p, samples, {}};
    for (std::size_t l = 0; l < L; ++l) {
      const std::size_t K = coarse[l].grid.M + 1;
      StrongErrorLevel lev{coarse[l].n, coarse[l].grid.M, 0.0, 0.0, std::vector<double>(K)};
      std::vector<std::vector<double>> vals(K, std::vector<double>(samples));
      for (std::size_t i = 0; i < samples; ++i)
        for (std::size_t k = 0; k < K; ++k) vals[k][i] = std::pow(err[i][l][k], p);
      std::vector<double> sums(K);
      for (std::size_t k = 0; k < K; ++k) {
        sums[k] = pairwise_sum(vals[k]);
        lev.per_time[k] = sums[k] / static_cast<double>(samples);
      }
      lev.value = *std::max_element(lev.per_time.begin(), lev.per_time.end());
      // Jackknife over the sup-of-means estimator.
      std::vector<double> loo(samples);
      const double nm1 = static_cast<double>(samples - 1);
      for (std::size_t i = 0; i < samples; ++i) {
        double best = -1.0;
        for (std::size_t k = 0; k < K; ++k) best = std::max(best, (sums[k] - vals[k][i]) / nm1);
        loo[i] = best;
      }
      const double mean_loo = pairwise_sum(loo) / static_cast<double>(samples);
      std::vector<double> sq(samples);
      for (std::size_t i = 0; i < samples; ++i) sq[i] = (loo[i] - mean_loo) * (loo[i] - mean_loo);
      lev.std_error = std::sqrt(nm1 / static_cast<double>(samples) * pairwise_sum(sq));
      R.levels.push_back(std::move(lev));
    }
    out.push_back(std::move(R));
  }
  return out;
}

StrongErrorLevel strong_error(const SchemeConfig& coarse, const SchemeConfig& ref,
                              const NoiseLadder& ladder, std::size_t samples, double p,
                              unsigned threads) {
  auto r = strong_error_study({coarse}, ref, ladder, samples, {p}, threads);
  return r.front().levels.front();
}

}  // namespace spde
