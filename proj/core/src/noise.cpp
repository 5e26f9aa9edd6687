#include "spde/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spde/errors.hpp"
#include "spde/quadrature.hpp"
#include "spde/rng.hpp"

namespace spde {

namespace {

// (1 - exp(-r h)) / r, with the r -> 0 limit h.
double decay_integral(double r, double h) {
  if (r == 0.0) return h;
  return -std::expm1(-r * h) / r;
}

}  // namespace

OUCovariance ou_covariance(double lambda, double eta, double h) {
  if (!(h > 0.0)) throw DomainError("ou_covariance: h must be positive");
  return {decay_integral(2.0 * lambda, h), decay_integral(2.0 * (lambda + eta), h),
          decay_integral(2.0 * lambda + eta, h)};
}

IncrementPair sample_ou_increment(double lambda, double eta, double h,
                                  std::pair<double, double> g) {
  OUCovariance c = ou_covariance(lambda, eta, h);
  double l11 = std::sqrt(c.var1);
  double first = l11 * g.first;
  if (eta == 0.0) return {first, first};
  double l21 = c.cov / l11;
  double d = c.var2 - l21 * l21;
  if (d < 0.0) {
    if (d < -1e-14 * c.var2) throw InternalError("OU covariance is indefinite");
    d = 0.0;
  }
  return {first, l21 * g.first + std::sqrt(d) * g.second};
}

IncrementPair coarsen(std::span<const IncrementPair> fine, double lambda, double eta, double h_fine) {
  if (fine.empty()) throw DomainError("coarsen: need at least one increment");
  const double d1 = std::exp(-lambda * h_fine), d2 = std::exp(-(lambda + eta) * h_fine);
  IncrementPair acc = fine[0];
  for (std::size_t m = 1; m < fine.size(); ++m) {
    acc.o = acc.o * d1 + fine[m].o;
    acc.oe = acc.oe * d2 + fine[m].oe;
  }
  return acc;
}

NoiseLadder::NoiseLadder(std::uint64_t seed, std::size_t fine_steps, std::size_t fine_modes,
                         double T, double eta, double c0)
    : seed_(seed), fine_steps_(fine_steps), fine_modes_(fine_modes), T_(T), eta_(eta), c0_(c0) {
  if (fine_steps == 0 || fine_modes == 0) throw ConfigError("ladder needs fine_steps, fine_modes >= 1");
  if (fine_steps > 0xFFFFFFFFull || fine_modes > 0xFFFFFFFFull)
    throw ConfigError("ladder dimensions exceed the 32-bit counter fields");
  if (!(T > 0.0)) throw ConfigError("ladder T must be positive");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("ladder eta must be finite and >= 0");
  if (!(c0 > 0.0)) throw ConfigError("ladder c0 must be positive");
}

NoiseLadder NoiseLadder::silent(std::size_t fine_steps, std::size_t fine_modes, double T, double eta,
                                double c0) {
  NoiseLadder l(0, fine_steps, fine_modes, T, eta, c0);
  l.silent_ = true;
  return l;
}

IncrementPair NoiseLadder::fine_increment(std::uint64_t sample, std::size_t j, std::size_t k) const {
  if (j == 0 || j > fine_modes_ || k >= fine_steps_) throw DomainError("fine_increment out of range");
  if (silent_) return {};
  auto g = gaussian_pair(seed_, sample, static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(k));
  return sample_ou_increment(eigenvalue(j, c0_), eta_, h_fine(), g);
}

std::vector<IncrementPair> NoiseLadder::coarse_increments(std::uint64_t sample, std::size_t j,
                                                          std::size_t M) const {
  if (M == 0 || fine_steps_ % M != 0) throw ConfigError("grid is not nested in the noise ladder");
  const std::size_t r = fine_steps_ / M;
  const double lambda = eigenvalue(j, c0_);
  std::vector<IncrementPair> fine(r), out(M);
  for (std::size_t k = 0; k < M; ++k) {
    for (std::size_t m = 0; m < r; ++m) fine[m] = fine_increment(sample, j, k * r + m);
    out[k] = coarsen(fine, lambda, eta_, h_fine());
  }
  return out;
}

void NoiseLadder::check_compatible(std::size_t n, const GridSpec& grid) const {
  if (n == 0 || n > fine_modes_) throw ConfigError("mode count exceeds the ladder's fine_modes");
  if (grid.M == 0 || fine_steps_ % grid.M != 0)
    throw ConfigError("grid steps do not divide the ladder's fine_steps");
  if (std::abs(grid.T - T_) > 1e-12 * T_) throw ConfigError("grid horizon differs from ladder T");
}

namespace {

OUPath empty_path(std::size_t n, const GridSpec& grid, double c0) {
  OUPath p{grid, n, {}, {}, {}};
  p.O.assign(grid.M + 1, SpectralField::zeros(n, c0));
  p.Oeta.assign(grid.M + 1, SpectralField::zeros(n, c0));
  return p;
}

}  // namespace

OUPath convolution_path(const NoiseLadder& ladder, std::uint64_t sample, std::size_t n,
                        const GridSpec& grid) {
  ladder.check_compatible(n, grid);
  OUPath p = empty_path(n, grid, ladder.c0());
  const double h = grid.h();
  for (std::size_t j = 1; j <= n; ++j) {
    const double lambda = eigenvalue(j, ladder.c0());
    const double d1 = std::exp(-lambda * h), d2 = std::exp(-(lambda + ladder.eta()) * h);
    auto inc = ladder.coarse_increments(sample, j, grid.M);
    double o = 0.0, oe = 0.0;
    for (std::size_t k = 0; k < grid.M; ++k) {
      o = d1 * o + inc[k].o;
      oe = d2 * oe + inc[k].oe;
      p.O[k + 1].mutable_coeffs()[j - 1] = o;
      p.Oeta[k + 1].mutable_coeffs()[j - 1] = oe;
    }
  }
  return p;
}

std::vector<OUPath> convolution_paths(const NoiseLadder& ladder, std::uint64_t sample,
                                      std::span<const Resolution> res) {
  std::vector<OUPath> out;
  std::size_t nmax = 0;
  for (const Resolution& r : res) {
    GridSpec g(ladder.T(), r.M);
    ladder.check_compatible(r.n, g);
    out.push_back(empty_path(r.n, g, ladder.c0()));
    nmax = std::max(nmax, r.n);
  }
  std::vector<IncrementPair> fine(ladder.fine_steps());
  for (std::size_t j = 1; j <= nmax; ++j) {
    for (std::size_t k = 0; k < fine.size(); ++k) fine[k] = ladder.fine_increment(sample, j, k);
    const double lambda = eigenvalue(j, ladder.c0());
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (j > res[i].n) continue;
      const std::size_t M = res[i].M, r = ladder.fine_steps() / M;
      const double h = ladder.T() / static_cast<double>(M);
      const double d1 = std::exp(-lambda * h), d2 = std::exp(-(lambda + ladder.eta()) * h);
      double o = 0.0, oe = 0.0;
      for (std::size_t k = 0; k < M; ++k) {
        IncrementPair c = coarsen(std::span(fine).subspan(k * r, r), lambda, ladder.eta(), ladder.h_fine());
        o = d1 * o + c.o;
        oe = d2 * oe + c.oe;
        out[i].O[k + 1].mutable_coeffs()[j - 1] = o;
        out[i].Oeta[k + 1].mutable_coeffs()[j - 1] = oe;
      }
    }
  }
  return out;
}

std::vector<SpectralField> convolution_segment(const NoiseLadder& ladder, std::uint64_t sample,
                                               std::size_t n, const GridSpec& grid,
                                               std::size_t k_begin, std::size_t k_end) {
  ladder.check_compatible(n, grid);
  if (k_begin > k_end || k_end > grid.M) throw DomainError("convolution_segment: bad index range");
  std::vector<SpectralField> out(k_end - k_begin + 1, SpectralField::zeros(n, ladder.c0()));
  for (std::size_t j = 1; j <= n; ++j) {
    const double d1 = std::exp(-eigenvalue(j, ladder.c0()) * grid.h());
    auto inc = ladder.coarse_increments(sample, j, grid.M);
    double o = 0.0;
    for (std::size_t k = k_begin; k < k_end; ++k) {
      o = d1 * o + inc[k].o;
      out[k + 1 - k_begin].mutable_coeffs()[j - 1] = o;
    }
  }
  return out;
}

OUPath shifted_convolution_value(const NoiseLadder& ladder, std::uint64_t sample, std::size_t n,
                                 const GridSpec& grid, const SpectralField& xi) {
  OUPath p = convolution_path(ladder, sample, n, grid);
  SpectralField pxi = project(xi, n);
  p.Omega.reserve(grid.M + 1);
  for (std::size_t k = 0; k <= grid.M; ++k)
    p.Omega.push_back(p.Oeta[k] + semigroup_apply(pxi, grid.time(k), ladder.eta()));
  return p;
}

TailSum noise_spatial_error_oracle(std::uint64_t n, double t, double rho, double c0) {
  if (t < 0.0) throw DomainError("noise_spatial_error_oracle: t must be nonnegative");
  if (!(c0 > 0.0)) throw DomainError("noise_spatial_error_oracle: c0 must be positive");
  if (!(rho < 0.25)) throw DomainError("noise_spatial_error_oracle: series diverges for rho >= 1/4");
  if (t == 0.0) return {0.0, 0.0, 0};
  const double cpi = c0 * std::numbers::pi * std::numbers::pi;
  auto f = [&](double x) {
    double lam = cpi * x * x;
    return std::pow(lam, 2.0 * rho - 1.0) * 0.5 * -std::expm1(-2.0 * lam * t);
  };
  // Direct sum over 4096 terms, then the midpoint-integral approximation of
  // the remainder, which stays accurate even when the terms decay slowly.
  constexpr std::uint64_t kDirect = 4096;
  double direct = 0.0;
  for (std::uint64_t i = kDirect; i >= 1; --i) direct += f(static_cast<double>(n + i));
  const double K = static_cast<double>(n + kDirect);
  const double a = K + 0.5;
  // Beyond xs the factor (1 - exp(-2 lambda t)) equals 1 to double precision.
  const double xs = std::sqrt(40.0 / (2.0 * cpi * t));
  double tail = 0.0;
  double lo = a;
  while (lo < xs) {
    double hi = std::min(2.0 * lo, xs);
    tail += integrate_gl(f, lo, hi, 32);
    lo = hi;
  }
  // int_lo^inf (cpi x^2)^{2rho-1} / 2 dx
  const double s = 4.0 * rho - 2.0;
  tail += 0.5 * std::pow(cpi, 2.0 * rho - 1.0) * std::pow(lo, s + 1.0) / -(s + 1.0);
  return {direct + tail, f(K), kDirect};
}

}  // namespace spde
