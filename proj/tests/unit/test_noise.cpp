#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gen.hpp"
#include "spde/errors.hpp"
#include "spde/noise.hpp"
#include "spde/rng.hpp"
#include "spde/stats.hpp"
#include "spde/verify.hpp"

using namespace spde;
using std::numbers::pi;

TEST_CASE("ou increment covariance") {
  auto c = ou_covariance(1.0, 0.0, 1.0);
  CHECK(c.var1 == doctest::Approx(0.4323324).epsilon(1e-7));
  CHECK(c.var1 == c.var2);
  CHECK(c.var1 == c.cov);
  CHECK(gen::rel_diff(ou_covariance(1e-10, 0.0, 0.5).var1, 0.5) < 1e-8);
  CHECK_THROWS_AS(ou_covariance(1.0, 0.0, 0.0), DomainError);
  // Positive semidefinite on a panel.
  for (double lam : {1e-3, 1.0, 1e2, 1e5})
    for (double eta : {0.0, 1e-8, 1.0, 1e6, 1e80})
      for (double h : {1e-6, 1e-2, 1.0}) {
        auto k = ou_covariance(lam, eta, h);
        CHECK(k.var1 * k.var2 - k.cov * k.cov >= -1e-14 * k.var1 * k.var2);
      }
}

TEST_CASE("eta = 0 increments coincide") {
  for (std::uint32_t i = 0; i < 100; ++i) {
    auto g = gaussian_pair(1, 2, 3, i);
    auto p = sample_ou_increment(4.0, 0.0, 0.1, g);
    CHECK(p.o == p.oe);
  }
}

TEST_CASE("ou increment variance by Monte Carlo") {
  const std::size_t N = 1000000;
  std::vector<double> x1(N), x2(N), x12(N);
  const double lam = 1.0, eta = 3.0, h = 1.0;
  for (std::size_t i = 0; i < N; ++i) {
    auto p = sample_ou_increment(lam, eta, h,
                                 gaussian_pair(7, 0, 1 + static_cast<std::uint32_t>(i >> 20),
                                               static_cast<std::uint32_t>(i & 0xfffff)));
    x1[i] = p.o * p.o;
    x2[i] = p.oe * p.oe;
    x12[i] = p.o * p.oe;
  }
  auto c = ou_covariance(lam, eta, h);
  auto m1 = mean_se(x1), m2 = mean_se(x2), m12 = mean_se(x12);
  CHECK(std::abs(m1.mean - (1 - std::exp(-2.0)) / 2) < 3 * m1.std_error);
  CHECK(std::abs(m2.mean - c.var2) < 3 * m2.std_error);
  CHECK(std::abs(m12.mean - c.cov) < 3 * m12.std_error);
}

TEST_CASE("per-mode variance panel within 4 standard errors") {
  const std::size_t N = 100000;
  std::uint32_t panel = 0;
  for (double lam : {0.5, 10.0, 400.0})
    for (double eta : {0.0, 2.0})
      for (double h : {0.01, 0.25}) {
        ++panel;
        std::vector<double> a(N), b(N);
        for (std::size_t i = 0; i < N; ++i) {
          auto p = sample_ou_increment(lam, eta, h, gaussian_pair(11, panel, 1, static_cast<std::uint32_t>(i)));
          a[i] = p.o * p.o;
          b[i] = p.oe * p.oe;
        }
        auto c = ou_covariance(lam, eta, h);
        auto ma = mean_se(a), mb = mean_se(b);
        CHECK(std::abs(ma.mean - c.var1) < 4 * ma.std_error);
        CHECK(std::abs(mb.mean - c.var2) < 4 * mb.std_error);
      }
}

TEST_CASE("coarsen") {
  IncrementPair one{0.3, -0.2};
  auto c1 = coarsen(std::span(&one, 1), 5.0, 1.0, 0.1);
  CHECK(c1.o == one.o);
  CHECK(c1.oe == one.oe);
  CHECK_THROWS_AS(coarsen({}, 1.0, 0.0, 0.1), DomainError);

  // r = 2, lambda = 1, h_f = 0.5: coarse recursion reproduces the fine one at t = 1.
  const double lam = 1.0, hf = 0.5;
  IncrementPair f[2] = {{0.7, 0.7}, {-0.4, -0.4}};
  auto c = coarsen(f, lam, 0.0, hf);
  CHECK(c.o == doctest::Approx(std::exp(-0.5) * 0.7 - 0.4).epsilon(1e-15));
  double fine = 0.0;
  for (auto& p : f) fine = std::exp(-lam * hf) * fine + p.o;
  double coarse = std::exp(-lam * 1.0) * 0.0 + c.o;
  CHECK(std::abs(fine - coarse) < 1e-14);

  // Distribution of the coarsened increment: lambda = 2, H = 0.25, r = 8.
  const std::size_t N = 100000, r = 8;
  const double H = 0.25, l2 = 2.0;
  std::vector<double> sq(N);
  std::vector<IncrementPair> buf(r);
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < r; ++m)
      buf[m] = sample_ou_increment(l2, 0.0, H / r,
                                   gaussian_pair(3, i, 1, static_cast<std::uint32_t>(m)));
    auto cc = coarsen(buf, l2, 0.0, H / r);
    sq[i] = cc.o * cc.o;
  }
  auto m = mean_se(sq);
  CHECK(std::abs(m.mean - (1 - std::exp(-2 * l2 * H)) / (2 * l2)) < 3 * m.std_error);
}

TEST_CASE("ladder determinism and ranges") {
  NoiseLadder a(42, 64, 8, 1.0, 2.0), b(42, 64, 8, 1.0, 2.0);
  for (std::size_t j = 1; j <= 8; ++j)
    for (std::size_t k = 0; k < 64; k += 7) {
      auto x = a.fine_increment(3, j, k), y = b.fine_increment(3, j, k);
      CHECK(x.o == y.o);
      CHECK(x.oe == y.oe);
    }
  CHECK_THROWS_AS(a.fine_increment(0, 0, 0), DomainError);
  CHECK_THROWS_AS(a.fine_increment(0, 9, 0), DomainError);
  CHECK_THROWS_AS(a.fine_increment(0, 1, 64), DomainError);
  CHECK_THROWS_AS(NoiseLadder(1, 0, 8, 1.0, 0.0), ConfigError);
  CHECK_THROWS_AS(NoiseLadder(1, 8, 8, 1.0, -1.0), ConfigError);
  CHECK_THROWS_AS(convolution_path(a, 0, 8, GridSpec(1.0, 48)), ConfigError);
  CHECK_THROWS_AS(convolution_path(a, 0, 9, GridSpec(1.0, 64)), ConfigError);
  CHECK_THROWS_AS(convolution_path(a, 0, 8, GridSpec(2.0, 64)), ConfigError);
}

TEST_CASE("convolution path second moment") {
  const std::size_t n = 16, N = 10000;
  NoiseLadder lad(5, 4, n, 1.0, 0.0);
  GridSpec g(1.0, 4);
  std::vector<double> sq(N);
  for (std::size_t i = 0; i < N; ++i) {
    auto p = convolution_path(lad, i, n, g);
    CHECK(p.O[0] == SpectralField::zeros(n));
    double h = hr_norm(p.O.back(), 0.0);
    sq[i] = h * h;
  }
  double exact = 0.0;
  for (std::size_t j = 1; j <= n; ++j) exact += ou_covariance(eigenvalue(j, 1.0), 0.0, 1.0).var1;
  auto m = mean_se(sq);
  CHECK(std::abs(m.mean - exact) < 3 * m.std_error);
}

TEST_CASE("coupled resolutions agree on shared modes and times") {
  NoiseLadder lad(9, 128, 16, 1.0, 3.0);
  auto coarse = convolution_path(lad, 2, 8, GridSpec(1.0, 64));
  auto fine = convolution_path(lad, 2, 16, GridSpec(1.0, 128));
  for (std::size_t k = 0; k <= 64; ++k)
    for (std::size_t j = 1; j <= 8; ++j) {
      CHECK(std::abs(coarse.O[k].coeff(j) - fine.O[2 * k].coeff(j)) < 1e-14);
      CHECK(std::abs(coarse.Oeta[k].coeff(j) - fine.Oeta[2 * k].coeff(j)) < 1e-14);
    }
  Resolution res[] = {{8, 64}, {16, 128}, {4, 16}};
  auto many = convolution_paths(lad, 2, res);
  for (std::size_t k = 0; k <= 64; ++k) CHECK(many[0].O[k] == coarse.O[k]);
  for (std::size_t k = 0; k <= 128; ++k) CHECK(many[1].O[k] == fine.O[k]);
  CHECK(many[2].O[16] == convolution_path(lad, 2, 4, GridSpec(1.0, 16)).O[16]);
}

TEST_CASE("semigroup consistency of the convolution") {
  NoiseLadder lad(13, 64, 8, 1.0, 0.0);
  GridSpec g(1.0, 64);
  auto p = convolution_path(lad, 4, 8, g);
  auto seg = convolution_segment(lad, 4, 8, g, 32, 64);
  CHECK(seg.front() == SpectralField::zeros(8));
  auto joined = semigroup_apply(p.O[32], 0.5) + seg.back();
  for (std::size_t j = 1; j <= 8; ++j)
    CHECK(std::abs(joined.coeff(j) - p.O[64].coeff(j)) <= 1e-14 * (1 + std::abs(p.O[64].coeff(j))));
}

TEST_CASE("shifted convolution") {
  GridSpec g(1.0, 16);
  NoiseLadder lad0(21, 16, 6, 1.0, 0.0);
  auto p = shifted_convolution_value(lad0, 0, 6, g, SpectralField::zeros(6));
  for (std::size_t k = 0; k <= 16; ++k) CHECK(p.Omega[k] == p.O[k]);

  SpectralField xi({1.0, -0.5, 0.25});
  auto s = shifted_convolution_value(NoiseLadder::silent(16, 6, 1.0, 2.5), 0, 6, g, xi);
  for (std::size_t k = 0; k <= 16; ++k) CHECK(s.Omega[k] == semigroup_apply(project(xi, 6), g.time(k), 2.5));
}

TEST_CASE("shifted convolution matches the defining quadrature") {
  // Omega_t = O_t + e^{tA} xi - int_0^t e^{(t-s)(A-eta)} eta (O_s + e^{sA} xi) ds, single mode.
  const std::size_t F = 1u << 20;
  const double eta = 1.0, xi1 = 0.8, lam = pi * pi;
  NoiseLadder lad(77, F, 1, 1.0, eta);
  GridSpec fine(1.0, F);
  auto p = convolution_path(lad, 0, 1, fine);
  auto ident = shifted_convolution_value(lad, 0, 1, GridSpec(1.0, 1), SpectralField({xi1}));
  const double h = 1.0 / F;
  double integral = 0.0;
  for (std::size_t k = 0; k <= F; ++k) {
    double s = k * h;
    double g = std::exp(-(lam + eta) * (1.0 - s)) * eta * (p.O[k].coeff(1) + std::exp(-lam * s) * xi1);
    integral += (k == 0 || k == F ? 0.5 : 1.0) * g * h;
  }
  double quad = p.O[F].coeff(1) + std::exp(-lam) * xi1 - integral;
  CHECK(std::abs(quad - ident.Omega[1].coeff(1)) < 1e-6);
}

TEST_CASE("spatial error oracle") {
  auto o = noise_spatial_error_oracle(1, 100.0, 0.0, 1.0);
  CHECK(o.value == doctest::Approx((pi * pi / 6 - 1) / (2 * pi * pi)).epsilon(1e-9));
  CHECK(noise_spatial_error_oracle(1000000000000000ull, 1.0, 0.0, 1.0).value < 1e-15);
  CHECK(noise_spatial_error_oracle(5, 0.0, 0.1, 1.0).value == 0.0);
  // Brute-force partial sum plus integral remainder as an independent oracle.
  for (double rho : {0.0, 0.1, 0.2}) {
    double brute = 0.0;
    const std::size_t K = 2000000;
    for (std::size_t k = K; k > 8; --k) {
      double lam = eigenvalue(k, 1.0);
      brute += std::pow(lam, 2 * rho) * -std::expm1(-2 * lam * 0.3) / (2 * lam);
    }
    double s = 4 * rho - 2;
    brute += 0.5 * std::pow(pi * pi, 2 * rho - 1) * std::pow(K + 0.5, s + 1) / -(s + 1);
    CHECK(gen::rel_diff(noise_spatial_error_oracle(8, 0.3, rho, 1.0).value, brute) < 1e-9);
  }
  const double eps = 0.05, rho = 0.15;
  double K = noise_rate_constant(rho, eps, 2.0, 1.0);
  for (std::size_t n = 4; n <= 256; n *= 2) {
    double v = noise_spatial_error_oracle(n, 1.0, rho, 1.0).value;
    CHECK(v * std::pow(double(n), 4 * eps) <= K);
  }
}
