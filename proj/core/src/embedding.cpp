#include "spde/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "spde/errors.hpp"
#include "spde/rng.hpp"
#include "spde/spectral.hpp"
#include "spde/transform.hpp"

namespace spde {

namespace {

constexpr std::uint64_t kEmbeddingTag = 0x8000000000000000ull | 0x454d42ull;

struct LqEval {
  double norm_q_pow;          // ||u||_q^q
  std::vector<double> grad;   // int |u|^{q-2} u e_j, j = 1..m
};

std::size_t lq_grid(std::size_t m, double q) {
  bool integer = q == std::floor(q);
  return integer ? static_cast<std::size_t>(q) * m + 2 : 16 * m + 16;
}

LqEval lq_eval(const std::vector<double>& a, double q, bool want_grad) {
  const std::size_t m = a.size();
  const std::size_t N = lq_grid(m, q);
  std::vector<double> u = evaluate_grid(SpectralField(a), N - 1);
  LqEval r{0.0, {}};
  std::vector<double> w(N - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    double au = std::abs(u[i]);
    double pq = std::pow(au, q - 2.0);
    r.norm_q_pow += pq * au * au;
    w[i] = pq * u[i];
  }
  r.norm_q_pow /= static_cast<double>(N);
  if (want_grad) {
    std::vector<double> y(N - 1);
    dst1(w, y);
    r.grad.resize(m);
    const double s = 1.0 / (std::sqrt(2.0) * static_cast<double>(N));
    for (std::size_t j = 0; j < m; ++j) r.grad[j] = y[j] * s;
  }
  return r;
}

std::vector<double> weights(std::size_t m, double r, double c0) {
  std::vector<double> w(m);
  for (std::size_t j = 0; j < m; ++j) w[j] = std::pow(eigenvalue(j + 1, c0), 2.0 * r);
  return w;
}

double hnorm2(const std::vector<double>& a, const std::vector<double>& w) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += w[j] * a[j] * a[j];
  return s;
}

double log_ratio(const std::vector<double>& a, const std::vector<double>& w, double q) {
  double nq = lq_eval(a, q, false).norm_q_pow;
  return std::log(nq) / q - 0.5 * std::log(hnorm2(a, w));
}

// Normalized gradient ascent of log(||u||_q / ||u||_{H_r}) in the H_r geometry.
double ascend(std::vector<double>& a, const std::vector<double>& w, double q, std::size_t iters) {
  double scale = std::sqrt(hnorm2(a, w));
  for (double& x : a) x /= scale;
  double f = log_ratio(a, w, q);
  double tau = 0.1;
  std::vector<double> trial(a.size());
  for (std::size_t it = 0; it < iters && tau > 1e-14; ++it) {
    LqEval e = lq_eval(a, q, true);
    const double h2 = hnorm2(a, w);
    std::vector<double> d(a.size());
    double dn = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      double g = e.grad[j] / e.norm_q_pow - w[j] * a[j] / h2;
      d[j] = g / w[j];
      dn += w[j] * d[j] * d[j];
    }
    dn = std::sqrt(dn);
    if (dn < 1e-14) break;
    for (;;) {
      for (std::size_t j = 0; j < a.size(); ++j) trial[j] = a[j] + tau * d[j] / dn;
      double ft = log_ratio(trial, w, q);
      if (ft > f) {
        double s = std::sqrt(hnorm2(trial, w));
        for (std::size_t j = 0; j < a.size(); ++j) a[j] = trial[j] / s;
        f = ft;
        tau *= 1.5;
        break;
      }
      tau *= 0.5;
      if (tau < 1e-14) break;
    }
  }
  return f;
}

std::vector<double> random_start(PhiloxStream& rng, std::size_t m) {
  std::vector<double> a(m);
  double decay = rng.uniform(0.0, 1.5);
  for (std::size_t j = 0; j < m; ++j) a[j] = rng.normal() * std::pow(static_cast<double>(j + 1), -decay);
  return a;
}

}  // namespace

double lebesgue_ratio(const std::vector<double>& coeffs, double r, double q, double c0) {
  auto w = weights(coeffs.size(), r, c0);
  return std::exp(log_ratio(coeffs, w, q));
}

EmbeddingEstimate estimate_embedding(double r, double q, std::size_t modes, std::size_t iters,
                                     std::uint64_t seed, double c0) {
  if (modes == 0 || iters == 0) throw DomainError("estimate_embedding: modes and iters must be positive");
  if (!(q >= 2.0)) throw DomainError("estimate_embedding: q must be >= 2");
  constexpr int kRestarts = 4;
  std::vector<double> best;
  double fbest = -INFINITY;
  std::size_t m = std::min<std::size_t>(8, modes);
  for (std::uint64_t level = 0;; ++level) {
    auto w = weights(m, r, c0);
    PhiloxStream rng(seed, kEmbeddingTag + level);
    std::vector<std::vector<double>> starts;
    if (best.empty()) {
      std::vector<double> e1(m, 0.0);
      e1[0] = 1.0;
      starts.push_back(e1);
    } else {
      std::vector<double> warm(m, 0.0);
      std::copy(best.begin(), best.end(), warm.begin());
      starts.push_back(warm);
    }
    for (int k = 0; k < kRestarts; ++k) starts.push_back(random_start(rng, m));
    // The warm start comes first and ascent never decreases it, so the level
    // best is at least the previous one.
    double flevel = -INFINITY;
    std::vector<double> blevel;
    for (auto& s : starts) {
      double f = ascend(s, w, q, iters);
      if (f > flevel) {
        flevel = f;
        blevel = s;
      }
    }
    fbest = std::max(fbest, flevel);
    best = std::move(blevel);
    if (m == modes) break;
    m = std::min(2 * m, modes);
  }
  EmbeddingEstimate e{"lebesgue", r, q, modes, iters, seed, c0, std::exp(fbest), 1.05, best};
  return e;
}

double sup_ratio(const std::vector<double>& coeffs, double beta, double p) {
  SpectralField v(coeffs);
  return sup_norm(v) / sobolev_norm(v, beta, p);
}

EmbeddingEstimate estimate_sup_embedding(double beta, double p, std::size_t modes, std::size_t iters,
                                         std::uint64_t seed) {
  if (modes == 0 || iters == 0) throw DomainError("estimate_sup_embedding: modes and iters must be positive");
  if (!(beta > 0.0 && beta < 1.0) || !(beta * p > 1.0))
    throw DomainError("estimate_sup_embedding: need beta in (0,1) and beta p > 1");
  auto ratio = [&](const std::vector<double>& a) {
    SpectralField v(a);
    return sup_norm(v, 16) / sobolev_norm_fixed(v, beta, p, 8);
  };
  PhiloxStream rng(seed, kEmbeddingTag + 1000);
  std::vector<double> best(modes, 0.0);
  best[0] = 1.0;
  double fbest = ratio(best);
  constexpr int kRestarts = 4;
  for (int restart = 0; restart <= kRestarts; ++restart) {
    std::vector<double> a = restart == 0 ? best : random_start(rng, modes);
    double f = ratio(a);
    double delta = 0.25;
    std::size_t evals = 0;
    while (evals < iters && delta > 1e-6) {
      bool improved = false;
      for (std::size_t j = 0; j < modes && evals < iters; ++j) {
        for (double sgn : {1.0, -1.0}) {
          std::vector<double> t = a;
          double amax = 0.0;
          for (double x : a) amax = std::max(amax, std::abs(x));
          t[j] += sgn * delta * amax;
          double ft = ratio(t);
          ++evals;
          if (ft > f) {
            a = t;
            f = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) delta *= 0.5;
    }
    if (f > fbest) {
      fbest = f;
      best = a;
    }
  }
  // Report the ratio under the convergence-checked quadrature.
  double checked;
  try {
    checked = sup_ratio(best, beta, p);
  } catch (const AccuracyError&) {
    SpectralField v(best);
    checked = sup_norm(v) / sobolev_norm(v, beta, p, 32);
  }
  EmbeddingEstimate e{"sup", beta, p, modes, iters, seed, 1.0, checked, 1.05, best};
  return e;
}

}  // namespace spde
