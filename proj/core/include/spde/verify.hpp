#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spde/check_report.hpp"
#include "spde/nonlinear.hpp"
#include "spde/rng.hpp"
#include "spde/scheme.hpp"
#include "spde/spectral.hpp"

namespace spde {

enum class NormKind { Sup, H };
std::string to_string(NormKind k);

// Draws the i-th i.i.d. sample.
using FieldSampler = std::function<SpectralField(std::uint64_t)>;

// R = inflated empirical 0.9-quantile over samples [samples, samples + quantile_samples);
// the exponential moment uses samples [0, samples).
CheckReport check_fernique(const FieldSampler& sampler, std::size_t samples, std::size_t quantile_samples,
                           NormKind norm = NormKind::Sup, unsigned threads = 1);

// Mean and standard error of exp(x^2 / (18 R^2)).
struct ExpMoment {
  double mean, std_error;
};
ExpMoment fernique_statistic(const std::vector<double>& norms, double R);

// 720 p^3 T gamma pi^4 * sum_k k^{4 beta} / (lambda_k + eta) * C^2 <= 1, where C
// is the W^{beta,p} -> sup embedding constant.
CheckReport check_gamma_condition(double p, double beta, double T, double gamma, double eta, double c0,
                                  double embedding_constant);

// Smallest eta in {0, 2^0, 2^1, ..., 2^1023} satisfying the condition.
// ConfigError when none does.
double select_eta(double p, double beta, double T, double gamma, double c0, double embedding_constant);

// (E sup|O^eta_t|^2)^{1/2} against
// pi^2 (E|Y|^p)^{1/p} [sum_{k<=n} k^{4 beta} / (lambda_k + eta)]^{1/2} C.
CheckReport check_sup_moment_bound(std::size_t n, double t, double eta, double beta, double p,
                                   std::size_t samples, double embedding_constant, double c0 = 1.0,
                                   std::uint64_t seed = 1, unsigned threads = 1);
double sup_moment_rhs(std::size_t n, double eta, double beta, double p, double embedding_constant,
                      double c0 = 1.0);

struct BoundCheckConfig {
  double beta = 1.0;                    // Young parameter
  double psi = 0.0;                     // recorded; must be < 2 - 2 varphi
  std::optional<double> varphi_coeff;   // defaults to the equation's varphi
  double slack = 1.05;
  double p = 2.0;
  double eta = 1.0;
  void validate(const EquationSpec& eq) const;
};

// Effective (theta, vartheta) of the drift growth hypotheses implied by the
// Lipschitz bound with prefactor eq.theta.
struct DriftGrowth {
  double theta, vartheta;
};
DriftGrowth drift_growth(const EquationSpec& eq);

struct AprioriResult {
  CheckReport report;
  std::vector<double> lhs, rhs;  // per grid point
};

// Pathwise bound on ||X_{t_k}||^p at every grid point. The trajectory must
// carry Omega computed with shift bound.eta.
AprioriResult check_apriori_bound(const Trajectory& traj, const EquationSpec& eq,
                                  const BoundCheckConfig& bound);

struct NoiseRateRow {
  std::size_t n;
  double mc_mean, mc_se;
  double oracle, oracle_tail;
  double rate_lhs, rate_rhs;  // oracle(n) n^{4 eps} vs the explicit constant
};

struct NoiseRateResult {
  CheckReport report;
  std::vector<NoiseRateRow> rows;
};

NoiseRateResult check_noise_rate(const std::vector<std::size_t>& n_list, double t, double rho,
                                 double epsilon, double p, std::size_t samples, double c0 = 1.0,
                                 std::uint64_t seed = 1, unsigned threads = 1);

double noise_rate_constant(double rho, double epsilon, double p, double c0);

struct SeriesLimitResult {
  CheckReport report;
  std::vector<double> values;
};

SeriesLimitResult check_series_limit(double alpha, double beta_exp, const std::vector<double>& eta_list);

// Random field with Gaussian coefficients decaying like j^{-s}, s ~ U[0, 2],
// and a log-uniform overall scale in [1e-2, 1e2].
SpectralField random_test_field(PhiloxStream& rng, std::size_t n, double c0 = 1.0);

// Randomized suites over `pairs` independent (v, w) draws with n modes. The
// report's lhs is the worst lhs/rhs ratio.
CheckReport check_coercivity_suite(const EquationSpec& spec, std::size_t pairs, std::size_t n,
                                   std::uint64_t seed, unsigned threads = 1);
CheckReport check_lipschitz_suite(const EquationSpec& spec, double embedding_ratio, std::size_t pairs,
                                  std::size_t n, std::uint64_t seed, unsigned threads = 1);
// Worst |<v, (v^2)'>| / (||v||_H ||(v^2)'||_H) over random v.
CheckReport check_skew_suite(std::size_t fields, std::size_t n, std::uint64_t seed, double tol = 1e-10);
// Pseudo-spectral against exact-convolution drift, max absolute difference.
CheckReport check_drift_oracle_suite(const EquationSpec& spec, std::size_t fields, std::size_t max_n,
                                     std::uint64_t seed, double tol = 1e-10);

}  // namespace spde
