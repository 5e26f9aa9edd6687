#include "spde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/noise.hpp"
#include "spde/parallel.hpp"
#include "spde/rng.hpp"
#include "spde/series.hpp"
#include "spde/stats.hpp"

namespace spde {

using std::numbers::pi;

std::string to_string(NormKind k) { return k == NormKind::Sup ? "sup" : "H"; }

namespace {

double field_norm(const SpectralField& v, NormKind k) {
  return k == NormKind::Sup ? sup_norm(v) : hr_norm(v, 0.0);
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

ExpMoment fernique_statistic(const std::vector<double>& norms, double R) {
  if (!(R > 0.0)) throw DomainError("fernique_statistic: R must be positive");
  std::vector<double> e(norms.size());
  for (std::size_t i = 0; i < norms.size(); ++i) e[i] = std::exp(norms[i] * norms[i] / (18.0 * R * R));
  MeanSE m = mean_se(e);
  return {m.mean, m.std_error};
}

CheckReport check_fernique(const FieldSampler& sampler, std::size_t samples, std::size_t quantile_samples,
                           NormKind norm, unsigned threads) {
  if (samples < 2 || quantile_samples < 2) throw ConfigError("fernique: need at least 2 samples per range");
  const std::size_t total = samples + quantile_samples;
  std::vector<double> norms(total);
  std::vector<std::vector<double>> coeffs(samples);
  parallel_for(total, threads, [&](std::size_t i) {
    SpectralField v = sampler(i);
    norms[i] = field_norm(v, norm);
    if (i < samples) coeffs[i].assign(v.coeffs().begin(), v.coeffs().end());
  });
  std::vector<double> main(norms.begin(), norms.begin() + static_cast<std::ptrdiff_t>(samples));
  std::vector<double> qs(norms.begin() + static_cast<std::ptrdiff_t>(samples), norms.end());
  if (mean_se(main).std_error == 0.0 || mean_se(qs).std_error == 0.0)
    throw ConfigError("fernique: degenerate sampler (zero variance)");

  const double R = order_statistic(qs, upper_quantile_rank(quantile_samples, 0.9));
  ExpMoment em = fernique_statistic(main, R);

  CheckReport r;
  r.name = "fernique-" + to_string(norm);
  r.lhs = em.mean + 3.0 * em.std_error;
  r.rhs = 13.0;
  r.margin = r.rhs - r.lhs;
  r.passed = r.lhs < r.rhs;
  r.samples = samples;
  r.tolerances = {{"se_multiplier", 3.0}, {"quantile", 0.9}, {"quantile_z", 2.5758293035489004},
                  {"centering_se", 5.0}};
  r.notes = "R=" + num(R) + " mean=" + num(em.mean) + " se=" + num(em.std_error);

  const std::size_t n = coeffs.front().size();
  std::vector<double> col(samples);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < samples; ++i) col[i] = coeffs[i][j];
    MeanSE m = mean_se(col);
    if (std::abs(m.mean) > 5.0 * m.std_error) {
      r.passed = false;
      r.notes += "; not centered (mode " + std::to_string(j + 1) + ")";
      break;
    }
  }
  return r;
}

CheckReport check_gamma_condition(double p, double beta, double T, double gamma, double eta, double c0,
                                  double C) {
  if (!(beta > 0.0 && beta < 0.25)) throw DomainError("gamma condition: beta must lie in (0, 1/4)");
  if (!(p > 1.0 / beta)) throw DomainError("gamma condition: need p > 1/beta");
  if (!(T > 0.0 && gamma >= 0.0 && eta >= 0.0 && c0 > 0.0 && C > 0.0))
    throw DomainError("gamma condition: T, c0, C must be positive and gamma, eta nonnegative");
  SeriesValue s = power_series_sum(4.0 * beta, 2.0, c0 * pi * pi, eta);
  const double pre = 720.0 * p * p * p * T * gamma * std::pow(pi, 4) * C * C;
  CheckReport r;
  r.name = "gamma-condition";
  r.lhs = pre * (s.value + s.error_bound);
  r.rhs = 1.0;
  r.margin = r.rhs - r.lhs;
  r.passed = r.lhs <= r.rhs;
  r.samples = 0;
  r.tolerances = {{"series_rel_error", s.value > 0.0 ? s.error_bound / s.value : 0.0}};
  r.notes = "eta=" + num(eta) + " series=" + num(s.value);
  return r;
}

double select_eta(double p, double beta, double T, double gamma, double c0, double C) {
  auto eta_at = [](int i) { return i == 0 ? 0.0 : std::ldexp(1.0, i - 1); };
  auto holds = [&](int i) { return check_gamma_condition(p, beta, T, gamma, eta_at(i), c0, C).passed; };
  int lo = 0, hi = 1024;
  if (holds(lo)) return 0.0;
  if (!holds(hi)) throw ConfigError("no eta up to 2^1023 satisfies the gamma condition");
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return eta_at(hi);
}

double sup_moment_rhs(std::size_t n, double eta, double beta, double p, double C, double c0) {
  double s = power_series_partial(4.0 * beta, 2.0, c0 * pi * pi, eta, n);
  return pi * pi * gaussian_abs_moment_root(p) * std::sqrt(s) * C;
}

CheckReport check_sup_moment_bound(std::size_t n, double t, double eta, double beta, double p,
                                   std::size_t samples, double C, double c0, std::uint64_t seed,
                                   unsigned threads) {
  if (!(beta > 0.0 && beta <= 0.5)) throw DomainError("sup moment: beta must lie in (0, 1/2]");
  if (!(p > 1.0 / beta)) throw DomainError("sup moment: need p > 1/beta");
  if (!(t > 0.0)) throw DomainError("sup moment: t must be positive");
  NoiseLadder ladder(seed, 1, n, t, eta, c0);
  std::vector<double> sq(samples);
  parallel_for(samples, threads, [&](std::size_t i) {
    std::vector<double> a(n);
    for (std::size_t j = 1; j <= n; ++j) a[j - 1] = ladder.fine_increment(i, j, 0).oe;
    double s = sup_norm(SpectralField(std::move(a), c0));
    sq[i] = s * s;
  });
  MeanSE m = mean_se(sq);
  CheckReport r;
  r.name = "sup-moment-bound";
  r.lhs = std::sqrt(m.mean);
  r.rhs = sup_moment_rhs(n, eta, beta, p, C, c0);
  r.margin = r.rhs - r.lhs;
  r.passed = r.lhs <= r.rhs;
  r.samples = samples;
  r.tolerances = {{"embedding_constant", C}};
  r.notes = "n=" + std::to_string(n) + " se=" + num(0.5 * m.std_error / std::max(r.lhs, 1e-300));
  return r;
}

void BoundCheckConfig::validate(const EquationSpec& eq) const {
  const double phi = varphi_coeff.value_or(eq.varphi);
  if (!(beta > 0.0)) throw ConfigError("bound.beta must be positive");
  if (!(phi >= 0.0 && phi < 1.0)) throw ConfigError("bound.varphi_coeff must lie in [0, 1)");
  if (!(psi < 2.0 - 2.0 * phi)) throw ConfigError("bound.psi must be < 2 - 2 varphi");
  if (!(slack >= 1.0)) throw ConfigError("bound.slack must be >= 1");
  if (!(p >= 2.0)) throw ConfigError("bound.p must be >= 2");
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("bound.eta must be finite and >= 0");
}

DriftGrowth drift_growth(const EquationSpec& eq) {
  if (!(eq.theta > 0.0)) throw ConfigError("equation.theta must be positive for the a priori bound");
  const double th = eq.theta, vt = eq.vartheta;
  const double l1 = eigenvalue(1, eq.c0);
  const double d = eq.rho - eq.varrho;
  // F(0) = 0 for both equations.
  const double a = 8.0 * th * th * std::max(1.0, std::pow(l1, d * (2.0 + 2.0 * vt)));
  const double b = 3.0 * th * th * std::pow(l1, 2.0 * eq.alpha - 1.0) * (1.0 + std::pow(l1, 2.0 * vt * d)) *
                   (1.0 + std::pow(2.0, std::max(2.0 * vt - 1.0, 0.0)));
  return {std::max(a, b), 2.0 * vt};
}

AprioriResult check_apriori_bound(const Trajectory& traj, const EquationSpec& eq, const BoundCheckConfig& bc) {
  bc.validate(eq);
  const std::size_t M = traj.grid.M;
  if (traj.Omega.size() != M + 1) throw ConfigError("a priori bound: trajectory lacks the shifted convolution");
  if (traj.X.size() != M + 1 || traj.O.size() != M + 1 || traj.Xi.size() != M + 1)
    throw ConfigError("a priori bound: incomplete trajectory");
  const double h = traj.grid.h();
  if (h > 1.0) throw DomainError("a priori bound: requires h <= 1");

  const double p = bc.p, eta = bc.eta, g = eq.gamma;
  const double phi = bc.varphi_coeff.value_or(eq.varphi);
  const DriftGrowth dg = drift_growth(eq);
  const double l1 = eigenvalue(1, eq.c0);
  const double inner_term = 1.0 + (std::sqrt(eta) + std::pow(eta, 1.5) * std::exp(eta)) *
                                      std::pow(l1, eq.rho - eq.varrho) +
                            std::sqrt(dg.theta) + std::sqrt(eta);
  const double C = 1.0 + dg.theta * std::pow(inner_term, 2.0 + dg.vartheta) /
                             ((1.0 - phi) * std::pow(1.0 - eq.alpha - eq.rho, 2.0 + dg.vartheta));

  std::vector<double> s(M + 1), om(M + 1), phis(M + 1), Phis(M + 1);
  for (std::size_t k = 0; k <= M; ++k) {
    s[k] = std::sqrt(eta) * hr_norm(traj.O[k] + traj.Xi[k], eq.varrho);
    om[k] = hr_norm(traj.Omega[k], 0.0);
    const double sup = sup_norm(traj.Omega[k]);
    phis[k] = g + g * sup * sup;
    Phis[k] = g + g * std::pow(sup, g);
  }
  double I1 = 0.0, I2 = 0.0;
  for (std::size_t k = 0; k < M; ++k) {
    I1 += 0.5 * h * (s[k] + s[k + 1]);
    I2 += 0.5 * h * (s[k] * s[k] + s[k + 1] * s[k + 1]);
  }
  const double M1 = std::max(1.0, I1), M2 = std::max(1.0, I2);
  const double noise_term = std::pow(M1, 2.0 + 2.0 * dg.vartheta) * M2;

  AprioriResult res;
  res.lhs.resize(M + 1);
  res.rhs.resize(M + 1);
  double I = 0.0;
  double worst_ratio = -1.0, worst_margin = std::numeric_limits<double>::infinity();
  std::size_t worst_k = 0, fails = 0;
  for (std::size_t k = 0; k <= M; ++k) {
    const double t = traj.grid.time(k);
    const double lhs = std::pow(hr_norm(traj.X[k], 0.0), p);
    double rhs = std::pow(2.0, p - 1.0) * std::pow(om[k], p);
    if (k > 0)
      rhs += std::pow(2.0, p - 1.0) * std::pow(t, 0.5 * p - 1.0) * std::pow(C, 0.5 * p) * bc.slack * I;
    res.lhs[k] = lhs;
    res.rhs[k] = rhs;
    if (!(lhs <= rhs * (1.0 + 1e-12))) ++fails;
    const double ratio = rhs > 0.0 ? lhs / rhs : (lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > worst_ratio) {
      worst_ratio = ratio;
      worst_k = k;
    }
    worst_margin = std::min(worst_margin, rhs - lhs);
    if (k == M) break;
    // Advance the weighted integral to t_{k+1}; the weight is constant on each step.
    const double a = p * phis[k] + p * eta * (1.0 + bc.beta);
    auto bracket = [&](std::size_t i) {
      return std::pow(2.0 * Phis[k] + eta / (2.0 * bc.beta) * om[i] * om[i] + noise_term, 0.5 * p);
    };
    const double avg = 0.5 * (bracket(k) + bracket(k + 1));
    const double w = a > 0.0 ? std::expm1(a * h) / a : h;
    I = I * std::exp(a * h) + avg * w;
  }
  CheckReport& r = res.report;
  r.name = "apriori-bound-" + to_string(eq.kind);
  r.lhs = res.lhs[worst_k];
  r.rhs = res.rhs[worst_k];
  r.margin = worst_margin;
  r.passed = fails == 0;
  r.samples = M + 1;
  r.tolerances = {{"slack", bc.slack}, {"rel_tol", 1e-12}, {"eta", eta}, {"beta", bc.beta}, {"psi", bc.psi}};
  r.notes = "worst k=" + std::to_string(worst_k) + " failures=" + std::to_string(fails);
  return res;
}

double noise_rate_constant(double rho, double epsilon, double p, double c0) {
  const double cpi = c0 * pi * pi;
  const double zeta = std::riemann_zeta(2.0 - 4.0 * rho - 4.0 * epsilon);
  return p * (p - 1.0) / (4.0 * std::pow(cpi, 2.0 * epsilon)) * std::pow(cpi, 2.0 * rho + 2.0 * epsilon - 1.0) *
         zeta;
}

NoiseRateResult check_noise_rate(const std::vector<std::size_t>& n_list, double t, double rho, double epsilon,
                                 double p, std::size_t samples, double c0, std::uint64_t seed, unsigned threads) {
  if (!(rho >= 0.0 && rho < 0.25)) throw DomainError("noise rate: rho must lie in [0, 1/4)");
  if (!(epsilon >= 0.0 && epsilon < 0.25 - rho)) throw DomainError("noise rate: epsilon must lie in [0, 1/4 - rho)");
  if (!(p >= 2.0)) throw DomainError("noise rate: p must be >= 2");
  if (!(t > 0.0)) throw DomainError("noise rate: t must be positive");
  if (n_list.empty()) throw ConfigError("noise rate: empty n list");
  const std::size_t nmax = *std::max_element(n_list.begin(), n_list.end());
  const std::size_t N = std::max<std::size_t>(4096, 2 * nmax);
  const double cpi = c0 * pi * pi;

  std::vector<double> w(N + 1), sd(N + 1);
  for (std::size_t k = 1; k <= N; ++k) {
    const double lam = eigenvalue(k, c0);
    w[k] = std::pow(lam, 2.0 * rho);
    sd[k] = std::sqrt(-std::expm1(-2.0 * lam * t) / (2.0 * lam));
  }
  // Modes above N: exact mean plus a Gaussian with matched variance.
  const double rem_mean = noise_spatial_error_oracle(N, t, rho, c0).value;
  const double a = static_cast<double>(N) + 0.5;
  const double rem_var = 2.0 * 0.25 * std::pow(cpi, 4.0 * rho - 2.0) * std::pow(a, 8.0 * rho - 3.0) / (3.0 - 8.0 * rho);
  const double rem_sd = std::sqrt(rem_var);

  std::vector<std::size_t> ns = n_list;
  std::vector<std::vector<double>> vals(ns.size(), std::vector<double>(samples));
  parallel_for(samples, threads, [&](std::size_t i) {
    std::vector<double> term(N + 1, 0.0);
    for (std::size_t k = 1; k <= N; k += 2) {
      auto g = gaussian_pair(seed, i, static_cast<std::uint32_t>(k), 0);
      double o = sd[k] * g.first;
      term[k] = w[k] * o * o;
      if (k + 1 <= N) {
        double o2 = sd[k + 1] * g.second;
        term[k + 1] = w[k + 1] * o2 * o2;
      }
    }
    double fl = gaussian_pair(seed, i, static_cast<std::uint32_t>(N + 1), 0).first;
    // Suffix sums from the top mode down.
    std::vector<double> suffix(N + 2, 0.0);
    suffix[N + 1] = rem_mean + rem_sd * fl;
    for (std::size_t k = N; k >= 1; --k) suffix[k] = suffix[k + 1] + term[k];
    for (std::size_t l = 0; l < ns.size(); ++l) vals[l][i] = suffix[ns[l] + 1];
  });

  NoiseRateResult res;
  const double K = noise_rate_constant(rho, epsilon, p, c0);
  double worst = 0.0;
  for (std::size_t l = 0; l < ns.size(); ++l) {
    MeanSE m = mean_se(vals[l]);
    TailSum o = noise_spatial_error_oracle(ns[l], t, rho, c0);
    NoiseRateRow row{ns[l], m.mean, m.std_error, o.value, o.tail_bound,
                     o.value * std::pow(static_cast<double>(ns[l]), 4.0 * epsilon), K};
    worst = std::max(worst, std::abs(m.mean - o.value) / (3.0 * m.std_error + o.tail_bound));
    worst = std::max(worst, row.rate_lhs / row.rate_rhs);
    res.rows.push_back(row);
  }
  CheckReport& r = res.report;
  r.name = "noise-rate";
  r.lhs = worst;
  r.rhs = 1.0;
  r.margin = 1.0 - worst;
  r.passed = worst <= 1.0;
  r.samples = samples;
  r.tolerances = {{"se_multiplier", 3.0}, {"epsilon", epsilon}, {"rho", rho}, {"p", p}};
  r.notes = "monte carlo truncated at " + std::to_string(N) + " modes";
  return res;
}

SeriesLimitResult check_series_limit(double alpha, double beta_exp, const std::vector<double>& eta_list) {
  if (!(beta_exp > 1.0 + alpha)) throw DomainError("series limit: need beta_exp > 1 + alpha");
  if (eta_list.size() < 2) throw ConfigError("series limit: need at least two eta values");
  for (std::size_t i = 0; i < eta_list.size(); ++i) {
    if (!(eta_list[i] >= 0.0)) throw DomainError("series limit: eta must be nonnegative");
    if (i > 0 && !(eta_list[i] > eta_list[i - 1])) throw DomainError("series limit: eta list must increase");
  }
  SeriesLimitResult res;
  std::vector<double> err;
  for (double eta : eta_list) {
    SeriesValue s = power_series_sum(alpha, beta_exp, 1.0, eta);
    res.values.push_back(s.value);
    err.push_back(s.error_bound);
  }
  bool decreasing = true;
  for (std::size_t i = 1; i < res.values.size(); ++i)
    if (!(res.values[i] + err[i] < res.values[i - 1] - err[i - 1])) decreasing = false;
  const double lo = eta_list.front(), hi = eta_list.back();
  const bool wide = hi >= 1e4 * std::max(lo, 1.0);
  const double first = res.values.front(), last = res.values.back();
  CheckReport& r = res.report;
  r.name = "series-limit";
  r.lhs = last;
  r.rhs = wide ? first / 100.0 : first;
  r.margin = r.rhs - r.lhs;
  r.passed = decreasing && r.lhs < r.rhs;
  r.samples = eta_list.size();
  r.tolerances = {{"ratio", wide ? 0.01 : 1.0}};
  r.notes = decreasing ? "strictly decreasing" : "not strictly decreasing";
  return res;
}

SpectralField random_test_field(PhiloxStream& rng, std::size_t n, double c0) {
  const double s = rng.uniform(0.0, 2.0);
  const double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
  std::vector<double> a(n);
  for (std::size_t j = 0; j < n; ++j) a[j] = scale * rng.normal() * std::pow(static_cast<double>(j + 1), -s);
  return SpectralField(std::move(a), c0);
}

namespace {

constexpr std::uint64_t kSuiteTag = 0x8000000000000000ull;

CheckReport aggregate(std::string name, const std::vector<CheckReport>& rs) {
  CheckReport out;
  out.name = std::move(name);
  out.samples = rs.size();
  std::size_t passed = 0;
  double worst = -INFINITY;
  std::size_t wi = 0;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    if (rs[i].passed) ++passed;
    double ratio = rs[i].rhs > 0.0 ? rs[i].lhs / rs[i].rhs : (rs[i].lhs > 0.0 ? INFINITY : 0.0);
    if (ratio > worst) {
      worst = ratio;
      wi = i;
    }
  }
  out.passed = passed == rs.size();
  out.lhs = worst;
  out.rhs = 1.0;
  out.margin = 1.0 - worst;
  if (!rs.empty()) out.tolerances = rs[wi].tolerances;
  out.notes = std::to_string(passed) + "/" + std::to_string(rs.size()) + " passed";
  return out;
}

}  // namespace

CheckReport check_coercivity_suite(const EquationSpec& spec, std::size_t pairs, std::size_t n,
                                   std::uint64_t seed, unsigned threads) {
  std::vector<CheckReport> rs(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) {
    PhiloxStream rng(seed, kSuiteTag + 0x100000000ull + i);
    SpectralField v = random_test_field(rng, n, spec.c0), w = random_test_field(rng, n, spec.c0);
    rs[i] = check_coercivity(v, w, spec);
  });
  return aggregate("coercivity-suite-" + to_string(spec.kind), rs);
}

CheckReport check_lipschitz_suite(const EquationSpec& spec, double ratio, std::size_t pairs, std::size_t n,
                                  std::uint64_t seed, unsigned threads) {
  std::vector<CheckReport> rs(pairs);
  parallel_for(pairs, threads, [&](std::size_t i) {
    PhiloxStream rng(seed, kSuiteTag + 0x200000000ull + i);
    SpectralField v = random_test_field(rng, n, spec.c0), w = random_test_field(rng, n, spec.c0);
    rs[i] = check_lipschitz(v, w, spec, ratio);
  });
  return aggregate("lipschitz-suite-" + to_string(spec.kind), rs);
}

CheckReport check_skew_suite(std::size_t fields, std::size_t n, std::uint64_t seed, double tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fields; ++i) {
    PhiloxStream rng(seed, kSuiteTag + 0x300000000ull + i);
    SpectralField v = random_test_field(rng, n);
    // c1 = 1 gives (v^2)'.
    SpectralField d = burgers_apply_exact(v, 1.0, 0);
    const double ip = std::abs(inner(project(v, d.size()), d));
    const double scale = hr_norm(v, 0.0) * hr_norm(d, 0.0);
    worst = std::max(worst, scale > 0.0 ? ip / scale : ip);
  }
  CheckReport r = CheckReport::compare("burgers-skew", worst, 0.0, 0.0, tol);
  r.samples = fields;
  r.notes = "relative |<v,(v^2)'>|";
  return r;
}

CheckReport check_drift_oracle_suite(const EquationSpec& spec, std::size_t fields, std::size_t max_n,
                                     std::uint64_t seed, double tol) {
  double worst = 0.0;
  for (std::size_t i = 0; i < fields; ++i) {
    PhiloxStream rng(seed, kSuiteTag + 0x400000000ull + i);
    const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * static_cast<double>(max_n));
    std::vector<double> a(std::min(n, max_n));
    for (double& x : a) x = rng.normal() * 0.5;
    SpectralField v(std::move(a), spec.c0);
    SpectralField f = apply_drift(spec, v, 0), g = apply_drift_exact(spec, v, 0);
    for (std::size_t j = 0; j < f.size(); ++j) worst = std::max(worst, std::abs(f.coeffs()[j] - g.coeffs()[j]));
  }
  CheckReport r = CheckReport::compare("drift-oracle-" + to_string(spec.kind), worst, 0.0, 0.0, tol);
  r.samples = fields;
  return r;
}

}  // namespace spde
