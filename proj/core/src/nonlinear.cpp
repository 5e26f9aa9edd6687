#include "spde/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/errors.hpp"
#include "spde/transform.hpp"

namespace spde {

using std::numbers::pi;
using std::numbers::sqrt2;

std::string to_string(EquationKind k) { return k == EquationKind::Burgers ? "burgers" : "allen-cahn"; }

EquationKind equation_kind_from_string(const std::string& s) {
  if (s == "burgers" || s == "Burgers") return EquationKind::Burgers;
  if (s == "allen-cahn" || s == "allen_cahn" || s == "AllenCahn") return EquationKind::AllenCahn;
  throw ConfigError("unknown equation kind '" + s + "' (expected burgers or allen-cahn)");
}

double EquationSpec::gamma_formula() const {
  if (kind == EquationKind::Burgers) return std::max(2.0 * c1 * c1 / c0, 4.0);
  return std::max(6.0, c1 + c1 * c1 + c2 * c2);
}

double EquationSpec::chi_max() const {
  return kind == EquationKind::Burgers ? varrho / 2.0 - 1.0 / 16.0 : varrho / 3.0 - 1.0 / 18.0;
}

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void EquationSpec::validate() const {
  require(c0 > 0.0 && std::isfinite(c0), "equation.c0 must be positive");
  require(std::isfinite(c1), "equation.c1 must be finite");
  require(gamma >= gamma_formula(),
          "equation.gamma below the coercivity constant " + fmt(gamma_formula()));
  if (kind == EquationKind::Burgers) {
    require(varrho > 0.125 && varrho < 0.25, "equation.varrho must lie in (1/8, 1/4)");
    require(rho == 0.125, "equation.rho must equal 1/8 for Burgers");
    require(alpha == 0.5, "equation.alpha must equal 1/2 for Burgers");
    require(chi > 0.0, "equation.chi must be positive");
    require(chi <= chi_max(), "equation.chi exceeds varrho/2 - 1/16 (= " + fmt(chi_max()) + ")");
  } else {
    require(c2 >= 0.0 && std::isfinite(c2), "equation.c2 must be nonnegative");
    require(varrho > 1.0 / 6.0 && varrho < 0.25, "equation.varrho must lie in (1/6, 1/4)");
    require(std::abs(rho - 1.0 / 6.0) < 1e-15, "equation.rho must equal 1/6 for Allen-Cahn");
    require(alpha == 0.0, "equation.alpha must equal 0 for Allen-Cahn");
    require(chi > 0.0, "equation.chi must be positive");
    require(chi <= chi_max() * (1.0 + 1e-15), "equation.chi exceeds varrho/3 - 1/18 (= " + fmt(chi_max()) + ")");
  }
}

EquationSpec burgers_preset(double c0, double c1, double varrho) {
  EquationSpec s;
  s.kind = EquationKind::Burgers;
  s.c0 = c0;
  s.c1 = c1;
  s.c2 = 0.0;
  s.varrho = varrho;
  s.rho = 0.125;
  s.alpha = 0.5;
  s.vartheta = 1.0;
  s.varphi = 0.75;
  s.gamma = s.gamma_formula();
  s.chi = s.chi_max();
  return s;
}

EquationSpec allen_cahn_preset(double c0, double c1, double c2, double varrho) {
  EquationSpec s;
  s.kind = EquationKind::AllenCahn;
  s.c0 = c0;
  s.c1 = c1;
  s.c2 = c2;
  s.varrho = varrho;
  s.rho = 1.0 / 6.0;
  s.alpha = 0.0;
  s.vartheta = 2.0;
  s.varphi = 0.0;
  s.gamma = s.gamma_formula();
  s.chi = s.chi_max();
  return s;
}

double lipschitz_constant(const EquationSpec& spec, double k) {
  if (spec.kind == EquationKind::Burgers) return std::abs(spec.c1) / std::sqrt(spec.c0) * k * k;
  return std::abs(spec.c1) / std::pow(spec.c0 * pi * pi, 1.0 / 6.0) + 2.0 * spec.c2 * k * k * k;
}

double preset_theta(const EquationSpec& spec, double k) {
  double K = lipschitz_constant(spec, k);
  return spec.kind == EquationKind::Burgers ? 1.0 + K : K;
}

SpectralField burgers_apply_exact(const SpectralField& v, double c1, std::size_t m_out) {
  const std::size_t n = v.size();
  if (m_out == 0) m_out = 2 * n;
  auto a = v.coeffs();
  // Cosine coefficients b_k of v^2 = sum_k b_k cos(k pi x), k = 0..2n.
  std::vector<double> b(2 * n + 1, 0.0);
  for (std::size_t j = 1; j <= n; ++j) {
    for (std::size_t k = 1; k <= n; ++k) {
      double p = a[j - 1] * a[k - 1];
      b[j > k ? j - k : k - j] += p;
      b[j + k] -= p;
    }
  }
  std::vector<double> out(m_out, 0.0);
  for (std::size_t k = 1; k <= std::min(m_out, 2 * n); ++k)
    out[k - 1] = -c1 * static_cast<double>(k) * pi / sqrt2 * b[k];
  return SpectralField(std::move(out), v.c0());
}

SpectralField burgers_apply_fast(const SpectralField& v, double c1, std::size_t m_out, std::size_t grid) {
  const std::size_t n = v.size();
  if (m_out == 0) m_out = 2 * n;
  if (grid == 0) grid = 3 * n;
  if (grid < 3 * n) throw ConfigError("burgers_apply_fast: grid below the 3n dealiasing threshold");
  const std::size_t N = grid;
  std::vector<double> u = evaluate_grid(v, N - 1);
  std::vector<double> sq(N + 1, 0.0), y(N + 1);
  for (std::size_t m = 1; m < N; ++m) sq[m] = u[m - 1] * u[m - 1];
  dct1(sq, y);
  std::vector<double> out(m_out, 0.0);
  const double inv = 1.0 / static_cast<double>(N);
  for (std::size_t k = 1; k <= std::min(m_out, 2 * n); ++k)
    out[k - 1] = -c1 * static_cast<double>(k) * pi / sqrt2 * (y[k] * inv);
  return SpectralField(std::move(out), v.c0());
}

SpectralField allen_cahn_apply_exact(const SpectralField& v, double c1, double c2, std::size_t m_out) {
  const std::size_t n = v.size();
  if (m_out == 0) m_out = 3 * n;
  auto a = v.coeffs();
  std::vector<double> cube(3 * n + 1, 0.0);
  auto add = [&](long m, double x) {
    if (m > 0) cube[static_cast<std::size_t>(m)] += x;
    else if (m < 0) cube[static_cast<std::size_t>(-m)] -= x;
  };
  for (std::size_t i = 1; i <= n; ++i) {
    if (a[i - 1] == 0.0) continue;
    for (std::size_t j = 1; j <= n; ++j) {
      double aij = a[i - 1] * a[j - 1];
      if (aij == 0.0) continue;
      for (std::size_t k = 1; k <= n; ++k) {
        double x = 0.5 * aij * a[k - 1];
        long I = static_cast<long>(i), J = static_cast<long>(j), K = static_cast<long>(k);
        add(I + J - K, x);
        add(I - J + K, x);
        add(-I + J + K, x);
        add(I + J + K, -x);
      }
    }
  }
  std::vector<double> out(m_out, 0.0);
  for (std::size_t k = 1; k <= m_out; ++k) {
    double lin = k <= n ? c1 * a[k - 1] : 0.0;
    double cub = k <= 3 * n ? cube[k] : 0.0;
    out[k - 1] = lin - c2 * cub;
  }
  return SpectralField(std::move(out), v.c0());
}

SpectralField allen_cahn_apply(const SpectralField& v, double c1, double c2, std::size_t m_out,
                               std::size_t grid) {
  const std::size_t n = v.size();
  if (m_out == 0) m_out = 3 * n;
  if (grid == 0) grid = 4 * n;
  if (grid < 4 * n) throw ConfigError("allen_cahn_apply: grid below the 4n dealiasing threshold");
  const std::size_t N = grid;
  std::vector<double> u = evaluate_grid(v, N - 1);
  for (double& t : u) t = t * t * t;
  std::vector<double> y(N - 1);
  dst1(u, y);
  std::vector<double> out(m_out, 0.0);
  const double scale = 1.0 / (sqrt2 * static_cast<double>(N));
  auto a = v.coeffs();
  for (std::size_t k = 1; k <= m_out; ++k) {
    double lin = k <= n ? c1 * a[k - 1] : 0.0;
    double cub = k <= 3 * n ? y[k - 1] * scale : 0.0;
    out[k - 1] = lin - c2 * cub;
  }
  return SpectralField(std::move(out), v.c0());
}

SpectralField apply_drift(const EquationSpec& spec, const SpectralField& v, std::size_t m_out) {
  if (m_out == 0) m_out = v.size();
  if (spec.kind == EquationKind::Burgers) return burgers_apply_fast(v, spec.c1, m_out);
  return allen_cahn_apply(v, spec.c1, spec.c2, m_out);
}

SpectralField apply_drift_exact(const EquationSpec& spec, const SpectralField& v, std::size_t m_out) {
  if (m_out == 0) m_out = v.size();
  if (spec.kind == EquationKind::Burgers) return burgers_apply_exact(v, spec.c1, m_out);
  return allen_cahn_apply_exact(v, spec.c1, spec.c2, m_out);
}

double phi_functional(const SpectralField& u, double gamma, std::size_t oversample) {
  if (gamma < 0.0) throw DomainError("phi_functional: gamma must be nonnegative");
  double s = sup_norm(u, oversample);
  return gamma + gamma * s * s;
}

double Phi_functional(const SpectralField& u, double gamma, std::size_t oversample) {
  if (gamma < 0.0) throw DomainError("Phi_functional: gamma must be nonnegative");
  return gamma + gamma * std::pow(sup_norm(u, oversample), gamma);
}

CheckReport check_coercivity(const SpectralField& v, const SpectralField& w, const EquationSpec& spec) {
  const std::size_t n = std::max(v.size(), w.size());
  SpectralField vv = project(v, n), ww = project(w, n);
  // <v, F(v+w)> only sees the first n output modes.
  double lhs = inner(vv, apply_drift_exact(spec, vv + ww, n));
  const double g = spec.gamma;
  const double sw = sup_norm(ww);
  const double hv = hr_norm(vv, 0.0);
  double rhs;
  std::string name;
  if (spec.kind == EquationKind::Burgers) {
    double h12 = hr_norm(vv, 0.5);
    rhs = g * hv * hv * sw * sw + 0.75 * h12 * h12 + g * (1.0 + std::pow(sw, g));
    lhs = std::abs(lhs);
    name = "coercivity-burgers";
  } else {
    rhs = g * (hv * hv + 1.0 + std::pow(sw, g));
    name = "coercivity-allen-cahn";
  }
  CheckReport r = CheckReport::compare(name, lhs, rhs, 1e-9, 1e-9);
  r.samples = 1;
  return r;
}

CheckReport check_lipschitz(const SpectralField& v, const SpectralField& w, const EquationSpec& spec,
                            double embedding_ratio) {
  const std::size_t n = std::max(v.size(), w.size());
  SpectralField vv = project(v, n), ww = project(w, n);
  // Full output band so that the dual norm is exact.
  const std::size_t band = (spec.kind == EquationKind::Burgers ? 2 : 3) * n;
  SpectralField diff = apply_drift_exact(spec, vv, band) - apply_drift_exact(spec, ww, band);
  double lhs = hr_norm(diff, -spec.alpha);
  double K = lipschitz_constant(spec, embedding_ratio);
  double growth = 1.0 + std::pow(hr_norm(vv, spec.rho), spec.vartheta) +
                  std::pow(hr_norm(ww, spec.rho), spec.vartheta);
  double rhs = K * growth * hr_norm(vv - ww, spec.rho);
  CheckReport r = CheckReport::compare(
      spec.kind == EquationKind::Burgers ? "lipschitz-burgers" : "lipschitz-allen-cahn", lhs, rhs, 1e-9,
      1e-12);
  r.samples = 1;
  return r;
}

}  // namespace spde
