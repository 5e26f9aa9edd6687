#include "spde/spectral.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <numbers>

#include "spde/errors.hpp"
#include "spde/quadrature.hpp"
#include "spde/transform.hpp"

namespace spde {

using std::numbers::pi;
using std::numbers::sqrt2;

SpectralField::SpectralField(std::vector<double> coeffs, double c0)
    : coeffs_(std::move(coeffs)), c0_(c0) {
  if (coeffs_.empty()) throw DomainError("SpectralField needs at least one mode");
  if (!(c0_ > 0.0) || !std::isfinite(c0_)) throw DomainError("c0 must be positive");
  for (double a : coeffs_)
    if (!std::isfinite(a)) throw DomainError("SpectralField coefficient is not finite");
}

SpectralField SpectralField::zeros(std::size_t n, double c0) {
  return SpectralField(std::vector<double>(n, 0.0), c0);
}

SpectralField SpectralField::mode(std::size_t j, std::size_t n, double c0, double amplitude) {
  if (j == 0 || j > n) throw DomainError("mode index out of range");
  std::vector<double> a(n, 0.0);
  a[j - 1] = amplitude;
  return SpectralField(std::move(a), c0);
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.size() != size()) throw DomainError("field size mismatch");
  for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  if (other.size() != size()) throw DomainError("field size mismatch");
  for (std::size_t i = 0; i < size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (double& a : coeffs_) a *= s;
  return *this;
}

std::vector<std::uint8_t> to_bytes(const SpectralField& v) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  std::vector<std::uint8_t> out(8 + 8 + 8 * v.size());
  std::uint64_t n = v.size();
  double c0 = v.c0();
  std::memcpy(out.data(), &n, 8);
  std::memcpy(out.data() + 8, &c0, 8);
  std::memcpy(out.data() + 16, v.coeffs().data(), 8 * v.size());
  return out;
}

SpectralField field_from_bytes(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw DomainError("field bytes truncated");
  std::uint64_t n;
  double c0;
  std::memcpy(&n, bytes.data(), 8);
  std::memcpy(&c0, bytes.data() + 8, 8);
  if (bytes.size() != 16 + 8 * n) throw DomainError("field bytes have wrong length");
  std::vector<double> a(n);
  std::memcpy(a.data(), bytes.data() + 16, 8 * n);
  return SpectralField(std::move(a), c0);
}

GridSpec::GridSpec(double T_, std::size_t M_) : T(T_), M(M_) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("T must be positive");
  if (M == 0) throw DomainError("M must be positive");
}

double GridSpec::floor(double t) const {
  double hh = h();
  double k = std::floor(t / hh);
  // Guard against t/h rounding up past an exact grid point.
  if (k * hh > t) k -= 1.0;
  if ((k + 1.0) * hh <= t) k += 1.0;
  return k * hh;
}

double eigenvalue(std::size_t j, double c0) {
  if (j == 0) throw DomainError("eigenvalue index must be >= 1");
  if (!(c0 > 0.0)) throw DomainError("c0 must be positive");
  double jj = static_cast<double>(j);
  return c0 * pi * pi * jj * jj;
}

double hr_norm(const SpectralField& v, double r, double shift) {
  double s = 0.0;
  auto a = v.coeffs();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    double w = std::pow(eigenvalue(i + 1, v.c0()) + shift, 2.0 * r);
    s += w * a[i] * a[i];
  }
  return std::sqrt(s);
}

SpectralField semigroup_apply(const SpectralField& v, double t, double shift) {
  if (t < 0.0) throw DomainError("semigroup_apply: t must be nonnegative");
  SpectralField out = v;
  auto a = out.mutable_coeffs();
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] *= std::exp(-(eigenvalue(i + 1, v.c0()) + shift) * t);
  return out;
}

double phi1_weight(std::size_t j, double h, double shift, double c0) {
  if (!(h > 0.0)) throw DomainError("phi1_weight: h must be positive");
  double mu = eigenvalue(j, c0) + shift;
  return -std::expm1(-mu * h) / mu;
}

SpectralField project(const SpectralField& v, std::size_t n) {
  if (n == 0) throw DomainError("project: n must be positive");
  std::vector<double> a(n, 0.0);
  std::copy_n(v.coeffs().begin(), std::min(n, v.size()), a.begin());
  return SpectralField(std::move(a), v.c0());
}

double inner(const SpectralField& a, const SpectralField& b) {
  std::size_t m = std::min(a.size(), b.size());
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) s += a.coeffs()[i] * b.coeffs()[i];
  return s;
}

namespace {

// sum_j a_j sqrt2 sin(j pi x) and its first two derivatives, using the
// Chebyshev recurrence for sin/cos of multiples.
struct Eval3 {
  double v, d1, d2;
};

Eval3 eval3(std::span<const double> a, double x) {
  const double th = pi * x;
  const double s1 = std::sin(th), c1 = std::cos(th);
  double sp = 0.0, s = s1;  // sin((j-1)th), sin(j th)
  double cp = 1.0, c = c1;
  Eval3 r{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    double jp = static_cast<double>(i + 1) * pi;
    r.v += a[i] * s;
    r.d1 += a[i] * jp * c;
    r.d2 -= a[i] * jp * jp * s;
    double sn = 2.0 * c1 * s - sp;
    double cn = 2.0 * c1 * c - cp;
    sp = s;
    s = sn;
    cp = c;
    c = cn;
  }
  r.v *= sqrt2;
  r.d1 *= sqrt2;
  r.d2 *= sqrt2;
  return r;
}

double eval_direct(std::span<const double> a, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * std::sin(static_cast<double>(i + 1) * pi * x);
  return sqrt2 * s;
}

}  // namespace

std::vector<double> evaluate(const SpectralField& v, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError("evaluate: x must lie in (0,1)");
    out.push_back(eval_direct(v.coeffs(), x));
  }
  return out;
}

std::vector<double> evaluate_grid(const SpectralField& v, std::size_t G) {
  if (G < v.size()) throw ConfigError("evaluate_grid: grid smaller than mode count");
  std::vector<double> in(G, 0.0), out(G);
  std::copy(v.coeffs().begin(), v.coeffs().end(), in.begin());
  dst1(in, out);
  for (double& y : out) y /= sqrt2;
  return out;
}

double derivative_at(const SpectralField& v, double x) { return eval3(v.coeffs(), x).d1; }

SpectralField derivative_sine_expansion(const SpectralField& v, std::size_t modes) {
  if (modes == 0) throw DomainError("derivative_sine_expansion: modes must be positive");
  std::vector<double> d(modes, 0.0);
  auto a = v.coeffs();
  for (std::size_t k = 1; k <= modes; ++k) {
    double s = 0.0;
    double kk = static_cast<double>(k);
    for (std::size_t j = 1; j <= a.size(); ++j) {
      if ((j + k) % 2 == 0) continue;
      double jj = static_cast<double>(j);
      s += 4.0 * jj * kk * a[j - 1] / (kk * kk - jj * jj);
    }
    d[k - 1] = s;
  }
  return SpectralField(std::move(d), v.c0());
}

double sup_norm(const SpectralField& v, std::size_t oversample) {
  if (oversample < 4) throw DomainError("sup_norm: oversample must be >= 4");
  const std::size_t G = oversample * v.size();
  std::vector<double> y = evaluate_grid(v, G);
  double gmax = 0.0;
  for (double t : y) gmax = std::max(gmax, std::abs(t));
  if (gmax == 0.0) return 0.0;
  const double dx = 1.0 / static_cast<double>(G + 1);
  double best = gmax;
  auto at = [&](std::size_t m) { return m == 0 || m == G + 1 ? 0.0 : std::abs(y[m - 1]); };
  for (std::size_t m = 1; m <= G; ++m) {
    double f = at(m);
    if (f < 0.98 * gmax || f < at(m - 1) || f < at(m + 1)) continue;
    double x = static_cast<double>(m) * dx;
    const double lo = x - dx, hi = x + dx;
    for (int it = 0; it < 8; ++it) {
      Eval3 e = eval3(v.coeffs(), x);
      if (e.d2 == 0.0) break;
      double xn = x - e.d1 / e.d2;
      if (!(xn > lo && xn < hi)) break;
      bool done = std::abs(xn - x) < 1e-15;
      x = xn;
      if (done) break;
    }
    best = std::max(best, std::abs(eval3(v.coeffs(), x).v));
  }
  return best;
}

namespace {

double sobolev_pow(const SpectralField& v, double theta, double p, std::size_t q) {
  auto a = v.coeffs();
  const std::size_t n = v.size();
  const double sexp = 1.0 + theta * p;
  // |v|^p over (0,1), panels sized to the shortest wavelength.
  const std::size_t panels = std::max<std::size_t>(4, 2 * n);
  double lp = 0.0;
  for (std::size_t k = 0; k < panels; ++k) {
    double x0 = static_cast<double>(k) / panels, x1 = static_cast<double>(k + 1) / panels;
    lp += integrate_gl([&](double x) { return std::pow(std::abs(eval_direct(a, x)), p); }, x0, x1, q);
  }
  // Inner integral over y in (0, 1-u) of |v(y+u) - v(y)|^p.
  auto inner_u = [&](double u) {
    double len = 1.0 - u;
    std::size_t np = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(len * panels)));
    double s = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      double y0 = len * k / np, y1 = len * (k + 1) / np;
      s += integrate_gl(
          [&](double y) { return std::pow(std::abs(eval_direct(a, y + u) - eval_direct(a, y)), p); },
          y0, y1, q);
    }
    return s / std::pow(u, sexp);
  };
  // Graded u-panels [2^-(l+1), 2^-l]; near u = 0 the integrand is O(u^{p(1-theta)-1}).
  const double decay = p * (1.0 - theta);
  const int levels = std::min(1000, static_cast<int>(std::ceil(48.0 / decay)) + 2);
  double dbl = 0.0;
  // Split [1/2, 1] more finely since the integrand oscillates at the mode scale.
  const std::size_t top = std::max<std::size_t>(2, n);
  for (std::size_t k = 0; k < top; ++k) {
    double u0 = 0.5 + 0.5 * k / top, u1 = 0.5 + 0.5 * (k + 1) / top;
    dbl += integrate_gl(inner_u, u0, u1, q);
  }
  for (int l = 1; l < levels; ++l) {
    double u1 = std::ldexp(1.0, -l), u0 = 0.5 * u1;
    std::size_t sub = u1 * n > 1.0 ? static_cast<std::size_t>(std::ceil(u1 * n)) : 1;
    for (std::size_t k = 0; k < sub; ++k) {
      double a0 = u0 + (u1 - u0) * k / sub, a1 = u0 + (u1 - u0) * (k + 1) / sub;
      dbl += integrate_gl(inner_u, a0, a1, q);
    }
  }
  return lp + 2.0 * dbl;
}

}  // namespace

double sobolev_norm(const SpectralField& v, double theta, double p, std::size_t quad_points) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("sobolev_norm: theta must lie in (0,1)");
  if (!(p >= 1.0)) throw DomainError("sobolev_norm: p must be >= 1");
  if (quad_points == 0) throw DomainError("sobolev_norm: quad_points must be positive");
  bool all_zero = std::all_of(v.coeffs().begin(), v.coeffs().end(), [](double a) { return a == 0.0; });
  if (all_zero) return 0.0;
  double coarse = std::pow(sobolev_pow(v, theta, p, quad_points), 1.0 / p);
  double fine = std::pow(sobolev_pow(v, theta, p, 2 * quad_points), 1.0 / p);
  if (std::abs(fine - coarse) > 1e-6 * std::abs(fine))
    throw AccuracyError("sobolev_norm: quadrature did not converge; increase quad_points");
  return fine;
}

double sobolev_norm_fixed(const SpectralField& v, double theta, double p, std::size_t quad_points) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("sobolev_norm: theta must lie in (0,1)");
  if (!(p >= 1.0)) throw DomainError("sobolev_norm: p must be >= 1");
  return std::pow(sobolev_pow(v, theta, p, quad_points), 1.0 / p);
}

double lebesgue_norm(const SpectralField& v, double q) {
  if (!(q >= 1.0)) throw DomainError("lebesgue_norm: q must be >= 1");
  const bool even = q == std::floor(q) && static_cast<long>(q) % 2 == 0;
  const std::size_t N = even ? static_cast<std::size_t>(q) * v.size() + 2 : 64 * v.size() + 64;
  std::vector<double> y = evaluate_grid(v, N - 1);
  // Trapezoid with zero endpoints.
  double s = 0.0;
  for (double t : y) s += std::pow(std::abs(t), q);
  return std::pow(s / static_cast<double>(N), 1.0 / q);
}

double dual_half_norm(const SpectralField& u, double shift) { return hr_norm(u, -0.5, shift); }

}  // namespace spde
