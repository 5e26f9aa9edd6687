#pragma once

// Functions on (0,1) represented in the Dirichlet sine eigenbasis
// e_j(x) = sqrt(2) sin(j pi x) of A = c0 * d^2/dx^2, with eigenvalues
// -lambda_j, lambda_j = c0 pi^2 j^2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spde {

class SpectralField {
 public:
  SpectralField(std::vector<double> coeffs, double c0 = 1.0);

  static SpectralField zeros(std::size_t n, double c0 = 1.0);
  // amplitude * e_j embedded in an n-mode field.
  static SpectralField mode(std::size_t j, std::size_t n, double c0 = 1.0, double amplitude = 1.0);

  std::size_t size() const noexcept { return coeffs_.size(); }
  double c0() const noexcept { return c0_; }

  // Coefficient of e_j, 1-based.
  double coeff(std::size_t j) const { return coeffs_.at(j - 1); }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::span<double> mutable_coeffs() noexcept { return coeffs_; }

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double s);

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(double s, SpectralField a) { return a *= s; }

  bool operator==(const SpectralField&) const = default;

 private:
  std::vector<double> coeffs_;
  double c0_;
};

// Canonical little-endian binary encoding: u64 n, f64 c0, n x f64.
std::vector<std::uint8_t> to_bytes(const SpectralField& v);
SpectralField field_from_bytes(std::span<const std::uint8_t> bytes);

struct GridSpec {
  double T;
  std::size_t M;

  GridSpec(double T, std::size_t M);
  double h() const noexcept { return T / static_cast<double>(M); }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * h(); }
  // max of {0, +-h, +-2h, ...} that does not exceed t.
  double floor(double t) const;
};

double eigenvalue(std::size_t j, double c0);

// (sum_j (lambda_j + shift)^{2r} a_j^2)^{1/2}
double hr_norm(const SpectralField& v, double r, double shift = 0.0);

// Coefficientwise multiplication by exp(-(lambda_j + shift) t).
SpectralField semigroup_apply(const SpectralField& v, double t, double shift = 0.0);

// (1 - exp(-(lambda_j + shift) h)) / (lambda_j + shift)
double phi1_weight(std::size_t j, double h, double shift, double c0);

SpectralField project(const SpectralField& v, std::size_t n);

double inner(const SpectralField& a, const SpectralField& b);

// Pointwise values by direct summation; every x must lie in (0,1).
std::vector<double> evaluate(const SpectralField& v, std::span<const double> xs);

// Values on the collocation grid x_m = m/(G+1), m = 1..G, via a DST-I.
// Requires G >= v.size().
std::vector<double> evaluate_grid(const SpectralField& v, std::size_t G);

// Derivative v'(x) by direct summation.
double derivative_at(const SpectralField& v, double x);

// Sine-basis coefficients of v' truncated to `modes` terms. v' is a cosine
// series; its re-expansion converges in H_{-1/2}.
SpectralField derivative_sine_expansion(const SpectralField& v, std::size_t modes);

// Oversampled grid maximum of |v| followed by Newton polishing of the
// candidate extrema. Requires oversample >= 4.
double sup_norm(const SpectralField& v, std::size_t oversample = 32);

// Sobolev-Slobodeckij W^{theta,p}(0,1) norm by graded Gauss-Legendre panels.
// Throws AccuracyError when refining quad_points -> 2 quad_points changes the
// value by more than 1e-6 relative.
double sobolev_norm(const SpectralField& v, double theta, double p, std::size_t quad_points = 16);
// Same quadrature with a single rule and no convergence check.
double sobolev_norm_fixed(const SpectralField& v, double theta, double p, std::size_t quad_points);

// L^q(0,1) norm, exact for even integer q when the grid resolves v^q.
double lebesgue_norm(const SpectralField& v, double q);

double dual_half_norm(const SpectralField& u, double shift = 0.0);

}  // namespace spde
