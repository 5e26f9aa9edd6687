#pragma once

#include <cstddef>
#include <string>

#include "spde/check_report.hpp"
#include "spde/spectral.hpp"

namespace spde {

enum class EquationKind { Burgers, AllenCahn };

std::string to_string(EquationKind k);
EquationKind equation_kind_from_string(const std::string& s);

struct EquationSpec {
  EquationKind kind = EquationKind::Burgers;
  double c0 = 1.0;
  double c1 = -0.5;
  double c2 = 0.0;       // Allen-Cahn cubic coefficient
  double gamma = 4.0;    // coercivity constant
  double rho = 0.125;    // Lipschitz space exponent
  double varrho = 0.1875;
  double chi = 1.0 / 64.0;
  double alpha = 0.5;    // drift maps into H_{-alpha}
  double vartheta = 1.0; // growth exponent of the Lipschitz bound
  double varphi = 0.75;  // weight of ||v||^2_{H_1/2} in the coercivity bound
  // Lipschitz prefactor; depends on an embedding constant, see lipschitz_constant.
  double theta = 0.0;

  // Coercivity constant implied by (kind, c0, c1, c2).
  double gamma_formula() const;
  // Right endpoint of the admissible chi interval.
  double chi_max() const;
  // Throws ConfigError naming the violated constraint.
  void validate() const;
};

// Presets: Burgers c1 = -1/2, Allen-Cahn c1 = c2 = 1. chi defaults to the
// interval's right endpoint.
EquationSpec burgers_preset(double c0 = 1.0, double c1 = -0.5, double varrho = 3.0 / 16.0);
EquationSpec allen_cahn_preset(double c0 = 1.0, double c1 = 1.0, double c2 = 1.0,
                               double varrho = 5.0 / 24.0);

// K assembled from the embedding ratio sup ||u||_{L^q} / ||u||_{H_rho}
// (q = 4 for Burgers, q = 6 for Allen-Cahn).
double lipschitz_constant(const EquationSpec& spec, double embedding_ratio);
// Value stored in EquationSpec::theta by the presets: 1 + K for Burgers, K for Allen-Cahn.
double preset_theta(const EquationSpec& spec, double embedding_ratio);

// Exact O(n^2) trigonometric convolution. m_out = 0 means the full band 2n.
SpectralField burgers_apply_exact(const SpectralField& v, double c1, std::size_t m_out = 0);
// Pseudo-spectral product on a grid with `grid` intervals (default 3n).
SpectralField burgers_apply_fast(const SpectralField& v, double c1, std::size_t m_out = 0,
                                 std::size_t grid = 0);

// c1 v - c2 v^3. Exact O(n^3) oracle; m_out = 0 means the full band 3n.
SpectralField allen_cahn_apply_exact(const SpectralField& v, double c1, double c2,
                                     std::size_t m_out = 0);
// Pseudo-spectral cube on a grid with `grid` intervals (default 4n).
SpectralField allen_cahn_apply(const SpectralField& v, double c1, double c2, std::size_t m_out = 0,
                               std::size_t grid = 0);

// P_{m_out} F(v) via the production (fast) path; m_out = 0 means v.size().
SpectralField apply_drift(const EquationSpec& spec, const SpectralField& v, std::size_t m_out = 0);
SpectralField apply_drift_exact(const EquationSpec& spec, const SpectralField& v, std::size_t m_out = 0);

double phi_functional(const SpectralField& u, double gamma, std::size_t oversample = 32);
double Phi_functional(const SpectralField& u, double gamma, std::size_t oversample = 32);

// <v, F(v+w)> against the coercivity bound of the equation; Burgers bounds |<v, F(v+w)>|.
CheckReport check_coercivity(const SpectralField& v, const SpectralField& w, const EquationSpec& spec);

// ||F(v) - F(w)||_{H_-alpha} <= K (1 + ||v||^vartheta_{H_rho} + ||w||^vartheta_{H_rho}) ||v - w||_{H_rho}
// with K = lipschitz_constant(spec, embedding_ratio).
CheckReport check_lipschitz(const SpectralField& v, const SpectralField& w, const EquationSpec& spec,
                            double embedding_ratio);

}  // namespace spde
