#pragma once

#include <cstddef>
#include <vector>

namespace spde {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// Cached Gauss-Legendre rule with q points.
const GaussRule& gauss_legendre(std::size_t q);

template <class F>
double integrate_gl(F&& f, double a, double b, std::size_t q) {
  const GaussRule& r = gauss_legendre(q);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

}  // namespace spde
