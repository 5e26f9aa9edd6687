#include "spde/quadrature.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <map>
#include <memory>
#include <mutex>

#include "spde/errors.hpp"

namespace spde {
namespace {

GaussRule build(std::size_t q) {
  const int l = static_cast<int>(q);
  // Nonnegative zeros in ascending order.
  std::vector<double> pos = boost::math::legendre_p_zeros<double>(l);
  GaussRule r;
  auto weight = [l](double x) {
    double d = boost::math::legendre_p_prime(l, x);
    return 2.0 / ((1.0 - x * x) * d * d);
  };
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
    if (*it == 0.0) continue;
    r.nodes.push_back(-*it);
    r.weights.push_back(weight(*it));
  }
  for (double x : pos) {
    r.nodes.push_back(x);
    r.weights.push_back(weight(x));
  }
  if (r.nodes.size() != q) throw InternalError("gauss_legendre: wrong node count");
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t q) {
  if (q == 0) throw DomainError("gauss_legendre: q must be positive");
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[q];
  if (!slot) slot = std::make_unique<GaussRule>(build(q));
  return *slot;
}

}  // namespace spde
