#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every draw is
// a pure function of (key, counter).

#include <array>
#include <cstdint>
#include <utility>

namespace spde {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

inline constexpr const char* kRngName = "philox4x32-10 v1";

// Two independent standard normals addressed by (seed, step, mode, stream).
// stream distinguishes sample paths; the top bit of the stream word is
// reserved for auxiliary streams (tags).
std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t stream,
                                        std::uint32_t mode, std::uint32_t step);

// Uniform in (0,1) from 53 bits.
double uniform53(std::uint32_t hi, std::uint32_t lo);

// Sequential convenience generator over a Philox stream, for test-field
// sampling and estimators that need many draws in a fixed order.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t seed, std::uint64_t stream);
  double uniform();
  double normal();
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  void refill();
  PhiloxKey key_;
  PhiloxCounter ctr_;
  PhiloxCounter buf_{};
  int pos_ = 4;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spde
