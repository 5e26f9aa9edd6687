#include "spde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spde {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

std::pair<double, double> box_muller(const PhiloxCounter& r) {
  double u1 = uniform53(r[0], r[1]);
  double u2 = uniform53(r[2], r[3]);
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * std::numbers::pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kW0;
    k[1] += kW1;
  }
  return c;
}

double uniform53(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
  // The top code rounds to 1.0 otherwise.
  return std::min((static_cast<double>(bits) + 0.5) * 0x1.0p-53, 0x1.fffffffffffffp-1);
}

std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t stream,
                                        std::uint32_t mode, std::uint32_t step) {
  PhiloxCounter ctr{step, mode, static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  PhiloxKey key{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return box_muller(philox4x32_10(ctr, key));
}

PhiloxStream::PhiloxStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      ctr_{0u, 0xFFFFFFFFu, static_cast<std::uint32_t>(stream),
           static_cast<std::uint32_t>(stream >> 32)} {}

void PhiloxStream::refill() {
  buf_ = philox4x32_10(ctr_, key_);
  if (++ctr_[0] == 0) --ctr_[1];
  pos_ = 0;
}

double PhiloxStream::uniform() {
  if (pos_ > 2) refill();
  double u = uniform53(buf_[pos_], buf_[pos_ + 1]);
  pos_ += 2;
  return u;
}

double PhiloxStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform(), u2 = uniform();
  double rad = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * std::numbers::pi * u2;
  spare_ = rad * std::sin(ang);
  have_spare_ = true;
  return rad * std::cos(ang);
}

}  // namespace spde
