#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "spde/scheme.hpp"

namespace spde {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

// SHA-256 over the canonical bytes of X_0..X_M followed by the indicator bytes.
std::string trajectory_digest(const Trajectory& traj);

}  // namespace spde
