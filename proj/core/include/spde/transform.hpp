#pragma once

// Unnormalized real-to-real trigonometric transforms (FFTW conventions).
// Plans are created once per size and shared; calls are thread safe.

#include <span>

namespace spde {

// Y_k = 2 sum_{j=0}^{N-1} X_j sin(pi (j+1)(k+1) / (N+1))
void dst1(std::span<const double> in, std::span<double> out);

// Y_k = X_0 + (-1)^k X_{N-1} + 2 sum_{j=1}^{N-2} X_j cos(pi j k / (N-1)), N >= 2
void dct1(std::span<const double> in, std::span<double> out);

}  // namespace spde
