#pragma once

#include <span>

#include "spinterf/core.hpp"

namespace spinterf::fft {

/// In-place forward DFT, X_k = sum_n x_n exp(-2 pi i k n / N). Unnormalized.
void forward(std::span<Complex> data);

/// In-place inverse DFT including the 1/N factor.
void inverse(std::span<Complex> data);

/// Signed angular wavenumber of bin `index` for samples spaced `dx` apart.
double angular_wavenumber(std::size_t index, std::size_t n, double dx);

}  // namespace spinterf::fft
