#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace safa::detail {

// Unitary 2D DFT of a real height x width field (full complex spectrum).
std::vector<std::complex<double>> fft2(std::span<const double> field, std::size_t height,
                                       std::size_t width);

// Unitary inverse 2D DFT; returns the real part.
std::vector<double> ifft2_real(std::span<const std::complex<double>> spectrum,
                               std::size_t height, std::size_t width);

// Signed frequency of index k in an n-point DFT, in cycles per sample.
double fft_frequency(std::size_t k, std::size_t n);

}  // namespace safa::detail
