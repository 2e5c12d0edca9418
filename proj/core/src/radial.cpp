#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "safa/errors.hpp"
#include "safa/spectrum.hpp"

namespace safa {

std::vector<double> radial_frequency(std::size_t height, std::size_t width) {
  std::vector<double> r(height * width);
  for (std::size_t y = 0; y < height; ++y) {
    const double fy = detail::fft_frequency(y, height);
    for (std::size_t x = 0; x < width; ++x) {
      const double fx = detail::fft_frequency(x, width);
      r[y * width + x] = std::sqrt(fy * fy + fx * fx);
    }
  }
  return r;
}

std::vector<std::size_t> radial_bins(std::size_t height, std::size_t width, std::size_t bins) {
  if (bins == 0) throw DomainError("radial_bins: bins must be positive");
  const double r_max = std::sqrt(0.5);
  const auto r = radial_frequency(height, width);
  std::vector<std::size_t> idx(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const auto b = static_cast<std::size_t>(std::floor(r[i] / r_max * static_cast<double>(bins)));
    idx[i] = std::min(bins - 1, b);
  }
  return idx;
}

}  // namespace safa
