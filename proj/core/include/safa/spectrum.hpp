#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "safa/latent_map.hpp"
#include "safa/layout.hpp"

namespace safa {

inline constexpr double kLogFloor = 1e-12;

struct SpectrumCurve {
  std::vector<double> values;

  std::size_t bins() const { return values.size(); }
};

// Normalized radius sqrt(fy^2 + fx^2) of each FFT site, fy/fx in cycles/sample.
std::vector<double> radial_frequency(std::size_t height, std::size_t width);
// Annulus index of each FFT site over [0, sqrt(1/2)].
std::vector<std::size_t> radial_bins(std::size_t height, std::size_t width, std::size_t bins);

// Per channel: remove the mean, unitary 2D FFT, mean magnitude per annulus
// (the DC site excluded; empty annuli interpolated), divide by annulus 0,
// log10 with floor. Averaged over channels. Throws DegenerateInput when a
// channel has no energy in annulus 0.
SpectrumCurve relative_log_amplitude(const LatentMap& map,
                                     std::optional<RegionRange> region = std::nullopt,
                                     std::size_t bins = 32);

// Mean over the top quartile of bins of (reference - overlap).
double hf_suppression_index(const SpectrumCurve& overlap, const SpectrumCurve& reference);

SpectrumCurve mean_curve(const std::vector<SpectrumCurve>& curves);

struct FrequencyReport {
  SpectrumCurve overlap;    // mean over all overlap regions
  SpectrumCurve reference;  // mean over overlap-width windows of subview cores
  double hf_suppression_index = 0.0;
};

// Requires count >= 2 and overlap width >= 8; DomainError otherwise.
FrequencyReport frequency_report(const LatentMap& canvas, const SubviewLayout& layout,
                                 std::size_t bins);

bool frequency_report_applicable(const SubviewLayout& layout);

}  // namespace safa
