#pragma once

#include <cstddef>
#include <optional>

#include "safa/latent_map.hpp"
#include "safa/layout.hpp"
#include "safa/spectrum.hpp"

namespace safa {

// Mean squared column difference across every overlap boundary minus the
// canvas-wide mean squared column difference.
double seam_energy(const LatentMap& canvas, const SubviewLayout& layout);

// Mean over subview pairs of the normalized distance between per-subview
// features (channel means, channel variances, spectrum curve).
double cross_view_distance(const LatentMap& canvas, const SubviewLayout& layout,
                           std::size_t bins = 32);

// Mean Euclidean distance between the core columns [overlap, stride) of all
// subview pairs. squared = true averages squared distances instead.
double mean_pairwise_core_distance(const LatentMap& canvas, const SubviewLayout& layout,
                                   bool squared = false);

struct GenerationMetrics {
  std::optional<FrequencyReport> frequency;
  std::optional<double> seam_energy;
  std::optional<double> cross_view_distance;
  std::optional<double> mean_pairwise_distance;
};

GenerationMetrics compute_metrics(const LatentMap& canvas, const SubviewLayout& layout,
                                  std::size_t bins = 32);

}  // namespace safa
