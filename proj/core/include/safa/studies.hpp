#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "safa/joint_scheduler.hpp"
#include "safa/spectrum.hpp"

namespace safa {

struct RGuideRow {
  double r_guide = 0.0;
  double mean_pairwise_distance = 0.0;  // over subview cores
  double diversity = 0.0;               // cross_view_distance
};

// One SaFa run per (r_guide, seed); rows average over seeds.
std::vector<RGuideRow> sweep_r_guide(const RunConfig& base, std::span<const double> grid,
                                     std::span<const std::uint64_t> seeds);

struct IntervalRow {
  std::size_t swap_interval = 1;
  double seam_energy = 0.0;
};

std::vector<IntervalRow> sweep_swap_interval(const RunConfig& base,
                                             std::span<const std::size_t> grid,
                                             std::span<const std::uint64_t> seeds);

struct FrequencyPair {
  std::uint64_t seed = 0;
  FrequencyReport md;
  FrequencyReport safa;
};

// Same seed under MD and SaFa.
FrequencyPair paired_frequency_run(const RunConfig& base, std::uint64_t seed);

struct GuidedSimilarityRow {
  double r_guide = 0.0;
  double empirical_sq_distance = 0.0;
  double bound = 0.0;
};

// Joint runs with the Euler-Maruyama sampler. The bound column chains the
// per-step Proposition (unguided) or Corollary (guided) bounds over the core
// columns, starting from the mean initial squared pairwise distance.
std::vector<GuidedSimilarityRow> guided_similarity_experiment(
    const RunConfig& base, std::span<const double> grid, std::span<const std::uint64_t> seeds,
    double delta = 0.1);

}  // namespace safa
