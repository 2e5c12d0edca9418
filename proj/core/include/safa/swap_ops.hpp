#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "safa/latent_map.hpp"

namespace safa {

enum class Orientation { ColumnAlternating, RowAlternating };

// Binary m x n mask broadcast over channels.
class SwapMask {
 public:
  SwapMask(std::size_t rows, std::size_t cols, std::size_t interval, Orientation orientation,
           std::vector<std::uint8_t> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t interval() const { return interval_; }
  Orientation orientation() const { return orientation_; }
  std::uint8_t operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
  const std::vector<std::uint8_t>& values() const { return values_; }
  std::size_t ones() const;

  SwapMask complement() const;

  static SwapMask filled(std::size_t rows, std::size_t cols, std::uint8_t value);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t interval_;
  Orientation orientation_;
  std::vector<std::uint8_t> values_;
};

// v(i) = (1 - (-1)^floor((i-1)/w)) / 2 over the 1-based alternation index.
SwapMask make_swap_mask(std::size_t m, std::size_t n, std::size_t w, Orientation orientation);

enum class BlendScheme { Uniform, Triangular };

struct BlendWeights {
  std::size_t width = 0;
  std::vector<double> left_weights;
  BlendScheme scheme = BlendScheme::Uniform;
};

// Uniform: 1/2. Triangular: 1 - (j + 1) / (width + 1), so the left view fades out.
BlendWeights make_blend_weights(std::size_t width, BlendScheme scheme);

// mask = 1 takes the left contributor (the right overlap of subview i).
LatentMap swap_merge(const LatentMap& left, const LatentMap& right, const SwapMask& mask);

LatentMap weighted_merge(const LatentMap& left, const LatentMap& right,
                         const BlendWeights& weights);

// mask = 1 takes the reference.
LatentMap reference_guided_merge(const LatentMap& reference_mid, const LatentMap& subview_mid,
                                 const SwapMask& mask);

}  // namespace safa
