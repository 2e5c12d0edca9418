#pragma once

#include <cstddef>

#include "safa/latent_map.hpp"

namespace safa {

enum class RegionKind { LeftOverlap, Mid, RightOverlap };

// Half-open column range [start, end).
struct RegionRange {
  std::size_t start = 0;
  std::size_t end = 0;
  RegionKind kind = RegionKind::Mid;

  std::size_t width() const { return end - start; }
  bool empty() const { return end == start; }
  bool operator==(const RegionRange&) const = default;
};

struct SubviewRegions {
  RegionRange left;
  RegionRange mid;
  RegionRange right;
};

struct SubviewLayout {
  std::size_t total_width = 0;
  std::size_t subview_width = 0;
  std::size_t stride = 0;
  std::size_t count = 0;
  double overlap_rate = 0.0;
  bool circular = false;

  std::size_t overlap() const { return subview_width - stride; }
  std::size_t start(std::size_t i) const { return i * stride; }
  // Canvas column of local column j of subview i.
  std::size_t column(std::size_t i, std::size_t j) const {
    return (i * stride + j) % total_width;
  }
  // Adjacent pairs (i, i+1); circular layouts add (count-1, 0).
  std::size_t pair_count() const;
  std::size_t pair_right(std::size_t pair) const { return (pair + 1) % count; }
  // Largest number of subviews covering any single canvas column.
  std::size_t max_coverage() const;
};

// Rounds half up; ties at .5 go to the larger integer.
std::size_t round_half_up(double x);

SubviewLayout build_layout(std::size_t total_width, std::size_t subview_width,
                           double overlap_rate, bool circular = false);

LatentMap extract_subview(const LatentMap& canvas, const SubviewLayout& layout, std::size_t i);

// Copies region columns of x (local indices) into the matching canvas columns.
void write_subview(LatentMap& canvas, const SubviewLayout& layout, std::size_t i,
                   const LatentMap& x, const RegionRange& region);

// Left/Mid/Right partition of [0, subview_width) for subview i.
SubviewRegions region_ranges(const SubviewLayout& layout, std::size_t i);

}  // namespace safa
