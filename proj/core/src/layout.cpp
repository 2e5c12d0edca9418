#include "safa/layout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "safa/errors.hpp"

namespace safa {

std::size_t round_half_up(double x) {
  return static_cast<std::size_t>(std::floor(x + 0.5));
}

std::size_t SubviewLayout::pair_count() const {
  if (count < 2) return 0;
  return circular ? count : count - 1;
}

std::size_t SubviewLayout::max_coverage() const {
  std::vector<std::size_t> cover(total_width, 0);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < subview_width; ++j) ++cover[column(i, j)];
  }
  return *std::max_element(cover.begin(), cover.end());
}

SubviewLayout build_layout(std::size_t total_width, std::size_t subview_width,
                           double overlap_rate, bool circular) {
  if (subview_width == 0 || total_width == 0) {
    throw GeometryError("widths must be positive");
  }
  if (subview_width > total_width) {
    throw GeometryError("subview width " + std::to_string(subview_width) +
                        " exceeds canvas width " + std::to_string(total_width));
  }
  if (!(overlap_rate >= 0.0 && overlap_rate < 1.0)) {
    throw GeometryError("overlap rate must lie in [0, 1)");
  }
  const std::size_t stride =
      round_half_up(static_cast<double>(subview_width) * (1.0 - overlap_rate));
  if (stride == 0) throw GeometryError("overlap rate leaves a zero stride");

  SubviewLayout l;
  l.total_width = total_width;
  l.subview_width = subview_width;
  l.stride = stride;
  l.overlap_rate = overlap_rate;
  l.circular = circular;
  if (circular) {
    if (total_width % stride != 0) {
      throw GeometryError("circular layout: canvas width " + std::to_string(total_width) +
                          " is not a multiple of stride " + std::to_string(stride));
    }
    l.count = total_width / stride;
  } else {
    if ((total_width - subview_width) % stride != 0) {
      throw GeometryError("canvas width " + std::to_string(total_width) + " minus subview width " +
                          std::to_string(subview_width) + " is not a multiple of stride " +
                          std::to_string(stride));
    }
    l.count = (total_width - subview_width) / stride + 1;
  }
  return l;
}

LatentMap extract_subview(const LatentMap& canvas, const SubviewLayout& layout, std::size_t i) {
  if (i >= layout.count) throw IndexError("subview index " + std::to_string(i) + " out of range");
  if (canvas.width() != layout.total_width) throw ShapeError("canvas width does not match layout");
  LatentMap out(canvas.channels(), canvas.height(), layout.subview_width);
  const std::size_t first = layout.start(i);
  if (first + layout.subview_width <= layout.total_width) {
    copy_columns(canvas, first, out, 0, layout.subview_width);
  } else {
    const std::size_t head = layout.total_width - first;
    copy_columns(canvas, first, out, 0, head);
    copy_columns(canvas, 0, out, head, layout.subview_width - head);
  }
  return out;
}

void write_subview(LatentMap& canvas, const SubviewLayout& layout, std::size_t i,
                   const LatentMap& x, const RegionRange& region) {
  if (i >= layout.count) throw IndexError("subview index " + std::to_string(i) + " out of range");
  if (x.channels() != canvas.channels() || x.height() != canvas.height()) {
    throw ShapeError("write_subview: channel/height mismatch");
  }
  if (x.width() != layout.subview_width || canvas.width() != layout.total_width) {
    throw ShapeError("write_subview: width does not match layout");
  }
  if (region.start > region.end || region.end > layout.subview_width) {
    throw IndexError("write_subview: region outside subview");
  }
  for (std::size_t j = region.start; j < region.end; ++j) {
    copy_columns(x, j, canvas, layout.column(i, j), 1);
  }
}

SubviewRegions region_ranges(const SubviewLayout& layout, std::size_t i) {
  if (i >= layout.count) throw IndexError("subview index " + std::to_string(i) + " out of range");
  const std::size_t w = layout.subview_width;
  const std::size_t o = layout.overlap();
  // Multi-way layouts split at most half of the view into each overlap band.
  const std::size_t a = o <= layout.stride ? o : std::min(o, w / 2);
  const bool has_left = layout.count > 1 && (layout.circular || i > 0);
  const bool has_right = layout.count > 1 && (layout.circular || i + 1 < layout.count);
  SubviewRegions r;
  r.left = {0, has_left ? a : 0, RegionKind::LeftOverlap};
  r.right = {has_right ? w - a : w, w, RegionKind::RightOverlap};
  r.mid = {r.left.end, r.right.start, RegionKind::Mid};
  return r;
}

}  // namespace safa
