#include "safa/swap_ops.hpp"

#include <algorithm>
#include <numeric>

#include "safa/errors.hpp"

namespace safa {

SwapMask::SwapMask(std::size_t rows, std::size_t cols, std::size_t interval,
                   Orientation orientation, std::vector<std::uint8_t> values)
    : rows_(rows), cols_(cols), interval_(interval), orientation_(orientation),
      values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) throw ShapeError("SwapMask: value count mismatch");
}

std::size_t SwapMask::ones() const {
  return static_cast<std::size_t>(std::count(values_.begin(), values_.end(), std::uint8_t{1}));
}

SwapMask SwapMask::complement() const {
  std::vector<std::uint8_t> v(values_.size());
  std::transform(values_.begin(), values_.end(), v.begin(),
                 [](std::uint8_t x) { return static_cast<std::uint8_t>(1 - x); });
  return SwapMask(rows_, cols_, interval_, orientation_, std::move(v));
}

SwapMask SwapMask::filled(std::size_t rows, std::size_t cols, std::uint8_t value) {
  return SwapMask(rows, cols, 1, Orientation::ColumnAlternating,
                  std::vector<std::uint8_t>(rows * cols, value ? 1 : 0));
}

SwapMask make_swap_mask(std::size_t m, std::size_t n, std::size_t w, Orientation orientation) {
  if (m == 0 || n == 0 || w == 0) throw DomainError("make_swap_mask: m, n, w must be >= 1");
  std::vector<std::uint8_t> v(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t k = orientation == Orientation::ColumnAlternating ? j : i;
      v[i * n + j] = static_cast<std::uint8_t>((k / w) % 2);
    }
  }
  return SwapMask(m, n, w, orientation, std::move(v));
}

BlendWeights make_blend_weights(std::size_t width, BlendScheme scheme) {
  BlendWeights b;
  b.width = width;
  b.scheme = scheme;
  b.left_weights.resize(width, 0.5);
  if (scheme == BlendScheme::Triangular) {
    for (std::size_t j = 0; j < width; ++j) {
      b.left_weights[j] = 1.0 - static_cast<double>(j + 1) / static_cast<double>(width + 1);
    }
  }
  return b;
}

namespace {

void check_mask(const LatentMap& a, const LatentMap& b, const SwapMask& mask, const char* what) {
  require_same_shape(a, b, what);
  if (mask.rows() != a.height() || mask.cols() != a.width()) {
    throw ShapeError(std::string(what) + ": mask shape does not match inputs");
  }
}

LatentMap select(const LatentMap& on_one, const LatentMap& on_zero, const SwapMask& mask) {
  LatentMap out = on_zero;
  for (std::size_t c = 0; c < out.channels(); ++c) {
    for (std::size_t h = 0; h < out.height(); ++h) {
      auto src = on_one.row(c, h);
      auto dst = out.row(c, h);
      for (std::size_t w = 0; w < out.width(); ++w) {
        if (mask(h, w)) dst[w] = src[w];
      }
    }
  }
  return out;
}

}  // namespace

LatentMap swap_merge(const LatentMap& left, const LatentMap& right, const SwapMask& mask) {
  check_mask(left, right, mask, "swap_merge");
  return select(left, right, mask);
}

LatentMap weighted_merge(const LatentMap& left, const LatentMap& right,
                         const BlendWeights& weights) {
  require_same_shape(left, right, "weighted_merge");
  if (weights.width != left.width() || weights.left_weights.size() != left.width()) {
    throw ShapeError("weighted_merge: weight width does not match inputs");
  }
  LatentMap out(left.shape());
  for (std::size_t c = 0; c < out.channels(); ++c) {
    for (std::size_t h = 0; h < out.height(); ++h) {
      auto l = left.row(c, h);
      auto r = right.row(c, h);
      auto d = out.row(c, h);
      for (std::size_t w = 0; w < out.width(); ++w) {
        const double a = weights.left_weights[w];
        d[w] = r[w] + a * (l[w] - r[w]);
      }
    }
  }
  return out;
}

LatentMap reference_guided_merge(const LatentMap& reference_mid, const LatentMap& subview_mid,
                                 const SwapMask& mask) {
  check_mask(reference_mid, subview_mid, mask, "reference_guided_merge");
  return select(reference_mid, subview_mid, mask);
}

}  // namespace safa
