#include "safa/latent_map.hpp"

#include <cmath>
#include <string>

#include "safa/errors.hpp"

namespace safa {

LatentMap::LatentMap(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : shape_{channels, height, width}, data_(channels * height * width, fill) {
  if (channels == 0 || height == 0 || width == 0) {
    throw ShapeError("LatentMap dimensions must be positive");
  }
}

LatentMap::LatentMap(std::size_t channels, std::size_t height, std::size_t width,
                     std::vector<double> data)
    : shape_{channels, height, width}, data_(std::move(data)) {
  if (channels == 0 || height == 0 || width == 0) {
    throw ShapeError("LatentMap dimensions must be positive");
  }
  if (data_.size() != shape_.size()) {
    throw ShapeError("LatentMap data length " + std::to_string(data_.size()) +
                     " does not match C*H*W = " + std::to_string(shape_.size()));
  }
}

double LatentMap::norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

bool LatentMap::all_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void require_same_shape(const LatentMap& a, const LatentMap& b, const char* what) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

LatentMap slice_columns(const LatentMap& m, std::size_t begin, std::size_t end) {
  if (begin >= end || end > m.width()) {
    throw IndexError("column slice out of range");
  }
  LatentMap out(m.channels(), m.height(), end - begin);
  copy_columns(m, begin, out, 0, end - begin);
  return out;
}

void copy_columns(const LatentMap& src, std::size_t src_begin, LatentMap& dst,
                  std::size_t dst_begin, std::size_t count) {
  if (src.channels() != dst.channels() || src.height() != dst.height()) {
    throw ShapeError("copy_columns: channel/height mismatch");
  }
  if (src_begin + count > src.width() || dst_begin + count > dst.width()) {
    throw IndexError("copy_columns: range exceeds width");
  }
  for (std::size_t c = 0; c < src.channels(); ++c) {
    for (std::size_t h = 0; h < src.height(); ++h) {
      auto s = src.row(c, h).subspan(src_begin, count);
      auto d = dst.row(c, h).subspan(dst_begin, count);
      std::copy(s.begin(), s.end(), d.begin());
    }
  }
}

}  // namespace safa
