#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace safa {

struct Shape {
  std::size_t channels = 0;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t size() const { return channels * height * width; }
  bool operator==(const Shape&) const = default;
};

// C x H x W real tensor stored row-major as (channel, row, column).
class LatentMap {
 public:
  LatentMap() = default;
  LatentMap(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  LatentMap(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> data);
  explicit LatentMap(Shape shape, double fill = 0.0)
      : LatentMap(shape.channels, shape.height, shape.width, fill) {}

  std::size_t channels() const { return shape_.channels; }
  std::size_t height() const { return shape_.height; }
  std::size_t width() const { return shape_.width; }
  std::size_t size() const { return data_.size(); }
  const Shape& shape() const { return shape_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t c, std::size_t h, std::size_t w) {
    return data_[(c * shape_.height + h) * shape_.width + w];
  }
  double operator()(std::size_t c, std::size_t h, std::size_t w) const {
    return data_[(c * shape_.height + h) * shape_.width + w];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t c, std::size_t h) {
    return std::span<double>(data_).subspan((c * shape_.height + h) * shape_.width, shape_.width);
  }
  std::span<const double> row(std::size_t c, std::size_t h) const {
    return std::span<const double>(data_).subspan((c * shape_.height + h) * shape_.width,
                                                  shape_.width);
  }

  // Euclidean norm over all elements.
  double norm() const;
  bool all_finite() const;

  bool operator==(const LatentMap&) const = default;

 private:
  Shape shape_{};
  std::vector<double> data_;
};

// Throws ShapeError unless a and b have equal shapes.
void require_same_shape(const LatentMap& a, const LatentMap& b, const char* what);

// Columns [begin, end) of m as a new map.
LatentMap slice_columns(const LatentMap& m, std::size_t begin, std::size_t end);

// dst[:, :, dst_begin + j] = src[:, :, src_begin + j] for j < count.
void copy_columns(const LatentMap& src, std::size_t src_begin, LatentMap& dst,
                  std::size_t dst_begin, std::size_t count);

}  // namespace safa
