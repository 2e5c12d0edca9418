#include <gtest/gtest.h>

#include <set>

#include "safa/errors.hpp"
#include "safa/layout.hpp"
#include "safa/tensor_io.hpp"
#include "test_util.hpp"

using namespace safa;
using safa::testing::random_map;

TEST(BuildLayout, HighOverlapPanoramaGeometry) {
  const auto l = build_layout(400, 80, 0.8, false);
  EXPECT_EQ(l.stride, 16u);
  EXPECT_EQ(l.count, 21u);
}

TEST(BuildLayout, LowOverlapPanoramaGeometry) {
  const auto l = build_layout(400, 80, 0.2, false);
  EXPECT_EQ(l.stride, 64u);
  EXPECT_EQ(l.count, 6u);
  EXPECT_EQ(l.overlap(), 16u);
  EXPECT_EQ((400u - 80u) / 64u + 1u, l.count);
}

TEST(BuildLayout, SingleView) {
  const auto l = build_layout(80, 80, 0.0, false);
  EXPECT_EQ(l.stride, 80u);
  EXPECT_EQ(l.count, 1u);
  EXPECT_EQ(l.overlap(), 0u);
  EXPECT_EQ(l.pair_count(), 0u);
}

TEST(BuildLayout, RejectsNonFittingGeometry) {
  EXPECT_THROW(build_layout(401, 80, 0.2, false), GeometryError);
  EXPECT_THROW(build_layout(330, 80, 0.75, true), GeometryError);
  EXPECT_THROW(build_layout(70, 80, 0.2, false), GeometryError);
  EXPECT_THROW(build_layout(400, 80, 1.0, false), GeometryError);
}

TEST(BuildLayout, RoundsHalfUp) {
  // 10 * 0.75 = 7.5 -> 8
  EXPECT_EQ(build_layout(18, 10, 0.25, false).stride, 8u);
  EXPECT_EQ(round_half_up(2.5), 3u);
  EXPECT_EQ(round_half_up(2.49), 2u);
}

TEST(BuildLayout, InvariantsHoldOverSweep) {
  for (std::size_t wx = 1; wx <= 24; ++wx) {
    for (double r : {0.0, 0.1, 0.2, 0.25, 0.4, 0.5, 0.6, 0.75, 0.8}) {
      const std::size_t stride = round_half_up(wx * (1.0 - r));
      if (stride == 0) continue;
      for (std::size_t k = 0; k < 6; ++k) {
        const std::size_t total = wx + k * stride;
        const auto l = build_layout(total, wx, r, false);
        EXPECT_EQ((l.count - 1) * l.stride + wx, total);
        std::vector<int> cover(total, 0);
        for (std::size_t i = 0; i < l.count; ++i) {
          for (std::size_t j = 0; j < wx; ++j) ++cover[l.column(i, j)];
        }
        for (int c : cover) EXPECT_GE(c, 1);
      }
    }
  }
}

TEST(ExtractSubview, ColumnWindow) {
  const auto l = build_layout(400, 80, 0.2, false);
  LatentMap J(2, 3, 400);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t h = 0; h < 3; ++h)
      for (std::size_t w = 0; w < 400; ++w) J(c, h, w) = static_cast<double>(w);
  const auto X = extract_subview(J, l, 1);
  ASSERT_EQ(X.width(), 80u);
  for (std::size_t j = 0; j < 80; ++j) EXPECT_EQ(X(1, 2, j), 64.0 + j);
}

TEST(ExtractSubview, SingleViewCopiesCanvas) {
  const auto l = build_layout(80, 80, 0.0, false);
  const auto J = random_map(2, 4, 80, 3);
  EXPECT_EQ(extract_subview(J, l, 0), J);
}

TEST(ExtractSubview, CircularWraps) {
  const auto l = build_layout(320, 80, 0.75, true);
  ASSERT_EQ(l.stride, 20u);
  ASSERT_EQ(l.count, 16u);
  LatentMap J(1, 1, 320);
  for (std::size_t w = 0; w < 320; ++w) J(0, 0, w) = static_cast<double>(w);
  const auto X = extract_subview(J, l, 15);
  std::vector<double> expected;
  for (std::size_t w = 300; w < 320; ++w) expected.push_back(static_cast<double>(w));
  for (std::size_t w = 0; w < 60; ++w) expected.push_back(static_cast<double>(w));
  EXPECT_EQ(std::vector<double>(X.data().begin(), X.data().end()), expected);
}

TEST(ExtractSubview, IndexOutOfRange) {
  const auto l = build_layout(400, 80, 0.2, false);
  EXPECT_THROW(extract_subview(LatentMap(1, 1, 400), l, 6), IndexError);
  EXPECT_THROW(region_ranges(l, 6), IndexError);
}

TEST(RegionRanges, InteriorAndBoundary) {
  const auto l = build_layout(400, 80, 0.2, false);
  const auto r = region_ranges(l, 2);
  EXPECT_EQ(r.left, (RegionRange{0, 16, RegionKind::LeftOverlap}));
  EXPECT_EQ(r.mid, (RegionRange{16, 64, RegionKind::Mid}));
  EXPECT_EQ(r.right, (RegionRange{64, 80, RegionKind::RightOverlap}));
  const auto first = region_ranges(l, 0);
  EXPECT_TRUE(first.left.empty());
  EXPECT_EQ(first.mid.start, 0u);
  EXPECT_EQ(first.mid.end, 64u);
  EXPECT_EQ(first.right.start, 64u);
  const auto last = region_ranges(l, 5);
  EXPECT_TRUE(last.right.empty());
  EXPECT_EQ(last.mid.end, 80u);
}

TEST(RegionRanges, PartitionExhaustive) {
  for (std::size_t wx = 1; wx <= 64; ++wx) {
    for (std::size_t stride = 1; stride <= wx; ++stride) {
      const double r = 1.0 - static_cast<double>(stride) / static_cast<double>(wx);
      const std::size_t s = round_half_up(wx * (1.0 - r));
      for (bool circular : {false, true}) {
        const std::size_t total = circular ? 3 * s : wx + 2 * s;
        if (circular && wx > total) continue;
        const auto l = build_layout(total, wx, r, circular);
        for (std::size_t i = 0; i < l.count; ++i) {
          const auto reg = region_ranges(l, i);
          ASSERT_EQ(reg.left.start, 0u);
          ASSERT_EQ(reg.left.end, reg.mid.start);
          ASSERT_EQ(reg.mid.end, reg.right.start);
          ASSERT_EQ(reg.right.end, wx);
          ASSERT_LE(reg.mid.start, reg.mid.end);
          ASSERT_EQ(reg.left.width() + reg.mid.width() + reg.right.width(), wx);
        }
      }
    }
  }
}

TEST(RegionRanges, OverlapSymmetry) {
  for (double r : {0.1, 0.2, 0.25, 0.4}) {
    for (bool circular : {false, true}) {
      const std::size_t wx = 40;
      const std::size_t s = round_half_up(wx * (1.0 - r));
      const auto l = build_layout(circular ? 6 * s : wx + 5 * s, wx, r, circular);
      for (std::size_t p = 0; p < l.pair_count(); ++p) {
        const std::size_t q = l.pair_right(p);
        const auto right = region_ranges(l, p).right;
        const auto left = region_ranges(l, q).left;
        ASSERT_EQ(right.width(), left.width());
        for (std::size_t j = 0; j < right.width(); ++j) {
          EXPECT_EQ(l.column(p, right.start + j), l.column(q, left.start + j));
        }
      }
    }
  }
}

TEST(WriteSubview, MidRoundTrip) {
  const auto l = build_layout(400, 80, 0.2, false);
  LatentMap J(2, 3, 400);
  const auto X = random_map(2, 3, 80, 11);
  const auto mid = region_ranges(l, 0).mid;
  write_subview(J, l, 0, X, mid);
  const auto back = extract_subview(J, l, 0);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t h = 0; h < 3; ++h)
      for (std::size_t j = mid.start; j < mid.end; ++j) EXPECT_EQ(back(c, h, j), X(c, h, j));
}

TEST(WriteSubview, SharedOverlapWrittenOnce) {
  const auto l = build_layout(400, 80, 0.2, false);
  const auto J0 = random_map(1, 2, 400, 5);
  LatentMap J = J0;
  const auto block = random_map(1, 2, 16, 6);
  LatentMap Xi(1, 2, 80), Xn(1, 2, 80);
  copy_columns(block, 0, Xi, 64, 16);
  copy_columns(block, 0, Xn, 0, 16);
  write_subview(J, l, 1, Xi, region_ranges(l, 1).right);
  write_subview(J, l, 2, Xn, region_ranges(l, 2).left);
  for (std::size_t w = 0; w < 400; ++w) {
    for (std::size_t h = 0; h < 2; ++h) {
      if (w >= 128 && w < 144) {
        EXPECT_EQ(J(0, h, w), block(0, h, w - 128));
      } else {
        EXPECT_EQ(J(0, h, w), J0(0, h, w));
      }
    }
  }
}

TEST(WriteSubview, IdentityComposition) {
  for (bool circular : {false, true}) {
    const auto l = circular ? build_layout(240, 80, 0.25, true) : build_layout(400, 80, 0.2, false);
    const auto J0 = random_map(3, 4, l.total_width, 21);
    LatentMap J = J0;
    for (std::size_t i = 0; i < l.count; ++i) {
      const auto X = extract_subview(J, l, i);
      const auto reg = region_ranges(l, i);
      write_subview(J, l, i, X, reg.left);
      write_subview(J, l, i, X, reg.mid);
      write_subview(J, l, i, X, reg.right);
    }
    EXPECT_EQ(J, J0);
  }
}

TEST(WriteSubview, ShapeMismatch) {
  const auto l = build_layout(400, 80, 0.2, false);
  LatentMap J(2, 3, 400);
  EXPECT_THROW(write_subview(J, l, 0, LatentMap(1, 3, 80), region_ranges(l, 0).mid), ShapeError);
  EXPECT_THROW(write_subview(J, l, 0, LatentMap(2, 4, 80), region_ranges(l, 0).mid), ShapeError);
}

TEST(LatentMapType, DataLengthChecked) {
  EXPECT_THROW(LatentMap(2, 2, 2, std::vector<double>(7)), ShapeError);
  EXPECT_THROW(LatentMap(0, 2, 2), ShapeError);
  LatentMap m(1, 1, 2);
  m(0, 0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(m.all_finite());
}

TEST(TensorFile, RoundTripAndHeader) {
  const auto m = random_map(2, 3, 5, 9);
  const auto bytes = encode_safa(m);
  ASSERT_EQ(bytes.size(), 16u + 4u * 30u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "SAFA");
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(bytes[8], 3);
  EXPECT_EQ(bytes[12], 5);
  EXPECT_EQ(decode_safa(bytes), round_to_float32(m));
}

TEST(TensorFile, MalformedInputs) {
  auto bytes = encode_safa(random_map(1, 2, 2, 1));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_safa(bad_magic), FormatError);
  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_THROW(decode_safa(truncated), FormatError);
  EXPECT_THROW(decode_safa({}), FormatError);
}
