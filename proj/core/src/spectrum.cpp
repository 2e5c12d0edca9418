#include "safa/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "fft.hpp"
#include "safa/errors.hpp"

namespace safa {
namespace {

// Fills NaN entries by linear interpolation between known neighbours,
// constant beyond the ends.
void fill_gaps(std::vector<double>& v) {
  std::vector<std::size_t> known;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isnan(v[i])) known.push_back(i);
  }
  if (known.empty()) throw DegenerateInput("spectrum has no populated frequency annulus");
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isnan(v[i])) continue;
    auto hi = std::upper_bound(known.begin(), known.end(), i);
    if (hi == known.begin()) {
      v[i] = v[*hi];
    } else if (hi == known.end()) {
      v[i] = v[known.back()];
    } else {
      const std::size_t b = *hi;
      const std::size_t a = *(hi - 1);
      const double u = static_cast<double>(i - a) / static_cast<double>(b - a);
      v[i] = v[a] + u * (v[b] - v[a]);
    }
  }
}

std::vector<double> channel_curve(std::span<const double> plane, std::size_t height,
                                  std::size_t width, const std::vector<std::size_t>& bin,
                                  std::size_t bins) {
  double mu = 0.0;
  for (double v : plane) mu += v;
  mu /= static_cast<double>(plane.size());
  std::vector<double> centered(plane.begin(), plane.end());
  for (double& v : centered) v -= mu;
  const auto spec = detail::fft2(centered, height, width);

  std::vector<double> sum(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 1; i < spec.size(); ++i) {  // site 0 is DC
    sum[bin[i]] += std::abs(spec[i]);
    ++count[bin[i]];
  }
  std::vector<double> v(bins, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] > 0) v[b] = sum[b] / static_cast<double>(count[b]);
  }
  fill_gaps(v);
  if (!(v[0] > 0.0)) throw DegenerateInput("no spectral energy at the lowest frequencies");
  std::vector<double> out(bins);
  for (std::size_t b = 0; b < bins; ++b) out[b] = std::log10(std::max(v[b] / v[0], kLogFloor));
  return out;
}

}  // namespace

SpectrumCurve relative_log_amplitude(const LatentMap& map, std::optional<RegionRange> region,
                                     std::size_t bins) {
  if (bins == 0) throw DomainError("relative_log_amplitude: bins must be positive");
  const LatentMap& src = map;
  LatentMap selected;
  if (region) {
    if (region->end > map.width() || region->start >= region->end) {
      throw IndexError("relative_log_amplitude: region outside map");
    }
    if (region->width() < 8) throw DomainError("relative_log_amplitude: region narrower than 8");
    selected = slice_columns(map, region->start, region->end);
  }
  const LatentMap& m = region ? selected : src;
  const std::size_t H = m.height(), W = m.width(), plane = H * W;
  const auto bin = radial_bins(H, W, bins);
  SpectrumCurve curve{std::vector<double>(bins, 0.0)};
  for (std::size_t c = 0; c < m.channels(); ++c) {
    const auto v = channel_curve(m.data().subspan(c * plane, plane), H, W, bin, bins);
    for (std::size_t b = 0; b < bins; ++b) curve.values[b] += v[b];
  }
  for (double& v : curve.values) v /= static_cast<double>(m.channels());
  return curve;
}

double hf_suppression_index(const SpectrumCurve& overlap, const SpectrumCurve& reference) {
  if (overlap.bins() != reference.bins() || overlap.bins() == 0) {
    throw ShapeError("hf_suppression_index: curves differ in bin count");
  }
  const std::size_t n = overlap.bins();
  const std::size_t first = std::min(n * 3 / 4, n - 1);
  double s = 0.0;
  for (std::size_t b = first; b < n; ++b) s += reference.values[b] - overlap.values[b];
  return s / static_cast<double>(n - first);
}

SpectrumCurve mean_curve(const std::vector<SpectrumCurve>& curves) {
  if (curves.empty()) throw DomainError("mean_curve: no curves");
  SpectrumCurve out{std::vector<double>(curves.front().bins(), 0.0)};
  for (const auto& c : curves) {
    if (c.bins() != out.bins()) throw ShapeError("mean_curve: bin count mismatch");
    for (std::size_t b = 0; b < c.bins(); ++b) out.values[b] += c.values[b];
  }
  for (double& v : out.values) v /= static_cast<double>(curves.size());
  return out;
}

bool frequency_report_applicable(const SubviewLayout& layout) {
  const std::size_t o = layout.overlap();
  return layout.count >= 2 && o >= 8 && layout.stride >= 2 * o;
}

FrequencyReport frequency_report(const LatentMap& canvas, const SubviewLayout& layout,
                                 std::size_t bins) {
  if (!frequency_report_applicable(layout)) {
    throw DomainError("frequency report needs >= 2 subviews, overlap >= 8 and a core of at "
                      "least one overlap width");
  }
  const std::size_t o = layout.overlap();
  std::vector<SpectrumCurve> overlaps;
  for (std::size_t p = 0; p < layout.pair_count(); ++p) {
    const LatentMap view = extract_subview(canvas, layout, layout.pair_right(p));
    overlaps.push_back(relative_log_amplitude(view, RegionRange{0, o, RegionKind::LeftOverlap}, bins));
  }
  std::vector<SpectrumCurve> references;
  const std::size_t windows = (layout.stride - o) / o;
  for (std::size_t i = 0; i < layout.count; ++i) {
    const LatentMap view = extract_subview(canvas, layout, i);
    for (std::size_t k = 0; k < windows; ++k) {
      const std::size_t a = o + k * o;
      references.push_back(relative_log_amplitude(view, RegionRange{a, a + o, RegionKind::Mid}, bins));
    }
  }
  FrequencyReport r;
  r.overlap = mean_curve(overlaps);
  r.reference = mean_curve(references);
  r.hf_suppression_index = hf_suppression_index(r.overlap, r.reference);
  return r;
}

}  // namespace safa
