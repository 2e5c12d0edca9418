#include "safa/metrics.hpp"

#include <cmath>

#include "safa/errors.hpp"

namespace safa {
namespace {

// Mean over channels and rows of the squared difference between column c and
// the next column (wrapping when circular).
std::vector<double> column_differences(const LatentMap& m, bool circular) {
  const std::size_t W = m.width();
  const std::size_t n = circular ? W : W - 1;
  std::vector<double> d(n, 0.0);
  for (std::size_t c = 0; c < m.channels(); ++c) {
    for (std::size_t h = 0; h < m.height(); ++h) {
      auto row = m.row(c, h);
      for (std::size_t j = 0; j < n; ++j) {
        const double diff = row[(j + 1) % W] - row[j];
        d[j] += diff * diff;
      }
    }
  }
  const double rows = static_cast<double>(m.channels() * m.height());
  for (double& v : d) v /= rows;
  return d;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> subview_features(const LatentMap& view, std::size_t bins) {
  std::vector<double> f;
  const std::size_t plane = view.height() * view.width();
  std::vector<double> means(view.channels()), vars(view.channels());
  for (std::size_t c = 0; c < view.channels(); ++c) {
    auto p = view.data().subspan(c * plane, plane);
    double mu = 0.0;
    for (double v : p) mu += v;
    mu /= static_cast<double>(plane);
    double var = 0.0;
    for (double v : p) var += (v - mu) * (v - mu);
    means[c] = mu;
    vars[c] = var / static_cast<double>(plane);
  }
  f.insert(f.end(), means.begin(), means.end());
  f.insert(f.end(), vars.begin(), vars.end());
  try {
    const auto curve = relative_log_amplitude(view, std::nullopt, bins);
    f.insert(f.end(), curve.values.begin(), curve.values.end());
  } catch (const DegenerateInput&) {
    f.insert(f.end(), bins, 0.0);
  }
  return f;
}

}  // namespace

double seam_energy(const LatentMap& canvas, const SubviewLayout& layout) {
  if (canvas.width() != layout.total_width) throw ShapeError("seam_energy: canvas/layout width");
  if (layout.pair_count() == 0 || canvas.width() < 2) return 0.0;
  const auto d = column_differences(canvas, layout.circular);
  const std::size_t W = layout.total_width;
  const std::size_t o = layout.overlap();
  double boundary = 0.0;
  std::size_t nb = 0;
  auto add = [&](std::size_t col_after) {
    const std::size_t j = (col_after + W - 1) % W;
    if (j < d.size()) {
      boundary += d[j];
      ++nb;
    }
  };
  for (std::size_t p = 0; p < layout.pair_count(); ++p) {
    const std::size_t a = layout.start(layout.pair_right(p)) % W;
    add(a);
    if (o > 0) add((a + o) % W);
  }
  double all = 0.0;
  for (double v : d) all += v;
  all /= static_cast<double>(d.size());
  return nb == 0 ? 0.0 : boundary / static_cast<double>(nb) - all;
}

double cross_view_distance(const LatentMap& canvas, const SubviewLayout& layout,
                           std::size_t bins) {
  if (layout.count < 2) throw DomainError("cross_view_distance needs at least two subviews");
  std::vector<std::vector<double>> f;
  for (std::size_t i = 0; i < layout.count; ++i) {
    f.push_back(subview_features(extract_subview(canvas, layout, i), bins));
  }
  double s = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    for (std::size_t j = i + 1; j < f.size(); ++j) {
      std::vector<double> diff(f[i].size());
      for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = f[i][k] - f[j][k];
      const double scale = 0.5 * (norm(f[i]) + norm(f[j]));
      s += scale > 0.0 ? norm(diff) / scale : 0.0;
      ++pairs;
    }
  }
  return s / static_cast<double>(pairs);
}

double mean_pairwise_core_distance(const LatentMap& canvas, const SubviewLayout& layout,
                                   bool squared) {
  if (layout.count < 2) throw DomainError("pairwise distance needs at least two subviews");
  const std::size_t o = layout.overlap();
  if (layout.stride <= o) throw DomainError("subviews have no core columns");
  std::vector<LatentMap> cores;
  for (std::size_t i = 0; i < layout.count; ++i) {
    cores.push_back(slice_columns(extract_subview(canvas, layout, i), o, layout.stride));
  }
  double s = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < cores.size(); ++i) {
    for (std::size_t j = i + 1; j < cores.size(); ++j) {
      double d2 = 0.0;
      auto a = cores[i].data();
      auto b = cores[j].data();
      for (std::size_t k = 0; k < a.size(); ++k) d2 += (a[k] - b[k]) * (a[k] - b[k]);
      s += squared ? d2 : std::sqrt(d2);
      ++pairs;
    }
  }
  return s / static_cast<double>(pairs);
}

GenerationMetrics compute_metrics(const LatentMap& canvas, const SubviewLayout& layout,
                                  std::size_t bins) {
  GenerationMetrics m;
  if (frequency_report_applicable(layout)) m.frequency = frequency_report(canvas, layout, bins);
  m.seam_energy = seam_energy(canvas, layout);
  if (layout.count >= 2) {
    m.cross_view_distance = cross_view_distance(canvas, layout, bins);
    if (layout.stride > layout.overlap()) {
      m.mean_pairwise_distance = mean_pairwise_core_distance(canvas, layout);
    }
  }
  return m;
}

}  // namespace safa
