#include "safa/joint_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "safa/errors.hpp"
#include "safa/rng.hpp"
#include "safa/sampler.hpp"

namespace safa {

std::string_view to_string(MergeMode mode) {
  switch (mode) {
    case MergeMode::MD: return "md";
    case MergeMode::MDStar: return "mdstar";
    case MergeMode::SaFaStar: return "safastar";
    case MergeMode::SaFa: return "safa";
  }
  return "?";
}

MergeMode parse_merge_mode(std::string_view text) {
  if (text == "md") return MergeMode::MD;
  if (text == "mdstar") return MergeMode::MDStar;
  if (text == "safastar") return MergeMode::SaFaStar;
  if (text == "safa") return MergeMode::SaFa;
  throw ConfigError("unknown merge mode '" + std::string(text) + "'");
}

std::size_t TrajectoryLog::total_calls() const {
  std::size_t s = 0;
  for (std::size_t c : calls_per_step) s += c;
  return s;
}

std::size_t guided_step_count(double r_guide, std::size_t steps) {
  if (!(r_guide >= 0.0 && r_guide <= 1.0)) throw ConfigError("r_guide must lie in [0, 1]");
  const double x = r_guide * static_cast<double>(steps);
  const double nearest = std::round(x);
  // r_guide * T that is integral up to representation error is not rounded up.
  const double k = std::abs(x - nearest) < 1e-9 * std::max(1.0, x) ? nearest : std::ceil(x);
  return std::min(steps, static_cast<std::size_t>(k));
}

bool guidance_active(std::size_t t, std::size_t steps, double r_guide) {
  return t <= steps && steps - t < guided_step_count(r_guide, steps);
}

double measure_divergence(const LatentMap& a, const LatentMap& b) {
  require_same_shape(a, b, "measure_divergence");
  const double na = a.norm();
  const double nb = b.norm();
  if (na + nb == 0.0) return 0.0;
  double d2 = 0.0;
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
  return std::min(1.0, std::sqrt(d2) / (0.5 * (na + nb)));
}

double measure_divergence(const LatentMap& x_i, const LatentMap& x_next,
                          const SubviewLayout& layout) {
  const std::size_t o = layout.overlap();
  if (o == 0) return 0.0;
  if (x_i.width() != layout.subview_width || x_next.width() != layout.subview_width) {
    throw ShapeError("measure_divergence: subview width does not match layout");
  }
  return measure_divergence(slice_columns(x_i, layout.stride, layout.subview_width),
                            slice_columns(x_next, 0, o));
}

JointScheduler::JointScheduler(RunConfig config) : config_(std::move(config)) {
  const auto& l = config_.layout;
  if (config_.channels == 0 || config_.height == 0) throw ConfigError("canvas must be non-empty");
  if (l.count == 0 || l.stride == 0 || l.subview_width > l.total_width) {
    throw ConfigError("invalid subview layout");
  }
  if (!(config_.r_guide >= 0.0 && config_.r_guide <= 1.0)) {
    throw ConfigError("r_guide must lie in [0, 1]");
  }
  if (config_.swap_interval == 0) throw ConfigError("swap interval must be >= 1");
  const bool swap = config_.mode == MergeMode::SaFa || config_.mode == MergeMode::SaFaStar;
  if (swap && (l.overlap_rate >= 0.5 || l.max_coverage() > 2)) {
    throw ConfigError("swap modes require overlap_rate < 0.5 (pairwise overlaps only)");
  }
  conditions_ = config_.conditions;
  if (conditions_.empty()) {
    for (std::size_t v = 0; v <= l.count; ++v) conditions_.push_back(static_cast<std::int64_t>(v));
  }
  if (conditions_.size() != l.count + 1) {
    throw ConfigError("expected " + std::to_string(l.count + 1) +
                      " conditions (reference first), got " + std::to_string(conditions_.size()));
  }
  const Shape view{config_.channels, config_.height, l.subview_width};
  denoisers_.reserve(conditions_.size());
  for (std::int64_t y : conditions_) {
    DenoiserSpec spec = config_.denoiser;
    spec.condition = y;
    denoisers_.emplace_back(spec, view, config_.schedule.beta());
  }
}

LatentMap JointScheduler::initial_canvas() const {
  LatentMap j(config_.channels, config_.height, config_.layout.total_width);
  fill_standard_normal(j.data(), derive_seed({config_.seed, tag(SeedTag::CanvasInit)}));
  return j;
}

LatentMap JointScheduler::initial_reference() const {
  LatentMap r(config_.channels, config_.height, config_.layout.subview_width);
  fill_standard_normal(r.data(), derive_seed({config_.seed, tag(SeedTag::ReferenceInit)}));
  return r;
}

namespace {

// Normalized weighted accumulation over all covering views; columns covered
// by a single view are copied unchanged.
void accumulate_average(LatentMap& canvas, const SubviewLayout& layout,
                        const std::vector<LatentMap>& views, bool triangular) {
  const std::size_t W = layout.subview_width;
  LatentMap acc(canvas.shape());
  std::vector<double> wsum(layout.total_width, 0.0);
  std::vector<std::size_t> cover(layout.total_width, 0);
  std::vector<std::size_t> owner(layout.total_width, 0), owner_col(layout.total_width, 0);
  for (std::size_t i = 0; i < layout.count; ++i) {
    for (std::size_t j = 0; j < W; ++j) {
      const double w = triangular ? static_cast<double>(std::min(j + 1, W - j)) : 1.0;
      const std::size_t col = layout.column(i, j);
      wsum[col] += w;
      ++cover[col];
      owner[col] = i;
      owner_col[col] = j;
      for (std::size_t c = 0; c < canvas.channels(); ++c) {
        for (std::size_t h = 0; h < canvas.height(); ++h) acc(c, h, col) += w * views[i](c, h, j);
      }
    }
  }
  for (std::size_t col = 0; col < layout.total_width; ++col) {
    for (std::size_t c = 0; c < canvas.channels(); ++c) {
      for (std::size_t h = 0; h < canvas.height(); ++h) {
        canvas(c, h, col) = cover[col] == 1 ? views[owner[col]](c, h, owner_col[col])
                                            : acc(c, h, col) / wsum[col];
      }
    }
  }
}

}  // namespace

GenerateResult JointScheduler::run(const StepObserver& observer) const {
  const auto& cfg = config_;
  const auto& layout = cfg.layout;
  const std::size_t T = cfg.schedule.steps();
  const std::size_t n = layout.count;
  const std::size_t o = layout.overlap();
  const bool with_reference = cfg.mode == MergeMode::SaFa;
  const bool averaging = cfg.mode == MergeMode::MD || cfg.mode == MergeMode::MDStar;
  const bool multiway = layout.max_coverage() > 2;

  std::optional<SwapMask> overlap_mask;
  std::optional<BlendWeights> blend;
  if (o > 0) {
    overlap_mask = make_swap_mask(cfg.height, o, cfg.swap_interval, cfg.overlap_orientation);
    blend = make_blend_weights(o, cfg.mode == MergeMode::MDStar ? BlendScheme::Triangular
                                                                : BlendScheme::Uniform);
  }

  GenerateResult result;
  TrajectoryLog& log = result.log;
  log.calls_per_step.assign(T + 1, 0);
  LatentMap J = initial_canvas();
  LatentMap R = with_reference ? initial_reference() : LatentMap{};

  const std::size_t tasks = n + (with_reference ? 1 : 0);
  std::vector<LatentMap> D(n);
  LatentMap R_next;
  tbb::task_arena arena(cfg.threads > 0 ? static_cast<int>(cfg.threads)
                                        : tbb::task_arena::automatic);

  for (std::size_t t = T; t >= 1; --t) {
    arena.execute([&] {
      tbb::parallel_for(std::size_t{0}, tasks, [&](std::size_t v) {
        if (v < n) {
          const LatentMap x = extract_subview(J, layout, v);
          D[v] = reverse_step(denoisers_[v + 1], x, t, cfg.schedule, cfg.score_bound,
                              derive_seed({cfg.seed, tag(SeedTag::StepNoise), t, v + 1}));
        } else {
          R_next = reverse_step(denoisers_[0], R, t, cfg.schedule, cfg.score_bound,
                                derive_seed({cfg.seed, tag(SeedTag::StepNoise), t, 0}));
        }
      });
    });
    log.calls_per_step[t] = tasks;
    const bool guided = with_reference && n > 1 && guidance_active(t, T, cfg.r_guide);

    LatentMap next(J.shape());
    if (averaging && multiway) {
      accumulate_average(next, layout, D, cfg.mode == MergeMode::MDStar);
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const RegionRange mid = region_ranges(layout, i).mid;
        if (mid.empty()) continue;
        if (guided) {
          const SwapMask ref_mask =
              make_swap_mask(cfg.height, mid.width(), cfg.swap_interval, cfg.reference_orientation);
          const LatentMap merged =
              reference_guided_merge(slice_columns(R_next, mid.start, mid.end),
                                     slice_columns(D[i], mid.start, mid.end), ref_mask);
          for (std::size_t j = 0; j < mid.width(); ++j) {
            copy_columns(merged, j, next, layout.column(i, mid.start + j), 1);
          }
        } else {
          write_subview(next, layout, i, D[i], mid);
        }
      }
      if (o > 0) {
        for (std::size_t p = 0; p < layout.pair_count(); ++p) {
          const std::size_t q = layout.pair_right(p);
          const LatentMap left = slice_columns(D[p], layout.stride, layout.subview_width);
          const LatentMap right = slice_columns(D[q], 0, o);
          const LatentMap merged = averaging ? weighted_merge(left, right, *blend)
                                             : swap_merge(left, right, *overlap_mask);
          for (std::size_t j = 0; j < o; ++j) copy_columns(merged, j, next, layout.column(q, j), 1);
        }
      }
    }

    for (std::size_t p = 0; p < layout.pair_count(); ++p) {
      log.records.push_back(
          {t, p, measure_divergence(D[p], D[layout.pair_right(p)], layout), tasks});
    }

    J = std::move(next);
    if (with_reference) R = R_next;
    if (observer) observer(StepView{t, guided, D, with_reference ? &R : nullptr, J});
    if (cfg.snapshot_stride > 0 && (T - (t - 1)) % cfg.snapshot_stride == 0) {
      log.snapshots.emplace_back(t - 1, J);
    }
  }
  result.canvas = std::move(J);
  return result;
}

GenerateResult joint_generate(const RunConfig& config) { return JointScheduler(config).run(); }

}  // namespace safa
