#include "safa/studies.hpp"

#include <cmath>

#include "safa/bounds.hpp"
#include "safa/errors.hpp"
#include "safa/metrics.hpp"
#include "safa/rng.hpp"

namespace safa {
namespace {

// Per-seed run: the texture targets follow the run seed.
RunConfig reseeded(RunConfig cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.denoiser.band.target_seed = derive_seed({seed, tag(SeedTag::Target)});
  cfg.snapshot_stride = 0;
  return cfg;
}

}  // namespace

std::vector<RGuideRow> sweep_r_guide(const RunConfig& base, std::span<const double> grid,
                                     std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw DomainError("sweep_r_guide needs at least one seed");
  std::vector<RGuideRow> rows;
  for (double r : grid) {
    RGuideRow row;
    row.r_guide = r;
    for (std::uint64_t s : seeds) {
      RunConfig cfg = reseeded(base, s);
      cfg.mode = MergeMode::SaFa;
      cfg.r_guide = r;
      const auto res = joint_generate(cfg);
      row.mean_pairwise_distance += mean_pairwise_core_distance(res.canvas, cfg.layout);
      row.diversity += cross_view_distance(res.canvas, cfg.layout);
    }
    row.mean_pairwise_distance /= static_cast<double>(seeds.size());
    row.diversity /= static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

std::vector<IntervalRow> sweep_swap_interval(const RunConfig& base,
                                             std::span<const std::size_t> grid,
                                             std::span<const std::uint64_t> seeds) {
  if (seeds.empty()) throw DomainError("sweep_swap_interval needs at least one seed");
  std::vector<IntervalRow> rows;
  for (std::size_t w : grid) {
    IntervalRow row;
    row.swap_interval = w;
    for (std::uint64_t s : seeds) {
      RunConfig cfg = reseeded(base, s);
      cfg.swap_interval = w;
      row.seam_energy += seam_energy(joint_generate(cfg).canvas, cfg.layout);
    }
    row.seam_energy /= static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

FrequencyPair paired_frequency_run(const RunConfig& base, std::uint64_t seed) {
  FrequencyPair pair;
  pair.seed = seed;
  RunConfig cfg = reseeded(base, seed);
  cfg.mode = MergeMode::MD;
  pair.md = frequency_report(joint_generate(cfg).canvas, cfg.layout, kDefaultBins);
  cfg.mode = MergeMode::SaFa;
  pair.safa = frequency_report(joint_generate(cfg).canvas, cfg.layout, kDefaultBins);
  return pair;
}

std::vector<GuidedSimilarityRow> guided_similarity_experiment(
    const RunConfig& base, std::span<const double> grid, std::span<const std::uint64_t> seeds,
    double delta) {
  if (seeds.empty()) throw DomainError("guided_similarity_experiment needs at least one seed");
  const auto& layout = base.layout;
  const std::size_t o = layout.overlap();
  if (layout.count < 2 || layout.stride <= o) {
    throw DomainError("guided similarity needs >= 2 subviews with core columns");
  }
  RunConfig em = base;
  em.schedule = DiffusionSchedule(base.schedule.steps(), base.schedule.beta(),
                                  SamplerKind::EulerMaruyama);
  em.mode = MergeMode::SaFa;

  double start = 0.0;
  for (std::uint64_t s : seeds) {
    start += mean_pairwise_core_distance(JointScheduler(reseeded(em, s)).initial_canvas(), layout,
                                         true);
  }
  start /= static_cast<double>(seeds.size());

  const std::size_t T = em.schedule.steps();
  const std::size_t core = layout.stride - o;
  const std::size_t d = base.channels * base.height * core;
  const double C = base.score_bound.value_or(ScoreBound{}).C;
  const double tail = chi_square_tail(d, delta);
  const SwapMask ref_mask = make_swap_mask(base.height, core, base.swap_interval,
                                           base.reference_orientation);
  const double unmasked =
      1.0 - static_cast<double>(ref_mask.ones()) / static_cast<double>(ref_mask.values().size());

  std::vector<GuidedSimilarityRow> rows;
  for (double r : grid) {
    GuidedSimilarityRow row;
    row.r_guide = r;
    for (std::uint64_t s : seeds) {
      RunConfig cfg = reseeded(em, s);
      cfg.r_guide = r;
      row.empirical_sq_distance +=
          mean_pairwise_core_distance(joint_generate(cfg).canvas, layout, true);
    }
    row.empirical_sq_distance /= static_cast<double>(seeds.size());

    double D = start;
    for (std::size_t k = T; k >= 1; --k) {
      const double t2 = em.schedule.time(k);
      const double t1 = em.schedule.time(k - 1);
      const double s2 = sigma_sq(t2, t1, em.schedule.beta());
      const double I = drift_integral(t2, t1, em.schedule.beta());
      const double rho = guidance_active(k, T, r) ? std::sqrt(unmasked) : 1.0;
      const double lead = rho * std::sqrt(D) + 2.0 * C * I;
      D = std::exp(s2) * lead * lead + 2.0 * s2 * tail;
    }
    row.bound = D;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace safa
