#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "safa/denoiser.hpp"
#include "safa/layout.hpp"
#include "safa/latent_map.hpp"
#include "safa/schedule.hpp"
#include "safa/swap_ops.hpp"

namespace safa {

enum class MergeMode { MD, MDStar, SaFaStar, SaFa };

std::string_view to_string(MergeMode mode);
MergeMode parse_merge_mode(std::string_view text);

struct RunConfig {
  std::size_t channels = 4;
  std::size_t height = 32;
  SubviewLayout layout{};
  DiffusionSchedule schedule{200};
  // Template for every view; condition is overwritten per view.
  DenoiserSpec denoiser{};
  // conditions[0] is the reference y_0, conditions[i + 1] belongs to subview i.
  // Empty means {0, 1, ..., count}.
  std::vector<std::int64_t> conditions;
  MergeMode mode = MergeMode::SaFa;
  double r_guide = 0.3;
  std::size_t swap_interval = 1;
  Orientation overlap_orientation = Orientation::ColumnAlternating;
  Orientation reference_orientation = Orientation::ColumnAlternating;
  std::uint64_t seed = 0;
  // Canvas snapshot every this many steps; 0 disables.
  std::size_t snapshot_stride = 0;
  std::optional<ScoreBound> score_bound;
  // Worker threads for the per-step denoising stage; 0 means hardware default.
  std::size_t threads = 0;
};

struct StepRecord {
  std::size_t step = 0;
  std::size_t pair_index = 0;
  double divergence = 0.0;
  std::size_t denoiser_calls = 0;
};

struct TrajectoryLog {
  std::vector<StepRecord> records;
  // Indexed by step t (entry 0 unused).
  std::vector<std::size_t> calls_per_step;
  std::vector<std::pair<std::size_t, LatentMap>> snapshots;

  std::size_t total_calls() const;
};

struct GenerateResult {
  LatentMap canvas;
  TrajectoryLog log;
};

// Everything produced during step t, handed to observers after the merge.
struct StepView {
  std::size_t step;
  bool guided;
  const std::vector<LatentMap>& candidates;  // denoised subviews
  const LatentMap* reference;                // null unless mode == SaFa
  const LatentMap& canvas;                   // J_{t-1} after merging
};

using StepObserver = std::function<void(const StepView&)>;

// Number of leading steps with reference guidance: ceil(r_guide T).
std::size_t guided_step_count(double r_guide, std::size_t steps);
// Guard for step t (counting down from T).
bool guidance_active(std::size_t t, std::size_t steps, double r_guide);

// ||a - b|| / mean(||a||, ||b||), clamped to [0, 1].
double measure_divergence(const LatentMap& a, const LatentMap& b);
// Divergence between Right(x_i) and Left(x_next).
double measure_divergence(const LatentMap& x_i, const LatentMap& x_next,
                          const SubviewLayout& layout);

class JointScheduler {
 public:
  explicit JointScheduler(RunConfig config);

  const RunConfig& config() const { return config_; }
  std::int64_t condition(std::size_t view) const { return conditions_[view]; }
  // Denoiser for view index (0 = reference, i + 1 = subview i).
  const AnalyticDenoiser& denoiser(std::size_t view) const { return denoisers_[view]; }

  LatentMap initial_canvas() const;
  LatentMap initial_reference() const;

  GenerateResult run(const StepObserver& observer = {}) const;

 private:
  RunConfig config_;
  std::vector<std::int64_t> conditions_;
  std::vector<AnalyticDenoiser> denoisers_;
};

GenerateResult joint_generate(const RunConfig& config);

}  // namespace safa
