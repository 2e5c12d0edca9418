#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "safa/bounds.hpp"
#include "safa/denoiser.hpp"
#include "safa/joint_scheduler.hpp"
#include "safa/schedule.hpp"
#include "safa/swap_ops.hpp"

namespace safa {

inline constexpr std::string_view kVersion = "0.1.0";

struct AnalysisOptions {
  bool spectrum = true;
  bool seam = true;
  bool cross_view = true;
  std::size_t bins = 32;
};

struct BoundsOptions {
  std::vector<std::size_t> dims{4, 64};
  std::vector<double> deltas{0.1, 0.01};
  std::vector<NoisePairing> pairings{NoisePairing::Shared, NoisePairing::Independent};
  std::size_t trials = 10000;
  std::size_t steps = 1000;
  double t2 = 0.3;
  double t1 = 0.2;
  double score_bound = 10.0;
  // Standard deviation of the per-element gap between x1 and x2.
  double separation = 1.0;
  // Corollary variant: swap both starts with a reference first.
  bool masked = false;
  std::size_t swap_interval = 1;
};

struct SweepOptions {
  // Seeds averaged per grid point; empty means the master seed only.
  std::vector<std::uint64_t> seeds;
};

// Full experiment description. Loaded from JSON with nested sections; unknown
// keys are rejected and "seed" is mandatory.
struct ExperimentConfig {
  std::uint64_t seed = 0;

  std::size_t channels = 4;
  std::size_t height = 32;
  std::size_t width = 400;

  std::size_t subview_width = 80;
  double overlap_rate = 0.2;
  bool circular = false;

  std::size_t steps = 200;
  BetaSchedule beta{};
  SamplerKind sampler = SamplerKind::DDIM;

  DenoiserSpec denoiser{};
  // When unset the texture target seed is derived from the master seed.
  std::optional<std::uint64_t> target_seed;
  std::optional<double> score_bound;
  std::vector<std::int64_t> conditions;

  MergeMode mode = MergeMode::SaFa;
  double r_guide = 0.3;
  std::size_t swap_interval = 1;
  Orientation overlap_orientation = Orientation::ColumnAlternating;
  Orientation reference_orientation = Orientation::ColumnAlternating;

  std::string output_dir = "out";
  // Unset means steps / 10.
  std::optional<std::size_t> snapshot_stride;

  AnalysisOptions analysis{};
  SweepOptions sweep{};
  BoundsOptions bounds{};
};

ExperimentConfig default_config();

// Small CI profile: 4 x 16 x 160 canvas, 40-column subviews, 0.25 overlap, T = 50.
void apply_fast_profile(ExperimentConfig& cfg);

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Deterministic serialization of every resolved field.
std::string to_canonical_json(const ExperimentConfig& cfg);
std::uint64_t fnv1a64(std::string_view bytes);
std::string config_hash(const ExperimentConfig& cfg);

// Validates cross-field invariants and builds the scheduler input.
RunConfig to_run_config(const ExperimentConfig& cfg, std::size_t threads = 0);

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view text);
std::string_view to_string(SamplerKind s);
SamplerKind parse_sampler(std::string_view text);
std::string_view to_string(DenoiserKind k);
DenoiserKind parse_denoiser_kind(std::string_view text);
std::string_view to_string(BandProfile p);
BandProfile parse_band_profile(std::string_view text);

}  // namespace safa
