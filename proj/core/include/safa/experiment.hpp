#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "safa/bounds.hpp"
#include "safa/config.hpp"
#include "safa/joint_scheduler.hpp"
#include "safa/metrics.hpp"

namespace safa {

// Shortest round-trip decimal, locale independent.
std::string format_double(double v);

// Command line overrides, recorded verbatim in the manifest.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<MergeMode> mode;
  std::optional<std::size_t> snapshots;
  bool fast = false;
  std::vector<std::pair<std::string, std::string>> extra;

  std::vector<std::pair<std::string, std::string>> entries() const;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

// Applies a sweep parameter value (r_guide, w, overlap_rate, mode).
void apply_parameter(ExperimentConfig& cfg, const std::string& parameter,
                     const std::string& value);

std::string manifest_json(const ExperimentConfig& cfg, const Overrides& o);

std::string trajectory_csv(const TrajectoryLog& log);
std::string metrics_csv(const GenerationMetrics& m);
std::string curve_csv(const SpectrumCurve& c);

struct GenerationOutcome {
  GenerateResult result;
  GenerationMetrics metrics;  // measured on the float32 canvas as written
};

// Runs a generation and writes canvas.safa, canvas_c*.pgm, trajectory.csv,
// metrics.csv, spectrum CSVs, manifest.json and snapshots into out_dir.
GenerationOutcome run_generation(const ExperimentConfig& cfg, const Overrides& o,
                                 const std::filesystem::path& out_dir, std::size_t threads = 0);

struct SweepPoint {
  std::string value;
  GenerationMetrics metrics;
};

// One subdirectory per grid value plus sweep.csv.
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const Overrides& o,
                                  const std::string& parameter,
                                  const std::vector<std::string>& grid,
                                  const std::filesystem::path& out_dir, std::size_t threads = 0);

struct BoundReportRow {
  double delta = 0.0;
  std::size_t d = 0;
  double t2 = 0.0;
  double t1 = 0.0;
  double C = 0.0;
  NoisePairing pairing = NoisePairing::Independent;
  MonteCarloResult result;
  bool pass = true;
};

// Fixture for dimension d: x1 ~ N(0, I), x2 = x1 + separation N(0, I).
BoundInputs bound_fixture(const BoundsOptions& b, std::size_t d, double delta,
                          std::uint64_t seed);

std::vector<BoundReportRow> run_bound_validation(const ExperimentConfig& cfg,
                                                 double bound_scale = 1.0,
                                                 std::size_t threads = 0);
std::string bound_report_csv(const std::vector<BoundReportRow>& rows);

// Writes spectrum CSVs and metrics.csv for a stored canvas.
GenerationMetrics analyze_canvas(const LatentMap& canvas, const SubviewLayout& layout,
                                 const AnalysisOptions& analysis,
                                 const std::filesystem::path& out_dir);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace safa
