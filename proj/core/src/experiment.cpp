#include "safa/experiment.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "safa/errors.hpp"
#include "safa/rng.hpp"
#include "safa/tensor_io.hpp"

namespace safa {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, end);
}

std::vector<std::pair<std::string, std::string>> Overrides::entries() const {
  std::vector<std::pair<std::string, std::string>> e;
  if (fast) e.emplace_back("fast", "true");
  if (seed) e.emplace_back("seed", std::to_string(*seed));
  if (mode) e.emplace_back("mode", std::string(to_string(*mode)));
  if (snapshots) e.emplace_back("snapshots", std::to_string(*snapshots));
  e.insert(e.end(), extra.begin(), extra.end());
  return e;
}

void apply_parameter(ExperimentConfig& cfg, const std::string& parameter,
                     const std::string& value) {
  try {
    std::size_t used = 0;
    if (parameter == "r_guide") {
      cfg.r_guide = std::stod(value, &used);
    } else if (parameter == "w") {
      const long long w = std::stoll(value, &used);
      if (w < 1) throw ConfigError("w must be >= 1");
      cfg.swap_interval = static_cast<std::size_t>(w);
    } else if (parameter == "overlap_rate") {
      cfg.overlap_rate = std::stod(value, &used);
    } else if (parameter == "mode") {
      cfg.mode = parse_merge_mode(value);
      used = value.size();
    } else {
      throw ConfigError("unknown sweep parameter '" + parameter +
                        "' (r_guide|w|overlap_rate|mode)");
    }
    if (used != value.size()) throw ConfigError("bad value '" + value + "' for " + parameter);
  } catch (const std::logic_error&) {
    throw ConfigError("bad value '" + value + "' for " + parameter);
  }
}

void apply_overrides(ExperimentConfig& cfg, const Overrides& o) {
  if (o.fast) apply_fast_profile(cfg);
  if (o.seed) {
    cfg.seed = *o.seed;
  }
  if (o.mode) cfg.mode = *o.mode;
  if (o.snapshots) cfg.snapshot_stride = *o.snapshots;
  for (const auto& [k, v] : o.extra) apply_parameter(cfg, k, v);
  (void)to_run_config(cfg);
}

std::string manifest_json(const ExperimentConfig& cfg, const Overrides& o) {
  json m;
  m["config"] = json::parse(to_canonical_json(cfg));
  m["config_hash"] = config_hash(cfg);
  m["seed"] = cfg.seed;
  m["version"] = std::string(kVersion);
  json ov = json::array();
  for (const auto& [k, v] : o.entries()) ov.push_back({{"key", k}, {"value", v}});
  m["overrides"] = ov;
  return m.dump(2) + "\n";
}

std::string trajectory_csv(const TrajectoryLog& log) {
  std::ostringstream out;
  out << "step,pair_index,divergence,denoiser_calls\n";
  std::size_t r = 0;
  for (std::size_t t = log.calls_per_step.size(); t-- > 1;) {
    bool any = false;
    while (r < log.records.size() && log.records[r].step == t) {
      const auto& rec = log.records[r++];
      out << rec.step << ',' << rec.pair_index << ',' << format_double(rec.divergence) << ','
          << rec.denoiser_calls << '\n';
      any = true;
    }
    if (!any) out << t << ",,," << log.calls_per_step[t] << '\n';
  }
  return out.str();
}

std::string metrics_csv(const GenerationMetrics& m) {
  std::ostringstream out;
  out << "metric,value\n";
  if (m.frequency) out << "hf_suppression_index," << format_double(m.frequency->hf_suppression_index) << '\n';
  if (m.seam_energy) out << "seam_energy," << format_double(*m.seam_energy) << '\n';
  if (m.cross_view_distance) out << "cross_view_distance," << format_double(*m.cross_view_distance) << '\n';
  if (m.mean_pairwise_distance) {
    out << "mean_pairwise_distance," << format_double(*m.mean_pairwise_distance) << '\n';
  }
  return out.str();
}

std::string curve_csv(const SpectrumCurve& c) {
  std::ostringstream out;
  out << "bin_index,value\n";
  for (std::size_t b = 0; b < c.bins(); ++b) out << b << ',' << format_double(c.values[b]) << '\n';
  return out.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw Error("failed writing " + path.string());
}

namespace {

GenerationMetrics selected_metrics(const LatentMap& canvas, const SubviewLayout& layout,
                                   const AnalysisOptions& a) {
  GenerationMetrics m;
  if (a.spectrum && frequency_report_applicable(layout)) {
    m.frequency = frequency_report(canvas, layout, a.bins);
  }
  if (a.seam) m.seam_energy = seam_energy(canvas, layout);
  if (a.cross_view && layout.count >= 2) {
    m.cross_view_distance = cross_view_distance(canvas, layout, a.bins);
    if (layout.stride > layout.overlap()) {
      m.mean_pairwise_distance = mean_pairwise_core_distance(canvas, layout);
    }
  }
  return m;
}

void write_metrics(const fs::path& dir, const GenerationMetrics& m) {
  write_text(dir / "metrics.csv", metrics_csv(m));
  if (m.frequency) {
    write_text(dir / "spectrum_overlap.csv", curve_csv(m.frequency->overlap));
    write_text(dir / "spectrum_reference.csv", curve_csv(m.frequency->reference));
  }
}

std::string step_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "step_%04zu.safa", step);
  return buf;
}

}  // namespace

GenerationOutcome run_generation(const ExperimentConfig& cfg, const Overrides& o,
                                 const fs::path& out_dir, std::size_t threads) {
  ExperimentConfig effective = cfg;
  apply_overrides(effective, o);
  const RunConfig run = to_run_config(effective, threads);
  fs::create_directories(out_dir);

  GenerationOutcome out;
  out.result = joint_generate(run);
  const LatentMap stored = round_to_float32(out.result.canvas);
  write_safa(out_dir / "canvas.safa", stored);
  for (std::size_t c = 0; c < stored.channels(); ++c) {
    write_pgm(out_dir / ("canvas_c" + std::to_string(c) + ".pgm"), stored, c);
  }
  write_text(out_dir / "trajectory.csv", trajectory_csv(out.result.log));
  out.metrics = selected_metrics(stored, run.layout, effective.analysis);
  write_metrics(out_dir, out.metrics);
  if (!out.result.log.snapshots.empty()) {
    fs::create_directories(out_dir / "snapshots");
    for (const auto& [step, canvas] : out.result.log.snapshots) {
      write_safa(out_dir / "snapshots" / step_name(step), canvas);
    }
  }
  write_text(out_dir / "manifest.json", manifest_json(effective, o));
  return out;
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const Overrides& o,
                                  const std::string& parameter,
                                  const std::vector<std::string>& grid, const fs::path& out_dir,
                                  std::size_t threads) {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  {
    ExperimentConfig probe = cfg;
    for (const auto& v : grid) apply_parameter(probe, parameter, v);
  }
  fs::create_directories(out_dir);
  std::vector<std::uint64_t> seeds = cfg.sweep.seeds;
  const bool per_seed = !seeds.empty();
  if (!per_seed) seeds.push_back(o.seed.value_or(cfg.seed));

  std::ostringstream table;
  table << "parameter,value,seed,hf_suppression_index,seam_energy,cross_view_distance,"
           "mean_pairwise_distance\n";
  auto cell = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::vector<SweepPoint> points;
  for (const auto& value : grid) {
    for (std::uint64_t seed : seeds) {
      Overrides ov = o;
      ov.extra.emplace_back(parameter, value);
      if (per_seed) ov.seed = seed;
      fs::path dir = out_dir / (parameter + "_" + value);
      if (per_seed) dir /= "seed_" + std::to_string(seed);
      const auto outcome = run_generation(cfg, ov, dir, threads);
      const auto& m = outcome.metrics;
      std::optional<double> hf;
      if (m.frequency) hf = m.frequency->hf_suppression_index;
      table << parameter << ',' << value << ',' << seed << ',' << cell(hf) << ','
            << cell(m.seam_energy) << ',' << cell(m.cross_view_distance) << ','
            << cell(m.mean_pairwise_distance) << '\n';
      points.push_back({value, m});
    }
  }
  write_text(out_dir / "sweep.csv", table.str());
  return points;
}

BoundInputs bound_fixture(const BoundsOptions& b, std::size_t d, double delta,
                          std::uint64_t seed) {
  BoundInputs in;
  in.x1 = LatentMap(1, 1, d);
  in.x2 = LatentMap(1, 1, d);
  in.x_ref = LatentMap(1, 1, d);
  fill_standard_normal(in.x1.data(), derive_seed({seed, tag(SeedTag::Fixture), d, 1}));
  fill_standard_normal(in.x2.data(), derive_seed({seed, tag(SeedTag::Fixture), d, 2}));
  fill_standard_normal(in.x_ref.data(), derive_seed({seed, tag(SeedTag::Fixture), d, 3}));
  auto x1 = in.x1.data();
  auto x2 = in.x2.data();
  for (std::size_t i = 0; i < d; ++i) x2[i] = x1[i] + b.separation * x2[i];
  in.t2 = b.t2;
  in.t1 = b.t1;
  in.C = ScoreBound{b.score_bound};
  in.delta = delta;
  if (b.masked) in.mask = make_swap_mask(1, d, b.swap_interval, Orientation::ColumnAlternating);
  return in;
}

std::vector<BoundReportRow> run_bound_validation(const ExperimentConfig& cfg, double bound_scale,
                                                 std::size_t threads) {
  const auto& b = cfg.bounds;
  if (b.deltas.empty() || b.dims.empty() || b.pairings.empty()) {
    throw ConfigError("bounds section needs dims, deltas and pairings");
  }
  std::vector<BoundReportRow> rows;
  for (std::size_t d : b.dims) {
    for (NoisePairing pairing : b.pairings) {
      BoundInputs in = bound_fixture(b, d, b.deltas.front(), cfg.seed);
      in.beta = cfg.beta;
      MonteCarloOptions opt;
      opt.trials = b.trials;
      opt.steps = b.steps;
      opt.pairing = pairing;
      opt.seed = derive_seed({cfg.seed, tag(SeedTag::Trial), d, static_cast<std::uint64_t>(pairing)});
      opt.threads = threads;
      const auto sq = simulate_pair_distances(in, opt);
      for (double delta : b.deltas) {
        in.delta = delta;
        const double bound = (in.mask ? corollary_bound(in) : proposition_bound(in)) * bound_scale;
        BoundReportRow row;
        row.delta = delta;
        row.d = d;
        row.t2 = in.t2;
        row.t1 = in.t1;
        row.C = in.C.C;
        row.pairing = pairing;
        row.result = summarize_violations(sq, bound);
        row.pass = within_delta(row.result, delta);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

std::string bound_report_csv(const std::vector<BoundReportRow>& rows) {
  std::ostringstream out;
  out << "delta,d,t2,t1,C,pairing,trials,violation_rate,mean_sq_distance,bound,slack,"
         "upper_99,pass\n";
  for (const auto& r : rows) {
    out << format_double(r.delta) << ',' << r.d << ',' << format_double(r.t2) << ','
        << format_double(r.t1) << ',' << format_double(r.C) << ',' << to_string(r.pairing) << ','
        << r.result.trials << ',' << format_double(r.result.violation_rate) << ','
        << format_double(r.result.mean_sq_distance) << ',' << format_double(r.result.bound) << ','
        << format_double(r.result.slack) << ',' << format_double(r.result.upper_99) << ','
        << (r.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

GenerationMetrics analyze_canvas(const LatentMap& canvas, const SubviewLayout& layout,
                                 const AnalysisOptions& analysis, const fs::path& out_dir) {
  if (canvas.width() != layout.total_width) {
    throw ShapeError("canvas width " + std::to_string(canvas.width()) +
                     " does not match layout width " + std::to_string(layout.total_width));
  }
  const auto m = selected_metrics(canvas, layout, analysis);
  fs::create_directories(out_dir);
  write_metrics(out_dir, m);
  return m;
}

}  // namespace safa
