// Command line front end: generate, sweep, validate-bounds, analyze.
//
// Exit codes: 0 success, 1 configuration or input error, 2 runtime failure,
// 3 a bound validation row failed.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "safa/config.hpp"
#include "safa/errors.hpp"
#include "safa/experiment.hpp"
#include "safa/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitBoundViolation = 3;

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<std::size_t> snapshots;
  std::size_t threads = 0;
  bool fast = false;
};

void add_common(CLI::App& cmd, CommonOptions& o) {
  cmd.add_option("--config", o.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd.add_option("--out", o.out, "output directory (default: config output.dir)");
  cmd.add_option("--seed", o.seed, "master seed override");
  cmd.add_option("--mode", o.mode, "merge mode override")
      ->check(CLI::IsMember({"md", "mdstar", "safastar", "safa"}));
  cmd.add_option("--snapshots", o.snapshots, "canvas snapshot stride in steps (0 disables)");
  cmd.add_option("--threads", o.threads, "worker threads (0: hardware default)");
  cmd.add_flag("--fast", o.fast, "small CI profile");
}

// The config file is authoritative except for explicit flags. Without a
// config the defaults are used and --seed becomes mandatory.
safa::ExperimentConfig resolve(const CommonOptions& o, safa::Overrides& ov) {
  safa::ExperimentConfig cfg;
  if (!o.config.empty()) {
    cfg = safa::load_config(o.config);
  } else {
    if (!o.seed) throw safa::ConfigError("--seed is required when no --config is given");
    cfg = safa::default_config();
  }
  ov.seed = o.seed;
  if (o.mode) ov.mode = safa::parse_merge_mode(*o.mode);
  ov.snapshots = o.snapshots;
  ov.fast = o.fast;
  safa::apply_overrides(cfg, ov);
  return cfg;
}

fs::path output_dir(const CommonOptions& o, const safa::ExperimentConfig& cfg) {
  return o.out.empty() ? fs::path(cfg.output_dir) : fs::path(o.out);
}

std::size_t thread_count(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint tiled diffusion sandbox"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(safa::kVersion));

  CommonOptions gen_opts;
  auto* gen = app.add_subcommand("generate", "run one joint generation");
  add_common(*gen, gen_opts);

  CommonOptions sweep_opts;
  std::string param;
  std::string grid;
  auto* sweep = app.add_subcommand("sweep", "run one generation per grid value");
  add_common(*sweep, sweep_opts);
  sweep->add_option("--param", param, "r_guide | w | overlap_rate | mode")->required();
  sweep->add_option("--grid", grid, "comma separated values")->required();

  CommonOptions bound_opts;
  double bound_scale = 1.0;
  auto* bounds = app.add_subcommand("validate-bounds", "Monte Carlo check of the distance bounds");
  add_common(*bounds, bound_opts);
  bounds->add_option("--debug-bound-scale", bound_scale,
                     "multiply the bound before comparing (harness self-test)");

  std::string canvas_path;
  std::string analyze_config;
  std::string analyze_out = "analysis";
  std::size_t subview_width = 80;
  double overlap_rate = 0.2;
  bool circular = false;
  std::size_t bins = 32;
  auto* analyze = app.add_subcommand("analyze", "metrics and spectra of a stored canvas");
  analyze->add_option("--canvas", canvas_path, "SAFA tensor file")->required();
  analyze->add_option("--config", analyze_config, "take layout and analysis options from a config")
      ->check(CLI::ExistingFile);
  analyze->add_option("--out", analyze_out, "output directory");
  analyze->add_option("--subview-width", subview_width, "subview width in columns");
  analyze->add_option("--overlap-rate", overlap_rate, "overlap rate in [0, 1)");
  analyze->add_flag("--circular", circular, "circular layout");
  analyze->add_option("--bins", bins, "radial frequency bins");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      safa::Overrides ov;
      const auto cfg = resolve(gen_opts, ov);
      const auto dir = output_dir(gen_opts, cfg);
      const auto outcome = safa::run_generation(cfg, ov, dir, thread_count(gen_opts.threads));
      std::cout << "wrote " << dir.string() << " (" << outcome.result.log.total_calls()
                << " denoiser calls)\n";
    } else if (*sweep) {
      safa::Overrides ov;
      const auto cfg = resolve(sweep_opts, ov);
      const auto values = split(grid, ',');
      if (values.empty()) throw safa::ConfigError("--grid is empty");
      const auto dir = output_dir(sweep_opts, cfg);
      safa::run_sweep(cfg, ov, param, values, dir, thread_count(sweep_opts.threads));
      std::cout << "wrote " << (dir / "sweep.csv").string() << '\n';
    } else if (*bounds) {
      safa::Overrides ov;
      const auto cfg = resolve(bound_opts, ov);
      const auto dir = output_dir(bound_opts, cfg);
      const auto rows =
          safa::run_bound_validation(cfg, bound_scale, thread_count(bound_opts.threads));
      fs::create_directories(dir);
      safa::write_text(dir / "bounds.csv", safa::bound_report_csv(rows));
      safa::write_text(dir / "manifest.json", safa::manifest_json(cfg, ov));
      bool pass = true;
      for (const auto& r : rows) {
        std::cout << "delta=" << safa::format_double(r.delta) << " d=" << r.d << ' '
                  << safa::to_string(r.pairing) << " rate=" << safa::format_double(r.result.violation_rate)
                  << " upper99=" << safa::format_double(r.result.upper_99)
                  << (r.pass ? " ok" : " VIOLATION") << '\n';
        pass = pass && r.pass;
      }
      if (!pass) return kExitBoundViolation;
    } else if (*analyze) {
      const auto canvas = safa::read_safa(canvas_path);
      safa::AnalysisOptions analysis;
      analysis.bins = bins;
      if (!analyze_config.empty()) {
        const auto cfg = safa::load_config(analyze_config);
        subview_width = cfg.subview_width;
        overlap_rate = cfg.overlap_rate;
        circular = cfg.circular;
        analysis = cfg.analysis;
      }
      const auto layout =
          safa::build_layout(canvas.width(), subview_width, overlap_rate, circular);
      safa::analyze_canvas(canvas, layout, analysis, analyze_out);
      std::cout << "wrote " << analyze_out << '\n';
    }
  } catch (const safa::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const safa::GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const safa::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
