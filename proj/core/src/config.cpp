#include "safa/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "safa/errors.hpp"
#include "safa/layout.hpp"
#include "safa/rng.hpp"

namespace safa {

using nlohmann::json;

std::string_view to_string(Orientation o) {
  return o == Orientation::ColumnAlternating ? "column" : "row";
}

Orientation parse_orientation(std::string_view text) {
  if (text == "column") return Orientation::ColumnAlternating;
  if (text == "row") return Orientation::RowAlternating;
  throw ConfigError("unknown orientation '" + std::string(text) + "' (column|row)");
}

std::string_view to_string(SamplerKind s) { return s == SamplerKind::DDIM ? "ddim" : "em"; }

SamplerKind parse_sampler(std::string_view text) {
  if (text == "ddim") return SamplerKind::DDIM;
  if (text == "em") return SamplerKind::EulerMaruyama;
  throw ConfigError("unknown sampler '" + std::string(text) + "' (ddim|em)");
}

std::string_view to_string(DenoiserKind k) {
  switch (k) {
    case DenoiserKind::GaussianScore: return "gaussian";
    case DenoiserKind::GmmScore: return "gmm";
    case DenoiserKind::BandTexture: return "band_texture";
  }
  return "?";
}

DenoiserKind parse_denoiser_kind(std::string_view text) {
  if (text == "gaussian") return DenoiserKind::GaussianScore;
  if (text == "gmm") return DenoiserKind::GmmScore;
  if (text == "band_texture") return DenoiserKind::BandTexture;
  throw ConfigError("unknown denoiser kind '" + std::string(text) + "'");
}

std::string_view to_string(BandProfile p) {
  switch (p) {
    case BandProfile::SpectrumLike: return "spectrum";
    case BandProfile::ImageLike: return "image";
    case BandProfile::Flat: return "flat";
  }
  return "?";
}

BandProfile parse_band_profile(std::string_view text) {
  if (text == "spectrum") return BandProfile::SpectrumLike;
  if (text == "image") return BandProfile::ImageLike;
  if (text == "flat") return BandProfile::Flat;
  throw ConfigError("unknown band profile '" + std::string(text) + "' (spectrum|image|flat)");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  c.denoiser.kind = DenoiserKind::BandTexture;
  return c;
}

void apply_fast_profile(ExperimentConfig& cfg) {
  cfg.channels = 4;
  cfg.height = 16;
  cfg.width = 160;
  cfg.subview_width = 40;
  cfg.overlap_rate = 0.25;
  cfg.steps = 50;
}

namespace {

// Reads a JSON object while rejecting keys that are never consumed.
class Section {
 public:
  Section(const json& j, std::string path, std::vector<std::string>& unknown)
      : j_(j), path_(std::move(path)), unknown_(unknown) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
    for (auto it = j_.begin(); it != j_.end(); ++it) unread_.insert(it.key());
  }
  Section(const Section&) = delete;
  Section& operator=(const Section&) = delete;

  ~Section() {
    for (const auto& k : unread_) unknown_.push_back(path_ + "." + k);
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!j_.contains(key)) return;
    unread_.erase(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void read_optional(const std::string& key, std::optional<T>& out) {
    if (!j_.contains(key)) return;
    if (j_.at(key).is_null()) {
      unread_.erase(key);
      out.reset();
      return;
    }
    T v{};
    read(key, v);
    out = v;
  }

  template <typename F>
  void read_string(const std::string& key, F&& parse) {
    if (!j_.contains(key)) return;
    std::string s;
    read(key, s);
    parse(s);
  }

  Section child(const std::string& key) {
    unread_.erase(key);
    return Section(j_.at(key), path_ + "." + key, unknown_);
  }

 private:
  const json& j_;
  std::string path_;
  std::vector<std::string>& unknown_;
  std::set<std::string> unread_;
};

void read_config(const json& root, ExperimentConfig& c, std::vector<std::string>& unknown) {
  Section top(root, "config", unknown);
  if (!top.has("seed")) throw ConfigError("config: 'seed' is mandatory");
  top.read("seed", c.seed);
  if (top.has("canvas")) {
    auto s = top.child("canvas");
    s.read("channels", c.channels);
    s.read("height", c.height);
    s.read("width", c.width);
  }
  if (top.has("layout")) {
    auto s = top.child("layout");
    s.read("subview_width", c.subview_width);
    s.read("overlap_rate", c.overlap_rate);
    s.read("circular", c.circular);
  }
  if (top.has("schedule")) {
    auto s = top.child("schedule");
    s.read("steps", c.steps);
    s.read("beta_min", c.beta.beta_min);
    s.read("beta_max", c.beta.beta_max);
    s.read_string("sampler", [&](const std::string& v) { c.sampler = parse_sampler(v); });
  }
  if (top.has("denoiser")) {
    auto s = top.child("denoiser");
    s.read_string("kind", [&](const std::string& v) { c.denoiser.kind = parse_denoiser_kind(v); });
    s.read("guidance_scale", c.denoiser.guidance_scale);
    s.read_optional("score_bound", c.score_bound);
    s.read("conditions", c.conditions);
    if (s.has("gaussian")) {
      auto g = s.child("gaussian");
      g.read("mean", c.denoiser.gaussian.mean);
      g.read("variance", c.denoiser.gaussian.variance);
    }
    if (s.has("gmm")) {
      auto g = s.child("gmm");
      g.read("weights", c.denoiser.gmm.weights);
      g.read("means", c.denoiser.gmm.means);
      g.read("variance", c.denoiser.gmm.variance);
      g.read("condition_shift", c.denoiser.gmm.condition_shift);
    }
    if (s.has("band_texture")) {
      auto b = s.child("band_texture");
      auto& p = c.denoiser.band;
      b.read_string("profile", [&](const std::string& v) { p.profile = parse_band_profile(v); });
      b.read("texture_scale", p.texture_scale);
      b.read("texture_corner", p.texture_corner);
      b.read("style_offset_sd", p.style_offset_sd);
      b.read("style_gain_sd", p.style_gain_sd);
      b.read_optional("target_seed", c.target_seed);
    }
  }
  if (top.has("merge")) {
    auto s = top.child("merge");
    s.read_string("mode", [&](const std::string& v) { c.mode = parse_merge_mode(v); });
    s.read("r_guide", c.r_guide);
    s.read("swap_interval", c.swap_interval);
    s.read_string("overlap_orientation",
                  [&](const std::string& v) { c.overlap_orientation = parse_orientation(v); });
    s.read_string("reference_orientation",
                  [&](const std::string& v) { c.reference_orientation = parse_orientation(v); });
  }
  if (top.has("output")) {
    auto s = top.child("output");
    s.read("dir", c.output_dir);
    s.read_optional("snapshot_stride", c.snapshot_stride);
  }
  if (top.has("analysis")) {
    auto s = top.child("analysis");
    s.read("spectrum", c.analysis.spectrum);
    s.read("seam", c.analysis.seam);
    s.read("cross_view", c.analysis.cross_view);
    s.read("bins", c.analysis.bins);
  }
  if (top.has("sweep")) {
    auto s = top.child("sweep");
    s.read("seeds", c.sweep.seeds);
  }
  if (top.has("bounds")) {
    auto s = top.child("bounds");
    auto& b = c.bounds;
    s.read("dims", b.dims);
    s.read("deltas", b.deltas);
    if (s.has("pairings")) {
      std::vector<std::string> names;
      s.read("pairings", names);
      b.pairings.clear();
      for (const auto& n : names) b.pairings.push_back(parse_noise_pairing(n));
    }
    s.read("trials", b.trials);
    s.read("steps", b.steps);
    s.read("t2", b.t2);
    s.read("t1", b.t1);
    s.read("score_bound", b.score_bound);
    s.read("separation", b.separation);
    s.read("masked", b.masked);
    s.read("swap_interval", b.swap_interval);
  }
}

void validate(const ExperimentConfig& c) {
  try {
    (void)to_run_config(c);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (c.analysis.bins < 4) throw ConfigError("analysis.bins must be >= 4");
  const auto& b = c.bounds;
  if (b.trials < 100) throw ConfigError("bounds.trials must be >= 100");
  if (b.steps == 0) throw ConfigError("bounds.steps must be >= 1");
  if (!(0.0 <= b.t1 && b.t1 < b.t2 && b.t2 <= 1.0)) {
    throw ConfigError("bounds requires 0 <= t1 < t2 <= 1");
  }
  if (!(b.score_bound >= 0.0)) throw ConfigError("bounds.score_bound must be >= 0");
  if (b.swap_interval == 0) throw ConfigError("bounds.swap_interval must be >= 1");
  for (std::size_t d : b.dims) {
    if (d == 0) throw ConfigError("bounds.dims entries must be positive");
  }
  for (double d : b.deltas) {
    if (!(d > 0.0 && d < 1.0)) throw ConfigError("bounds.deltas entries must lie in (0, 1)");
  }
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["canvas"] = {{"channels", c.channels}, {"height", c.height}, {"width", c.width}};
  j["layout"] = {{"subview_width", c.subview_width},
                 {"overlap_rate", c.overlap_rate},
                 {"circular", c.circular}};
  j["schedule"] = {{"steps", c.steps},
                   {"beta_min", c.beta.beta_min},
                   {"beta_max", c.beta.beta_max},
                   {"sampler", to_string(c.sampler)}};
  const auto& d = c.denoiser;
  j["denoiser"] = {
      {"kind", to_string(d.kind)},
      {"guidance_scale", d.guidance_scale},
      {"score_bound", c.score_bound ? json(*c.score_bound) : json(nullptr)},
      {"conditions", c.conditions},
      {"gaussian", {{"mean", d.gaussian.mean}, {"variance", d.gaussian.variance}}},
      {"gmm",
       {{"weights", d.gmm.weights},
        {"means", d.gmm.means},
        {"variance", d.gmm.variance},
        {"condition_shift", d.gmm.condition_shift}}},
      {"band_texture",
       {{"profile", to_string(d.band.profile)},
        {"texture_scale", d.band.texture_scale},
        {"texture_corner", d.band.texture_corner},
        {"style_offset_sd", d.band.style_offset_sd},
        {"style_gain_sd", d.band.style_gain_sd},
        {"target_seed", c.target_seed ? json(*c.target_seed) : json(nullptr)}}}};
  j["merge"] = {{"mode", to_string(c.mode)},
                {"r_guide", c.r_guide},
                {"swap_interval", c.swap_interval},
                {"overlap_orientation", to_string(c.overlap_orientation)},
                {"reference_orientation", to_string(c.reference_orientation)}};
  j["output"] = {{"dir", c.output_dir},
                 {"snapshot_stride", c.snapshot_stride ? json(*c.snapshot_stride) : json(nullptr)}};
  j["analysis"] = {{"spectrum", c.analysis.spectrum},
                   {"seam", c.analysis.seam},
                   {"cross_view", c.analysis.cross_view},
                   {"bins", c.analysis.bins}};
  j["sweep"] = {{"seeds", c.sweep.seeds}};
  std::vector<std::string> pairings;
  for (auto p : c.bounds.pairings) pairings.emplace_back(to_string(p));
  const auto& b = c.bounds;
  j["bounds"] = {{"dims", b.dims},         {"deltas", b.deltas},
                 {"pairings", pairings},   {"trials", b.trials},
                 {"steps", b.steps},       {"t2", b.t2},
                 {"t1", b.t1},             {"score_bound", b.score_bound},
                 {"separation", b.separation}, {"masked", b.masked},
                 {"swap_interval", b.swap_interval}};
  return j;
}

}  // namespace

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  ExperimentConfig c = default_config();
  std::vector<std::string> unknown;
  read_config(root, c, unknown);
  if (!unknown.empty()) throw ConfigError("unknown config key '" + unknown.front() + "'");
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::string to_canonical_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_canonical_json(cfg))));
  return buf;
}

RunConfig to_run_config(const ExperimentConfig& c, std::size_t threads) {
  RunConfig r;
  r.channels = c.channels;
  r.height = c.height;
  if (c.channels == 0 || c.height == 0 || c.width == 0) {
    throw ConfigError("canvas dimensions must be positive");
  }
  r.layout = build_layout(c.width, c.subview_width, c.overlap_rate, c.circular);
  if (c.steps == 0) throw ConfigError("schedule.steps must be >= 1");
  r.schedule = DiffusionSchedule(c.steps, c.beta, c.sampler);
  r.denoiser = c.denoiser;
  r.denoiser.band.target_seed = c.target_seed.value_or(derive_seed({c.seed, tag(SeedTag::Target)}));
  r.conditions = c.conditions;
  if (!r.conditions.empty() && r.conditions.size() != r.layout.count + 1) {
    throw ConfigError("denoiser.conditions needs " + std::to_string(r.layout.count + 1) +
                      " entries (reference first)");
  }
  r.mode = c.mode;
  if (!(c.r_guide >= 0.0 && c.r_guide <= 1.0)) throw ConfigError("merge.r_guide must lie in [0, 1]");
  r.r_guide = c.r_guide;
  if (c.swap_interval == 0) throw ConfigError("merge.swap_interval must be >= 1");
  r.swap_interval = c.swap_interval;
  r.overlap_orientation = c.overlap_orientation;
  r.reference_orientation = c.reference_orientation;
  const bool swap = c.mode == MergeMode::SaFa || c.mode == MergeMode::SaFaStar;
  if (swap && c.overlap_rate >= 0.5) {
    throw ConfigError("swap modes require overlap_rate < 0.5");
  }
  r.seed = c.seed;
  r.snapshot_stride = c.snapshot_stride.value_or(std::max<std::size_t>(1, c.steps / 10));
  if (c.score_bound) r.score_bound = ScoreBound{*c.score_bound};
  r.threads = threads;
  return r;
}

}  // namespace safa
