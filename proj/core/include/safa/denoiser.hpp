#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "safa/latent_map.hpp"
#include "safa/schedule.hpp"

namespace safa {

enum class DenoiserKind { GaussianScore, GmmScore, BandTexture };
enum class BandProfile { SpectrumLike, ImageLike, Flat };

// Isotropic clean distribution N(mean, variance I).
struct GaussianParams {
  double mean = 0.0;
  double variance = 1.0;
};

// Isotropic mixture; component k has mean means[k] + condition_shift * y.
struct GmmParams {
  std::vector<double> weights{0.5, 0.5};
  std::vector<double> means{-1.0, 1.0};
  double variance = 0.25;
  double condition_shift = 1.0;
};

// Column-local Gaussian texture: each (channel, column) height profile is
// N(mu_y, S) with S circulant, eigenvalues (scale (1 + |f| / corner)^-2)^2.
// mu_y is a per-condition styled band texture target.
struct BandTextureParams {
  BandProfile profile = BandProfile::SpectrumLike;
  double texture_scale = 12.0;
  double texture_corner = 0.05;
  double style_offset_sd = 1.0;
  double style_gain_sd = 0.2;
  std::uint64_t target_seed = 0;
};

struct DenoiserSpec {
  DenoiserKind kind = DenoiserKind::GaussianScore;
  GaussianParams gaussian{};
  GmmParams gmm{};
  BandTextureParams band{};
  std::int64_t condition = 0;
  // Accepted for parity with guided samplers; analytic scores ignore it.
  double guidance_scale = 3.5;
};

struct ScoreBound {
  double C = 10.0;
};

inline constexpr std::size_t kDefaultBins = 32;

// Profile values at the centers of `bins` radial annuli.
std::vector<double> band_profile(BandProfile profile, std::size_t bins = kDefaultBins);

// White noise shaped in frequency space by profile[radial_bin].
LatentMap band_texture_target(std::span<const double> profile, std::int64_t condition,
                              std::size_t channels, std::size_t height, std::size_t width,
                              std::uint64_t seed);

// Exact score of the VP-noised marginal of a DenoiserSpec's clean distribution.
class AnalyticDenoiser {
 public:
  AnalyticDenoiser(DenoiserSpec spec, Shape shape, BetaSchedule beta = {});

  const DenoiserSpec& spec() const { return spec_; }
  const Shape& shape() const { return shape_; }
  const BetaSchedule& beta() const { return beta_; }

  // Clean-data mean (BandTexture only; empty otherwise).
  const LatentMap& band_mean() const;

  LatentMap score(const LatentMap& x, double t, std::optional<ScoreBound> bound = {}) const;
  void score_into(std::span<const double> x, double t, std::optional<ScoreBound> bound,
                  std::span<double> out) const;
  double log_density(const LatentMap& x, double t) const;

  struct BandModel;

 private:
  void check_shape(std::size_t n) const;

  DenoiserSpec spec_;
  Shape shape_;
  BetaSchedule beta_;
  std::shared_ptr<const BandModel> band_;
};

inline LatentMap score(const AnalyticDenoiser& d, const LatentMap& x, double t,
                       std::optional<ScoreBound> bound = {}) {
  return d.score(x, t, bound);
}

// Radially rescales v in place so its norm is at most C.
void clip_to_norm(std::span<double> v, double C);

}  // namespace safa
