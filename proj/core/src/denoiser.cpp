#include "safa/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include <Eigen/Dense>

#include "fft.hpp"
#include "safa/errors.hpp"
#include "safa/rng.hpp"
#include "safa/spectrum.hpp"

namespace safa {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> band_profile(BandProfile profile, std::size_t bins) {
  const double r_max = std::sqrt(0.5);
  std::vector<double> p(bins);
  for (std::size_t i = 0; i < bins; ++i) {
    const double r = (static_cast<double>(i) + 0.5) / static_cast<double>(bins) * r_max;
    switch (profile) {
      case BandProfile::SpectrumLike: p[i] = std::pow(1.0 + r, -0.5); break;
      case BandProfile::ImageLike: p[i] = std::pow(1.0 + r / 0.02, -2.0); break;
      case BandProfile::Flat: p[i] = 1.0; break;
    }
  }
  return p;
}

LatentMap band_texture_target(std::span<const double> profile, std::int64_t condition,
                              std::size_t channels, std::size_t height, std::size_t width,
                              std::uint64_t seed) {
  if (profile.empty()) throw DomainError("band profile is empty");
  for (double v : profile) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("band profile must be non-negative");
  }
  LatentMap out(channels, height, width);
  fill_standard_normal(out.data(),
                       derive_seed({seed, tag(SeedTag::Target), static_cast<std::uint64_t>(condition)}));
  const auto bin = radial_bins(height, width, profile.size());
  const std::size_t plane = height * width;
  for (std::size_t c = 0; c < channels; ++c) {
    auto field = out.data().subspan(c * plane, plane);
    auto spec = detail::fft2(field, height, width);
    for (std::size_t i = 0; i < plane; ++i) spec[i] *= profile[bin[i]];
    const auto shaped = detail::ifft2_real(spec, height, width);
    std::copy(shaped.begin(), shaped.end(), field.begin());
  }
  return out;
}

void clip_to_norm(std::span<double> v, double C) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  const double n = std::sqrt(n2);
  if (n <= C) return;
  const double s = n > 0.0 ? C / n : 0.0;
  for (double& x : v) x *= s;
}

struct AnalyticDenoiser::BandModel {
  LatentMap mean;
  Eigen::MatrixXd Q;       // eigenvectors of the height covariance
  Eigen::VectorXd lambda;  // eigenvalues
};

namespace {

std::shared_ptr<const AnalyticDenoiser::BandModel> build_band_model(const DenoiserSpec& spec,
                                                                    const Shape& shape);

}  // namespace

AnalyticDenoiser::AnalyticDenoiser(DenoiserSpec spec, Shape shape, BetaSchedule beta)
    : spec_(std::move(spec)), shape_(shape), beta_(beta) {
  switch (spec_.kind) {
    case DenoiserKind::GaussianScore:
      if (!(spec_.gaussian.variance > 0.0)) {
        throw NumericalError("Gaussian covariance is not positive definite");
      }
      break;
    case DenoiserKind::GmmScore: {
      const auto& g = spec_.gmm;
      if (g.weights.empty() || g.weights.size() != g.means.size()) {
        throw DomainError("GMM needs one mean per weight");
      }
      const double total = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
      if (std::abs(total - 1.0) > 1e-9 ||
          std::any_of(g.weights.begin(), g.weights.end(), [](double w) { return w < 0.0; })) {
        throw DomainError("GMM weights must be non-negative and sum to 1");
      }
      if (!(g.variance > 0.0)) throw NumericalError("GMM covariance is not positive definite");
      break;
    }
    case DenoiserKind::BandTexture:
      if (shape_.size() == 0) throw ShapeError("BandTexture denoiser needs a shape");
      band_ = build_band_model(spec_, shape_);
      break;
  }
}

namespace {

std::shared_ptr<const AnalyticDenoiser::BandModel> build_band_model(const DenoiserSpec& spec,
                                                                    const Shape& shape) {
  const auto& p = spec.band;
  if (!(p.texture_scale > 0.0) || !(p.texture_corner > 0.0)) {
    throw DomainError("texture scale and corner must be positive");
  }
  auto model = std::make_shared<AnalyticDenoiser::BandModel>();
  const auto profile = band_profile(p.profile);
  LatentMap target = band_texture_target(profile, spec.condition, shape.channels, shape.height,
                                         shape.width, p.target_seed);

  std::mt19937_64 gen(
      derive_seed({p.target_seed, tag(SeedTag::Style), static_cast<std::uint64_t>(spec.condition)}));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> offset(shape.channels);
  for (double& o : offset) o = p.style_offset_sd * normal(gen);
  const double gain = std::exp(p.style_gain_sd * normal(gen));
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t h = 0; h < shape.height; ++h) {
      for (double& v : target.row(c, h)) v = offset[c] + gain * v;
    }
  }
  model->mean = std::move(target);

  // Circulant covariance along height with a low-pass texture spectrum.
  const std::size_t H = shape.height;
  std::vector<double> lam(H);
  for (std::size_t f = 0; f < H; ++f) {
    const double fy = std::abs(detail::fft_frequency(f, H));
    const double amp = p.texture_scale * std::pow(1.0 + fy / p.texture_corner, -2.0);
    lam[f] = amp * amp;
  }
  Eigen::MatrixXd S(H, H);
  for (std::size_t i = 0; i < H; ++i) {
    for (std::size_t j = 0; j < H; ++j) {
      double s = 0.0;
      for (std::size_t f = 0; f < H; ++f) {
        s += lam[f] * std::cos(2.0 * std::numbers::pi * static_cast<double>(f) *
                               (static_cast<double>(i) - static_cast<double>(j)) /
                               static_cast<double>(H));
      }
      S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s / static_cast<double>(H);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
    throw NumericalError("texture covariance decomposition failed");
  }
  model->Q = eig.eigenvectors();
  model->lambda = eig.eigenvalues();
  return model;
}

std::vector<double> gmm_component_means(const DenoiserSpec& spec) {
  std::vector<double> m(spec.gmm.means);
  for (double& v : m) v += spec.gmm.condition_shift * static_cast<double>(spec.condition);
  return m;
}

// Responsibilities and the common marginal variance of an isotropic GMM.
std::vector<double> gmm_log_terms(const DenoiserSpec& spec, std::span<const double> x, double a,
                                  double v) {
  const auto means = gmm_component_means(spec);
  const double sa = std::sqrt(a);
  std::vector<double> lt(means.size());
  for (std::size_t k = 0; k < means.size(); ++k) {
    double q = 0.0;
    for (double xi : x) {
      const double d = xi - sa * means[k];
      q += d * d;
    }
    lt[k] = (spec.gmm.weights[k] > 0.0 ? std::log(spec.gmm.weights[k])
                                       : -std::numeric_limits<double>::infinity()) -
            q / (2.0 * v);
  }
  return lt;
}

double log_sum_exp(std::span<const double> v) {
  const double m = *std::max_element(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

const LatentMap& AnalyticDenoiser::band_mean() const {
  static const LatentMap empty;
  return band_ ? band_->mean : empty;
}

void AnalyticDenoiser::check_shape(std::size_t n) const {
  if (spec_.kind == DenoiserKind::BandTexture && n != shape_.size()) {
    throw ShapeError("input does not match the denoiser shape");
  }
}

void AnalyticDenoiser::score_into(std::span<const double> x, double t,
                                  std::optional<ScoreBound> bound, std::span<double> out) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("score time must lie in [0, 1]");
  if (out.size() != x.size()) throw ShapeError("score output size mismatch");
  check_shape(x.size());
  const double a = beta_.alpha_bar(t);
  const double sa = std::sqrt(a);
  switch (spec_.kind) {
    case DenoiserKind::GaussianScore: {
      const double v = a * spec_.gaussian.variance + 1.0 - a;
      const double m = sa * spec_.gaussian.mean;
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = -(x[i] - m) / v;
      break;
    }
    case DenoiserKind::GmmScore: {
      const double v = a * spec_.gmm.variance + 1.0 - a;
      auto lt = gmm_log_terms(spec_, x, a, v);
      const double lse = log_sum_exp(lt);
      const auto means = gmm_component_means(spec_);
      double m = 0.0;
      for (std::size_t k = 0; k < lt.size(); ++k) m += std::exp(lt[k] - lse) * means[k];
      for (std::size_t i = 0; i < x.size(); ++i) out[i] = -(x[i] - sa * m) / v;
      break;
    }
    case DenoiserKind::BandTexture: {
      const auto H = static_cast<Eigen::Index>(shape_.height);
      const auto W = static_cast<Eigen::Index>(shape_.width);
      const Eigen::VectorXd inv =
          (a * band_->lambda.array() + (1.0 - a)).inverse().matrix();
      const std::size_t plane = shape_.height * shape_.width;
      for (std::size_t c = 0; c < shape_.channels; ++c) {
        Eigen::Map<const RowMatrix> X(x.data() + c * plane, H, W);
        Eigen::Map<const RowMatrix> M(band_->mean.data().data() + c * plane, H, W);
        Eigen::Map<RowMatrix> S(out.data() + c * plane, H, W);
        const RowMatrix proj = band_->Q.transpose() * (X - sa * M);
        S.noalias() = -(band_->Q * (inv.asDiagonal() * proj));
      }
      break;
    }
  }
  if (bound) clip_to_norm(out, bound->C);
}

LatentMap AnalyticDenoiser::score(const LatentMap& x, double t,
                                  std::optional<ScoreBound> bound) const {
  LatentMap out(x.shape());
  score_into(x.data(), t, bound, out.data());
  return out;
}

double AnalyticDenoiser::log_density(const LatentMap& x, double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("density time must lie in [0, 1]");
  check_shape(x.size());
  const double a = beta_.alpha_bar(t);
  const double sa = std::sqrt(a);
  const double n = static_cast<double>(x.size());
  const double log2pi = std::log(2.0 * std::numbers::pi);
  switch (spec_.kind) {
    case DenoiserKind::GaussianScore: {
      const double v = a * spec_.gaussian.variance + 1.0 - a;
      double q = 0.0;
      for (double xi : x.data()) {
        const double d = xi - sa * spec_.gaussian.mean;
        q += d * d;
      }
      return -0.5 * q / v - 0.5 * n * (log2pi + std::log(v));
    }
    case DenoiserKind::GmmScore: {
      const double v = a * spec_.gmm.variance + 1.0 - a;
      const auto lt = gmm_log_terms(spec_, x.data(), a, v);
      return log_sum_exp(lt) - 0.5 * n * (log2pi + std::log(v));
    }
    case DenoiserKind::BandTexture: {
      const auto H = static_cast<Eigen::Index>(shape_.height);
      const auto W = static_cast<Eigen::Index>(shape_.width);
      const Eigen::ArrayXd s = a * band_->lambda.array() + (1.0 - a);
      const std::size_t plane = shape_.height * shape_.width;
      double q = 0.0;
      for (std::size_t c = 0; c < shape_.channels; ++c) {
        Eigen::Map<const RowMatrix> X(x.data().data() + c * plane, H, W);
        Eigen::Map<const RowMatrix> M(band_->mean.data().data() + c * plane, H, W);
        const RowMatrix proj = band_->Q.transpose() * (X - sa * M);
        q += (proj.array().square().colwise() / s).sum();
      }
      const double columns = static_cast<double>(shape_.channels * shape_.width);
      return -0.5 * q - 0.5 * columns * s.log().sum() - 0.5 * n * log2pi;
    }
  }
  return 0.0;
}

}  // namespace safa
