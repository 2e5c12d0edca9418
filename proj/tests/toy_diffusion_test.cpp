#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "safa/denoiser.hpp"
#include "safa/errors.hpp"
#include "safa/rng.hpp"
#include "safa/sampler.hpp"
#include "safa/schedule.hpp"
#include "test_util.hpp"

using namespace safa;
using safa::testing::random_map;

namespace {

DenoiserSpec band_spec(BandProfile profile, std::int64_t condition = 1) {
  DenoiserSpec s;
  s.kind = DenoiserKind::BandTexture;
  s.band.profile = profile;
  s.band.target_seed = 42;
  s.condition = condition;
  return s;
}

DenoiserSpec gmm_spec(std::int64_t condition = 0) {
  DenoiserSpec s;
  s.kind = DenoiserKind::GmmScore;
  s.condition = condition;
  return s;
}

DenoiserSpec gaussian_spec(double mean, double variance) {
  DenoiserSpec s;
  s.kind = DenoiserKind::GaussianScore;
  s.gaussian = {mean, variance};
  return s;
}

// Central differences of log_density, one coordinate at a time.
LatentMap fd_score(const AnalyticDenoiser& d, const LatentMap& x, double t, double h) {
  LatentMap g(x.shape());
  LatentMap probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = probe.data()[i];
    probe.data()[i] = x0 + h;
    const double up = d.log_density(probe, t);
    probe.data()[i] = x0 - h;
    const double dn = d.log_density(probe, t);
    probe.data()[i] = x0;
    g.data()[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

double rel_err(const LatentMap& a, const LatentMap& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    den += b.data()[i] * b.data()[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace

TEST(BetaScheduleTest, ClosedFormAgainstQuadrature) {
  BetaSchedule b;
  for (double t1 : {0.0, 0.1, 0.2, 0.5}) {
    for (double t2 : {0.3, 0.6, 1.0}) {
      if (t2 <= t1) continue;
      const int n = 20000;
      double q = 0.0;
      for (int i = 0; i < n; ++i) {
        const double s = t1 + (t2 - t1) * (i + 0.5) / n;
        q += (0.1 + s * 19.9) * (t2 - t1) / n;
      }
      EXPECT_NEAR(sigma_sq(t2, t1, b), q, 1e-9);
    }
  }
}

TEST(BetaScheduleTest, AlphaBarMonotone) {
  DiffusionSchedule s(200);
  EXPECT_EQ(s.alpha_bar(0), 1.0);
  for (std::size_t k = 1; k <= 200; ++k) {
    EXPECT_LT(s.alpha_bar(k), s.alpha_bar(k - 1));
    EXPECT_GT(s.beta().beta(s.time(k)), 0.0);
  }
  EXPECT_NEAR(s.alpha_bar(200), std::exp(-(0.1 + 0.5 * 19.9)), 1e-15);
  EXPECT_THROW(s.alpha_bar(201), ScheduleError);
  EXPECT_THROW(DiffusionSchedule(0), ScheduleError);
}

TEST(BetaScheduleTest, SigmaDomain) {
  BetaSchedule b;
  EXPECT_THROW(sigma_sq(0.2, 0.3, b), DomainError);
  EXPECT_THROW(sigma_sq(0.2, 0.2, b), DomainError);
  EXPECT_THROW(sigma_sq(1.2, 0.2, b), DomainError);
}

TEST(Seeds, DerivationIsStableAndDistinct) {
  EXPECT_EQ(derive_seed({1, 2, 3}), derive_seed({1, 2, 3}));
  EXPECT_NE(derive_seed({1, 2, 3}), derive_seed({1, 2, 4}));
  EXPECT_NE(derive_seed({1, 2}), derive_seed({2, 1}));
  std::vector<double> a(16), b(16);
  fill_standard_normal(a, 7);
  fill_standard_normal(b, 7);
  EXPECT_EQ(a, b);
}

TEST(AnalyticScore, GaussianClosedForm) {
  AnalyticDenoiser d(gaussian_spec(0.7, 2.0), {1, 2, 3});
  const auto x = random_map(1, 2, 3, 1);
  const double t = 0.35;
  const double a = BetaSchedule{}.alpha_bar(t);
  const auto s = d.score(x, t);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_NEAR(s.data()[i], -(x.data()[i] - std::sqrt(a) * 0.7) / (a * 2.0 + 1 - a), 1e-14);
  }
}

TEST(AnalyticScore, BandTextureMatchesDenseCovariance) {
  const Shape shape{2, 8, 5};
  AnalyticDenoiser d(band_spec(BandProfile::SpectrumLike), shape);
  const auto& mu = d.band_mean();
  const double t = 0.4;
  const double a = BetaSchedule{}.alpha_bar(t);
  const auto H = static_cast<int>(shape.height);
  // Dense circulant covariance built from its spectrum.
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(H, H);
  for (int f = 0; f < H; ++f) {
    const double freq = std::min(f, H - f) / double(H);
    const double lam = std::pow(12.0 * std::pow(1.0 + freq / 0.05, -2.0), 2.0);
    for (int i = 0; i < H; ++i)
      for (int j = 0; j < H; ++j) S(i, j) += lam * std::cos(2 * std::numbers::pi * f * (i - j) / H) / H;
  }
  const Eigen::MatrixXd cov = a * S + (1 - a) * Eigen::MatrixXd::Identity(H, H);
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const auto x = random_map(2, 8, 5, 3);
  const auto s = d.score(x, t);
  for (std::size_t c = 0; c < shape.channels; ++c) {
    for (std::size_t w = 0; w < shape.width; ++w) {
      Eigen::VectorXd r(H);
      for (int h = 0; h < H; ++h) r(h) = x(c, h, w) - std::sqrt(a) * mu(c, h, w);
      const Eigen::VectorXd expect = -llt.solve(r);
      for (int h = 0; h < H; ++h) EXPECT_NEAR(s(c, h, w), expect(h), 1e-9 * (1 + std::abs(expect(h))));
    }
  }
}

TEST(AnalyticScore, FiniteDifferences) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> ut(0.02, 0.98);
  const Shape shape{1, 8, 4};
  const std::vector<AnalyticDenoiser> models{
      AnalyticDenoiser(gaussian_spec(0.3, 1.7), shape),
      AnalyticDenoiser(gmm_spec(1), shape),
      AnalyticDenoiser(band_spec(BandProfile::SpectrumLike), shape),
      AnalyticDenoiser(band_spec(BandProfile::ImageLike), shape),
  };
  for (const auto& d : models) {
    double worst = 0.0;
    for (int p = 0; p < 100; ++p) {
      const double t = ut(gen);
      const auto x = random_map(1, 8, 4, 1000 + p);
      worst = std::max(worst, rel_err(d.score(x, t), fd_score(d, x, t, 1e-4)));
    }
    EXPECT_LE(worst, 1e-4);
  }
}

TEST(AnalyticScore, BandTargetDependsOnCondition) {
  const Shape shape{2, 8, 8};
  AnalyticDenoiser a(band_spec(BandProfile::SpectrumLike, 1), shape);
  AnalyticDenoiser b(band_spec(BandProfile::SpectrumLike, 2), shape);
  AnalyticDenoiser c(band_spec(BandProfile::SpectrumLike, 1), shape);
  EXPECT_NE(a.band_mean(), b.band_mean());
  EXPECT_EQ(a.band_mean(), c.band_mean());
  const auto p = band_profile(BandProfile::ImageLike);
  for (std::size_t i = 1; i < p.size(); ++i) EXPECT_LT(p[i], p[i - 1]);
}

TEST(AnalyticScore, ClippingBoundsNorm) {
  AnalyticDenoiser d(gaussian_spec(0.0, 0.01), {1, 4, 4});
  const auto x = random_map(1, 4, 4, 2);
  const auto raw = d.score(x, 0.01);
  ASSERT_GT(raw.norm(), 3.0);
  const auto clipped = d.score(x, 0.01, ScoreBound{3.0});
  EXPECT_NEAR(clipped.norm(), 3.0, 1e-12);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    EXPECT_NEAR(clipped.data()[i] * raw.norm(), raw.data()[i] * 3.0, 1e-9);
  }
  EXPECT_EQ(d.score(x, 0.01, ScoreBound{0.0}).norm(), 0.0);
  EXPECT_THROW(d.score(x, 1.5), DomainError);
}

TEST(Ddim, ExactEpsilonInversion) {
  const DiffusionSchedule sched(200);
  const auto x0 = random_map(2, 4, 6, 8);
  const auto eps = random_map(2, 4, 6, 9);
  for (std::size_t k : {1u, 10u, 100u, 200u}) {
    const double a = sched.alpha_bar(k);
    LatentMap xk(x0.shape());
    for (std::size_t i = 0; i < xk.size(); ++i)
      xk.data()[i] = std::sqrt(a) * x0.data()[i] + std::sqrt(1 - a) * eps.data()[i];
    LatentMap x = xk;
    for (std::size_t j = k; j >= 1; --j) x = ddim_step(x, eps, j, j - 1, sched);
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x.data()[i] - x0.data()[i]));
    EXPECT_LE(worst, 1e-5) << "k=" << k;
    EXPECT_LE(rel_err(ddim_step(xk, eps, k, 0, sched), x0), 1e-9);
  }
  EXPECT_THROW(ddim_step(x0, eps, 3, 3, sched), ScheduleError);
}

TEST(Ddim, Deterministic) {
  const Shape shape{2, 8, 8};
  AnalyticDenoiser d(band_spec(BandProfile::SpectrumLike), shape);
  const auto init = random_map(2, 8, 8, 10);
  const DiffusionSchedule sched(30);
  EXPECT_EQ(sample_single_view(d, init, sched, 1), sample_single_view(d, init, sched, 1));
  const DiffusionSchedule em(30, {}, SamplerKind::EulerMaruyama);
  EXPECT_EQ(sample_single_view(d, init, em, 1), sample_single_view(d, init, em, 1));
  EXPECT_NE(sample_single_view(d, init, em, 1), sample_single_view(d, init, em, 2));
}

TEST(Ddim, GaussianTerminalStatistics) {
  const Shape shape{1, 2, 2};
  const double mean = 0.5, var = 2.0;
  AnalyticDenoiser d(gaussian_spec(mean, var), shape);
  const DiffusionSchedule sched(200);
  const int runs = 10000;
  Eigen::Vector4d m = Eigen::Vector4d::Zero();
  Eigen::Matrix4d s2 = Eigen::Matrix4d::Zero();
  for (int r = 0; r < runs; ++r) {
    const auto x = sample_single_view(d, random_map(1, 2, 2, derive_seed({77, std::uint64_t(r)})), sched);
    const Eigen::Map<const Eigen::Vector4d> v(x.data().data());
    m += v;
    s2 += v * v.transpose();
  }
  m /= runs;
  const Eigen::Matrix4d cov = s2 / runs - m * m.transpose();
  const Eigen::Vector4d m_ref = Eigen::Vector4d::Constant(mean);
  const Eigen::Matrix4d cov_ref = var * Eigen::Matrix4d::Identity();
  EXPECT_LE((m - m_ref).norm() / m_ref.norm(), 0.05);
  EXPECT_LE((cov - cov_ref).norm() / cov_ref.norm(), 0.05);
}

TEST(EulerMaruyama, ZeroScoreVarianceLaw) {
  // Near-zero score: an extremely wide Gaussian.
  AnalyticDenoiser d(gaussian_spec(0.0, 1e14), {1, 1, 4});
  const double t2 = 0.3, t1 = 0.2;
  const int steps = 1000, trials = 5000;
  const double dt = -(t2 - t1) / steps;
  std::vector<double> z(4);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> normal;
  double sum = 0.0, sum2 = 0.0;
  for (int r = 0; r < trials; ++r) {
    LatentMap x(1, 1, 4);
    for (int k = 0; k < steps; ++k) {
      for (double& v : z) v = normal(gen);
      x = em_reverse_step(x, t2 + k * dt, dt, d, std::nullopt, z);
    }
    for (double v : x.data()) {
      sum += v;
      sum2 += v * v;
    }
  }
  const double n = 4.0 * trials;
  const double var = sum2 / n - (sum / n) * (sum / n);
  const double s2 = sigma_sq(t2, t1, BetaSchedule{});
  // Exact reverse-time variance from a point start; to first order this is s2.
  const double expected = std::expm1(s2);
  const double se = expected * std::sqrt(2.0 / n);
  EXPECT_NEAR(var, expected, 3 * se);
  EXPECT_NEAR(expected, s2, s2 * s2);
}
