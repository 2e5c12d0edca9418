#include <gtest/gtest.h>

#include <cmath>

#include "safa/bounds.hpp"
#include "safa/errors.hpp"
#include "test_util.hpp"

using namespace safa;
using safa::testing::random_map;

namespace {

BoundInputs fixture(std::size_t h, std::size_t w, std::uint64_t seed, double C = 10.0,
                    double delta = 0.1) {
  BoundInputs in;
  in.x1 = random_map(1, h, w, seed);
  in.x2 = random_map(1, h, w, seed + 1000);
  in.x_ref = random_map(1, h, w, seed + 2000);
  in.C = ScoreBound{C};
  in.delta = delta;
  return in;
}

double sq_dist(const LatentMap& a, const LatentMap& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
  return s;
}

}  // namespace

TEST(DriftIntegral, MatchesClosedForm) {
  const BetaSchedule b;
  for (auto [t2, t1] : {std::pair{0.3, 0.2}, {1.0, 0.0}, {0.6, 0.59}, {0.9, 0.1}}) {
    const double s2 = sigma_sq(t2, t1, b);
    EXPECT_NEAR(drift_integral(t2, t1, b), 2.0 * (1.0 - std::exp(-0.5 * s2)), 1e-10);
  }
  EXPECT_THROW(drift_integral(0.2, 0.3, b), DomainError);
}

TEST(ChiSquareTail, Formula) {
  const double L = -std::log(0.01);
  EXPECT_DOUBLE_EQ(chi_square_tail(64, 0.01), 64 + 2 * std::sqrt(64 * L) + 2 * L);
  EXPECT_THROW(chi_square_tail(4, 0.0), DomainError);
  EXPECT_THROW(chi_square_tail(4, 1.0), DomainError);
}

TEST(PropositionBound, ZeroVarianceLimit) {
  auto in = fixture(2, 4, 1);
  in.beta = BetaSchedule{0.0, 0.0};
  EXPECT_NEAR(proposition_bound(in), sq_dist(in.x1, in.x2), 1e-12);
  in.beta = BetaSchedule{};
  in.t1 = 0.2;
  in.t2 = 0.2 + 1e-13;
  EXPECT_NEAR(proposition_bound(in), sq_dist(in.x1, in.x2), 1e-9);
}

TEST(PropositionBound, ClosedFormValue) {
  const auto in = fixture(1, 4, 2, 3.0, 0.05);
  const double s2 = sigma_sq(0.3, 0.2, BetaSchedule{});
  const double I = 2.0 * (1.0 - std::exp(-0.5 * s2));
  const double lead = std::sqrt(sq_dist(in.x1, in.x2)) + 2.0 * 3.0 * I;
  const double L = -std::log(0.05);
  const double expect = std::exp(s2) * lead * lead + 2 * s2 * (4 + 2 * std::sqrt(4 * L) + 2 * L);
  EXPECT_NEAR(proposition_bound(in), expect, 1e-10 * expect);
}

TEST(PropositionBound, Monotone) {
  const auto base = fixture(2, 4, 3);
  const double b0 = proposition_bound(base);
  auto bigger_c = base;
  bigger_c.C = ScoreBound{20.0};
  EXPECT_GE(proposition_bound(bigger_c), b0);
  auto smaller_delta = base;
  smaller_delta.delta = 0.01;
  EXPECT_GE(proposition_bound(smaller_delta), b0);
  auto farther = base;
  for (std::size_t i = 0; i < farther.x2.size(); ++i)
    farther.x2.data()[i] = base.x1.data()[i] + 2.0 * (base.x2.data()[i] - base.x1.data()[i]);
  EXPECT_GE(proposition_bound(farther), b0);
  EXPECT_GE(b0, 0.0);
}

TEST(CorollaryBound, NeverExceedsProposition) {
  for (std::size_t h = 1; h <= 3; ++h) {
    for (std::size_t w = 1; w <= 4; ++w) {
      for (unsigned bits = 0; bits < (1u << (h * w)); ++bits) {
        std::vector<std::uint8_t> v(h * w);
        for (std::size_t k = 0; k < v.size(); ++k) v[k] = (bits >> k) & 1u;
        auto in = fixture(h, w, bits + 17 * h + w);
        in.mask = SwapMask(h, w, 1, Orientation::ColumnAlternating, v);
        const double cor = corollary_bound(in);
        ASSERT_LE(cor, proposition_bound(in));
        ASSERT_GE(cor, 0.0);
        if (bits == 0) ASSERT_DOUBLE_EQ(cor, proposition_bound(in));
      }
    }
  }
  auto in = fixture(2, 2, 1);
  EXPECT_THROW(corollary_bound(in), DomainError);
}

TEST(CorollaryBound, FullMaskLeavesOnlyNoiseTerms) {
  auto in = fixture(2, 3, 5, 0.0);
  in.mask = SwapMask::filled(2, 3, 1);
  const double s2 = sigma_sq(0.3, 0.2, BetaSchedule{});
  EXPECT_NEAR(corollary_bound(in), 2 * s2 * chi_square_tail(6, 0.1), 1e-12);
}

TEST(InputChecks, Rejected) {
  auto in = fixture(2, 2, 1);
  in.delta = 1.0;
  EXPECT_THROW(proposition_bound(in), DomainError);
  in = fixture(2, 2, 1);
  in.C = ScoreBound{-1.0};
  EXPECT_THROW(proposition_bound(in), DomainError);
  in = fixture(2, 2, 1);
  in.x2 = random_map(1, 2, 3, 1);
  EXPECT_THROW(proposition_bound(in), ShapeError);
}

TEST(MonteCarlo, SharedNoiseZeroScoreIsDeterministicContraction) {
  // Zero score with shared noise: the difference evolves deterministically
  // and grows by exp(s2 / 2) in norm.
  auto in = fixture(1, 4, 6, 0.0);
  MonteCarloOptions opt;
  opt.trials = 100;
  opt.steps = 1000;
  opt.pairing = NoisePairing::Shared;
  const auto d = simulate_pair_distances(in, opt);
  const double s2 = sigma_sq(0.3, 0.2, BetaSchedule{});
  for (double v : d) EXPECT_NEAR(v, std::exp(s2) * sq_dist(in.x1, in.x2), 1e-3 * v);
}

TEST(MonteCarlo, DeterministicAcrossThreads) {
  auto in = fixture(1, 4, 7);
  MonteCarloOptions opt;
  opt.trials = 200;
  opt.steps = 100;
  opt.seed = 3;
  opt.threads = 1;
  const auto a = simulate_pair_distances(in, opt);
  opt.threads = 4;
  EXPECT_EQ(a, simulate_pair_distances(in, opt));
}

TEST(MonteCarlo, WithinDeltaSmallRun) {
  for (auto pairing : {NoisePairing::Shared, NoisePairing::Independent}) {
    auto in = fixture(1, 4, 8);
    MonteCarloOptions opt;
    opt.trials = 1000;
    opt.steps = 200;
    opt.pairing = pairing;
    const auto r = monte_carlo_validate(in, opt);
    EXPECT_EQ(r.trials, 1000u);
    EXPECT_TRUE(within_delta(r, in.delta)) << to_string(pairing) << " rate " << r.violation_rate;
    EXPECT_NEAR(r.slack, r.bound - r.mean_sq_distance, 1e-12);
  }
}

TEST(MonteCarlo, HarnessDetectsShrunkenBound) {
  auto in = fixture(1, 4, 9);
  MonteCarloOptions opt;
  opt.trials = 1000;
  opt.steps = 100;
  opt.bound_scale = 0.01;
  const auto r = monte_carlo_validate(in, opt);
  EXPECT_FALSE(within_delta(r, in.delta));
}

TEST(MonteCarlo, MaskedStartsSwapReference) {
  auto in = fixture(2, 4, 10, 0.0);
  in.mask = make_swap_mask(2, 4, 1, Orientation::ColumnAlternating);
  MonteCarloOptions opt;
  opt.trials = 100;
  opt.steps = 100;
  opt.pairing = NoisePairing::Shared;
  const auto d = simulate_pair_distances(in, opt);
  double masked = 0.0;
  for (std::size_t h = 0; h < 2; ++h)
    for (std::size_t w = 0; w < 4; ++w)
      if (!(*in.mask)(h, w)) masked += std::pow(in.x1(0, h, w) - in.x2(0, h, w), 2);
  const double s2 = sigma_sq(0.3, 0.2, BetaSchedule{});
  EXPECT_NEAR(d.front(), std::exp(s2) * masked, 1e-2 * masked);
}

TEST(MonteCarlo, SummaryCounts) {
  const std::vector<double> d{0.5, 1.5, 2.5, 0.1};
  const auto r = summarize_violations(d, 1.0);
  EXPECT_EQ(r.violations, 2u);
  EXPECT_DOUBLE_EQ(r.violation_rate, 0.5);
  EXPECT_DOUBLE_EQ(r.mean_sq_distance, 1.15);
  EXPECT_THROW(parse_noise_pairing("both"), ConfigError);
}
