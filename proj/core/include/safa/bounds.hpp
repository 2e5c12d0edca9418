#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "safa/denoiser.hpp"
#include "safa/latent_map.hpp"
#include "safa/schedule.hpp"
#include "safa/swap_ops.hpp"

namespace safa {

struct BoundInputs {
  LatentMap x1;
  LatentMap x2;
  LatentMap x_ref;
  double t2 = 0.3;
  double t1 = 0.2;
  ScoreBound C{};
  double delta = 0.1;
  BetaSchedule beta{};
  // H x W mask broadcast over channels; mask = 1 takes the reference.
  std::optional<SwapMask> mask;
};

// |integral over [t1, t2] of exp(-sigma^2(t2 -> s) / 2) beta(s) ds| by
// adaptive Simpson.
double drift_integral(double t2, double t1, const BetaSchedule& beta, double tolerance = 1e-10);

// d + 2 sqrt(d L) + 2 L with L = -log(delta).
double chi_square_tail(std::size_t d, double delta);

// exp(s2) [||x1 - x2|| + 2 C I]^2 + 2 s2 tail(d, delta).
double proposition_bound(const BoundInputs& in);
// Same with ||(1 - W) * (x1 - x2)|| in place of ||x1 - x2||.
double corollary_bound(const BoundInputs& in);

enum class NoisePairing { Shared, Independent };

std::string_view to_string(NoisePairing p);
NoisePairing parse_noise_pairing(std::string_view text);

struct MonteCarloOptions {
  std::size_t trials = 10000;
  std::size_t steps = 1000;
  NoisePairing pairing = NoisePairing::Independent;
  std::uint64_t seed = 0;
  std::size_t threads = 0;
  // Score model; defaults to the standard normal clean distribution.
  DenoiserSpec denoiser{};
  // Multiplies the bound before comparison (harness self-test).
  double bound_scale = 1.0;
};

struct MonteCarloResult {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double violation_rate = 0.0;
  double mean_sq_distance = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // bound - mean_sq_distance
  double upper_99 = 0.0;
};

// Squared terminal distances of simulated reverse VP-SDE pairs. With a mask
// the starts are Swap(x_ref, x1) and Swap(x_ref, x2).
std::vector<double> simulate_pair_distances(const BoundInputs& in, const MonteCarloOptions& opt);

MonteCarloResult summarize_violations(std::span<const double> sq_distances, double bound);

MonteCarloResult monte_carlo_validate(const BoundInputs& in, const MonteCarloOptions& opt);

// Pass rule: one-sided 99% Clopper-Pearson upper limit of the rate <= delta.
bool within_delta(const MonteCarloResult& r, double delta);

}  // namespace safa
