#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "safa/denoiser.hpp"
#include "safa/latent_map.hpp"
#include "safa/schedule.hpp"

namespace safa {

// Deterministic DDIM (eta = 0) update from index k to k_prev.
LatentMap ddim_step(const LatentMap& x_k, const LatentMap& eps_hat, std::size_t k,
                    std::size_t k_prev, const DiffusionSchedule& schedule);

// eps = -sqrt(1 - alpha_bar_k) * score.
LatentMap eps_from_score(const LatentMap& score, std::size_t k, const DiffusionSchedule& schedule);

// One model evaluation followed by a DDIM step to k - 1.
LatentMap denoise_one_step(const AnalyticDenoiser& denoiser, const LatentMap& x_k, std::size_t k,
                           const DiffusionSchedule& schedule,
                           std::optional<ScoreBound> bound = {});

// x + [-beta x / 2 - beta s] dt + sqrt(beta |dt|) z with dt < 0.
LatentMap em_reverse_step(const LatentMap& x, double t, double dt,
                          const AnalyticDenoiser& denoiser, std::optional<ScoreBound> bound,
                          std::span<const double> noise_draw);

// One reverse step from index k to k - 1 with the schedule's sampler; the EM
// sampler draws its noise from noise_seed.
LatentMap reverse_step(const AnalyticDenoiser& denoiser, const LatentMap& x_k, std::size_t k,
                       const DiffusionSchedule& schedule, std::optional<ScoreBound> bound,
                       std::uint64_t noise_seed);

// Runs all T steps from `initial`. Step k of subview `index` uses noise seed
// derive_seed({seed, StepNoise, k, index}).
LatentMap sample_single_view(const AnalyticDenoiser& denoiser, const LatentMap& initial,
                             const DiffusionSchedule& schedule, std::uint64_t seed = 0,
                             std::uint64_t index = 0, std::optional<ScoreBound> bound = {});

}  // namespace safa
