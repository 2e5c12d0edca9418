#include "safa/sampler.hpp"

#include <cmath>
#include <vector>

#include "safa/errors.hpp"
#include "safa/rng.hpp"

namespace safa {

LatentMap ddim_step(const LatentMap& x_k, const LatentMap& eps_hat, std::size_t k,
                    std::size_t k_prev, const DiffusionSchedule& schedule) {
  if (!(k > k_prev) || k > schedule.steps()) {
    throw ScheduleError("ddim_step requires T >= k > k_prev >= 0");
  }
  require_same_shape(x_k, eps_hat, "ddim_step");
  const double a = schedule.alpha_bar(k);
  const double ap = schedule.alpha_bar(k_prev);
  const double sa = std::sqrt(a), s1a = std::sqrt(1.0 - a);
  const double sap = std::sqrt(ap), s1ap = std::sqrt(1.0 - ap);
  LatentMap out(x_k.shape());
  auto x = x_k.data();
  auto e = eps_hat.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    const double x0 = (x[i] - s1a * e[i]) / sa;
    o[i] = sap * x0 + s1ap * e[i];
  }
  return out;
}

LatentMap eps_from_score(const LatentMap& score, std::size_t k, const DiffusionSchedule& schedule) {
  const double s1a = std::sqrt(1.0 - schedule.alpha_bar(k));
  LatentMap eps = score;
  for (double& v : eps.data()) v *= -s1a;
  return eps;
}

LatentMap denoise_one_step(const AnalyticDenoiser& denoiser, const LatentMap& x_k, std::size_t k,
                           const DiffusionSchedule& schedule, std::optional<ScoreBound> bound) {
  if (k == 0 || k > schedule.steps()) throw ScheduleError("denoise_one_step: invalid step index");
  const LatentMap s = denoiser.score(x_k, schedule.time(k), bound);
  return ddim_step(x_k, eps_from_score(s, k, schedule), k, k - 1, schedule);
}

LatentMap em_reverse_step(const LatentMap& x, double t, double dt,
                          const AnalyticDenoiser& denoiser, std::optional<ScoreBound> bound,
                          std::span<const double> noise_draw) {
  if (!(dt < 0.0)) throw DomainError("em_reverse_step runs backwards in time (dt < 0)");
  if (noise_draw.size() != x.size()) throw ShapeError("noise draw size mismatch");
  const double b = denoiser.beta().beta(t);
  LatentMap s = denoiser.score(x, t, bound);
  const double diffusion = std::sqrt(b * -dt);
  LatentMap out(x.shape());
  auto xi = x.data();
  auto si = s.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) {
    o[i] = xi[i] + (-0.5 * b * xi[i] - b * si[i]) * dt + diffusion * noise_draw[i];
  }
  return out;
}

LatentMap reverse_step(const AnalyticDenoiser& denoiser, const LatentMap& x_k, std::size_t k,
                       const DiffusionSchedule& schedule, std::optional<ScoreBound> bound,
                       std::uint64_t noise_seed) {
  if (schedule.sampler() == SamplerKind::DDIM) {
    return denoise_one_step(denoiser, x_k, k, schedule, bound);
  }
  if (k == 0 || k > schedule.steps()) throw ScheduleError("reverse_step: invalid step index");
  std::vector<double> z(x_k.size());
  fill_standard_normal(z, noise_seed);
  const double dt = -1.0 / static_cast<double>(schedule.steps());
  return em_reverse_step(x_k, schedule.time(k), dt, denoiser, bound, z);
}

LatentMap sample_single_view(const AnalyticDenoiser& denoiser, const LatentMap& initial,
                             const DiffusionSchedule& schedule, std::uint64_t seed,
                             std::uint64_t index, std::optional<ScoreBound> bound) {
  LatentMap x = initial;
  for (std::size_t k = schedule.steps(); k >= 1; --k) {
    x = reverse_step(denoiser, x, k, schedule, bound,
                     derive_seed({seed, tag(SeedTag::StepNoise), k, index}));
  }
  return x;
}

}  // namespace safa
