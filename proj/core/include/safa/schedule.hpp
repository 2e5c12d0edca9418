#pragma once

#include <cstddef>

namespace safa {

// Linear beta(t) = beta_min + t (beta_max - beta_min) on t in [0, 1].
struct BetaSchedule {
  double beta_min = 0.1;
  double beta_max = 20.0;

  double beta(double t) const { return beta_min + t * (beta_max - beta_min); }
  // Integral of beta over [a, b].
  double integral(double a, double b) const;
  // Cumulative signal coefficient exp(-integral(0, t)).
  double alpha_bar(double t) const;
};

enum class SamplerKind { DDIM, EulerMaruyama };

class DiffusionSchedule {
 public:
  DiffusionSchedule(std::size_t steps, BetaSchedule beta = {},
                    SamplerKind sampler = SamplerKind::DDIM);

  std::size_t steps() const { return steps_; }
  const BetaSchedule& beta() const { return beta_; }
  SamplerKind sampler() const { return sampler_; }

  double time(std::size_t k) const { return static_cast<double>(k) / static_cast<double>(steps_); }
  // Throws ScheduleError for k > steps.
  double alpha_bar(std::size_t k) const;

 private:
  std::size_t steps_;
  BetaSchedule beta_;
  SamplerKind sampler_;
};

// Accumulated diffusion variance over [t1, t2]; DomainError unless t1 < t2.
double sigma_sq(double t2, double t1, const BetaSchedule& beta);
inline double sigma_sq(double t2, double t1, const DiffusionSchedule& schedule) {
  return sigma_sq(t2, t1, schedule.beta());
}

}  // namespace safa
