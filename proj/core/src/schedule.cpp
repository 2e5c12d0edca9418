#include "safa/schedule.hpp"

#include <cmath>
#include <string>

#include "safa/errors.hpp"

namespace safa {

double BetaSchedule::integral(double a, double b) const {
  return beta_min * (b - a) + 0.5 * (beta_max - beta_min) * (b * b - a * a);
}

double BetaSchedule::alpha_bar(double t) const { return std::exp(-integral(0.0, t)); }

DiffusionSchedule::DiffusionSchedule(std::size_t steps, BetaSchedule beta, SamplerKind sampler)
    : steps_(steps), beta_(beta), sampler_(sampler) {
  if (steps_ == 0) throw ScheduleError("schedule needs at least one step");
  if (!(beta_.beta_min >= 0.0) || !(beta_.beta_max >= beta_.beta_min) ||
      !std::isfinite(beta_.beta_max)) {
    throw ScheduleError("beta schedule requires 0 <= beta_min <= beta_max");
  }
}

double DiffusionSchedule::alpha_bar(std::size_t k) const {
  if (k > steps_) {
    throw ScheduleError("step index " + std::to_string(k) + " exceeds T = " +
                        std::to_string(steps_));
  }
  return k == 0 ? 1.0 : beta_.alpha_bar(time(k));
}

double sigma_sq(double t2, double t1, const BetaSchedule& beta) {
  if (!(t1 < t2) || t1 < 0.0 || t2 > 1.0) {
    throw DomainError("sigma_sq requires 0 <= t1 < t2 <= 1");
  }
  return beta.integral(t1, t2);
}

}  // namespace safa
