#include "safa/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "safa/errors.hpp"
#include "safa/rng.hpp"
#include "safa/stats.hpp"

namespace safa {
namespace {

struct Simpson {
  const BetaSchedule& beta;
  double t2;
  double tol;
  int max_depth;

  double f(double s) const { return std::exp(-0.5 * beta.integral(s, t2)) * beta.beta(s); }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double eps,
                 int depth) const {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
    if (depth >= max_depth) throw QuadratureError("adaptive Simpson did not converge");
    return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
  }
};

void check_inputs(const BoundInputs& in) {
  require_same_shape(in.x1, in.x2, "bound inputs");
  if (!(in.delta > 0.0 && in.delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  if (!(in.C.C >= 0.0)) throw DomainError("score bound C must be non-negative");
  if (!(in.t1 < in.t2)) throw DomainError("bound requires t1 < t2");
}

double bound_from_norm(const BoundInputs& in, double diff_norm) {
  const double s2 = sigma_sq(in.t2, in.t1, in.beta);
  const double I = drift_integral(in.t2, in.t1, in.beta);
  const double lead = diff_norm + 2.0 * in.C.C * I;
  return std::exp(s2) * lead * lead + 2.0 * s2 * chi_square_tail(in.x1.size(), in.delta);
}

}  // namespace

double drift_integral(double t2, double t1, const BetaSchedule& beta, double tolerance) {
  if (!(t1 < t2)) throw DomainError("drift_integral requires t1 < t2");
  Simpson s{beta, t2, tolerance, 50};
  const double fa = s.f(t1), fb = s.f(t2), fm = s.f(0.5 * (t1 + t2));
  const double whole = (t2 - t1) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = s.recurse(t1, t2, fa, fm, fb, whole, tolerance, 0);
  if (!std::isfinite(v)) throw QuadratureError("drift integral is not finite");
  return std::abs(v);
}

double chi_square_tail(std::size_t d, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  const double L = -std::log(delta);
  const double dd = static_cast<double>(d);
  return dd + 2.0 * std::sqrt(dd * L) + 2.0 * L;
}

double proposition_bound(const BoundInputs& in) {
  check_inputs(in);
  double d2 = 0.0;
  auto a = in.x1.data();
  auto b = in.x2.data();
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return bound_from_norm(in, std::sqrt(d2));
}

double corollary_bound(const BoundInputs& in) {
  check_inputs(in);
  if (!in.mask) throw DomainError("corollary_bound needs a swap mask");
  const SwapMask& m = *in.mask;
  if (m.rows() != in.x1.height() || m.cols() != in.x1.width()) {
    throw ShapeError("corollary_bound: mask does not match inputs");
  }
  double d2 = 0.0;
  for (std::size_t c = 0; c < in.x1.channels(); ++c) {
    for (std::size_t h = 0; h < in.x1.height(); ++h) {
      for (std::size_t w = 0; w < in.x1.width(); ++w) {
        if (m(h, w)) continue;
        const double d = in.x1(c, h, w) - in.x2(c, h, w);
        d2 += d * d;
      }
    }
  }
  return bound_from_norm(in, std::sqrt(d2));
}

std::string_view to_string(NoisePairing p) {
  return p == NoisePairing::Shared ? "shared" : "independent";
}

NoisePairing parse_noise_pairing(std::string_view text) {
  if (text == "shared") return NoisePairing::Shared;
  if (text == "independent") return NoisePairing::Independent;
  throw ConfigError("unknown noise pairing '" + std::string(text) + "'");
}

std::vector<double> simulate_pair_distances(const BoundInputs& in, const MonteCarloOptions& opt) {
  check_inputs(in);
  if (opt.trials < 100) throw DomainError("monte carlo validation needs at least 100 trials");
  if (opt.steps == 0) throw DomainError("monte carlo validation needs at least one step");
  LatentMap start1 = in.x1;
  LatentMap start2 = in.x2;
  if (in.mask) {
    require_same_shape(in.x_ref, in.x1, "reference start");
    start1 = reference_guided_merge(in.x_ref, in.x1, *in.mask);
    start2 = reference_guided_merge(in.x_ref, in.x2, *in.mask);
  }
  const AnalyticDenoiser denoiser(opt.denoiser, in.x1.shape(), in.beta);
  const std::size_t d = in.x1.size();
  const double dt = (in.t1 - in.t2) / static_cast<double>(opt.steps);
  std::vector<double> out(opt.trials);

  tbb::task_arena arena(opt.threads > 0 ? static_cast<int>(opt.threads)
                                        : tbb::task_arena::automatic);
  arena.execute([&] {
    tbb::parallel_for(std::size_t{0}, opt.trials, [&](std::size_t k) {
      std::mt19937_64 gen(derive_seed({opt.seed, tag(SeedTag::Trial), k}));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> y1(start1.data().begin(), start1.data().end());
      std::vector<double> y2(start2.data().begin(), start2.data().end());
      std::vector<double> s1(d), s2(d), z(d);
      for (std::size_t j = 0; j < opt.steps; ++j) {
        const double t = in.t2 + static_cast<double>(j) * dt;
        const double b = in.beta.beta(t);
        const double diffusion = std::sqrt(b * -dt);
        denoiser.score_into(y1, t, in.C, s1);
        denoiser.score_into(y2, t, in.C, s2);
        for (std::size_t i = 0; i < d; ++i) z[i] = normal(gen);
        for (std::size_t i = 0; i < d; ++i) {
          y1[i] += (-0.5 * b * y1[i] - b * s1[i]) * dt + diffusion * z[i];
        }
        if (opt.pairing == NoisePairing::Independent) {
          for (std::size_t i = 0; i < d; ++i) z[i] = normal(gen);
        }
        for (std::size_t i = 0; i < d; ++i) {
          y2[i] += (-0.5 * b * y2[i] - b * s2[i]) * dt + diffusion * z[i];
        }
      }
      double d2 = 0.0;
      for (std::size_t i = 0; i < d; ++i) d2 += (y1[i] - y2[i]) * (y1[i] - y2[i]);
      out[k] = d2;
    });
  });
  return out;
}

MonteCarloResult summarize_violations(std::span<const double> sq_distances, double bound) {
  MonteCarloResult r;
  r.trials = sq_distances.size();
  r.bound = bound;
  double s = 0.0;
  for (double v : sq_distances) {
    s += v;
    if (v > bound) ++r.violations;
  }
  r.mean_sq_distance = s / static_cast<double>(r.trials);
  r.violation_rate = static_cast<double>(r.violations) / static_cast<double>(r.trials);
  r.slack = bound - r.mean_sq_distance;
  r.upper_99 = clopper_pearson_upper(r.violations, r.trials, 0.99);
  return r;
}

MonteCarloResult monte_carlo_validate(const BoundInputs& in, const MonteCarloOptions& opt) {
  const double bound = (in.mask ? corollary_bound(in) : proposition_bound(in)) * opt.bound_scale;
  const auto sq = simulate_pair_distances(in, opt);
  return summarize_violations(sq, bound);
}

bool within_delta(const MonteCarloResult& r, double delta) { return r.upper_99 <= delta; }

}  // namespace safa
