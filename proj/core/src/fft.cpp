#include "fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include <fftw3.h>

namespace safa::detail {
namespace {

// Planning is not thread safe in FFTW; execution of an existing plan on new
// arrays is.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t h, std::size_t w, int sign) {
    std::lock_guard lock(mu_);
    auto key = std::make_tuple(h, w, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(h * w), out(h * w);
    fftw_plan p = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w),
                                   reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void execute(std::vector<std::complex<double>>& in, std::vector<std::complex<double>>& out,
             std::size_t h, std::size_t w, int sign) {
  fftw_plan p = cache().get(h, w, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
  for (auto& v : out) v *= scale;
}

}  // namespace

std::vector<std::complex<double>> fft2(std::span<const double> field, std::size_t height,
                                       std::size_t width) {
  std::vector<std::complex<double>> in(field.begin(), field.end());
  std::vector<std::complex<double>> out(in.size());
  execute(in, out, height, width, FFTW_FORWARD);
  return out;
}

std::vector<double> ifft2_real(std::span<const std::complex<double>> spectrum,
                               std::size_t height, std::size_t width) {
  std::vector<std::complex<double>> in(spectrum.begin(), spectrum.end());
  std::vector<std::complex<double>> out(in.size());
  execute(in, out, height, width, FFTW_BACKWARD);
  std::vector<double> re(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) re[i] = out[i].real();
  return re;
}

double fft_frequency(std::size_t k, std::size_t n) {
  const auto kk = static_cast<double>(k);
  const auto nn = static_cast<double>(n);
  return 2 * k < n ? kk / nn : (kk - nn) / nn;
}

}  // namespace safa::detail
