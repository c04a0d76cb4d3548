#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace addcomb {

namespace detail {

inline std::mutex& fftwPlannerMutex() {
  static std::mutex m;
  return m;
}

class DftPlan {
 public:
  explicit DftPlan(std::size_t n) : n_(n) {
    in_ = fftw_alloc_complex(n);
    out_ = fftw_alloc_complex(n);
    std::lock_guard lock(fftwPlannerMutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  DftPlan(const DftPlan&) = delete;
  DftPlan& operator=(const DftPlan&) = delete;
  ~DftPlan() {
    {
      std::lock_guard lock(fftwPlannerMutex());
      fftw_destroy_plan(plan_);
    }
    fftw_free(in_);
    fftw_free(out_);
  }

  void run(std::span<const std::complex<double>> f, std::span<std::complex<double>> out) {
    for (std::size_t i = 0; i < n_; ++i) {
      in_[i][0] = f[i].real();
      in_[i][1] = f[i].imag();
    }
    fftw_execute(plan_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = {out_[i][0] * scale, out_[i][1] * scale};
  }

 private:
  std::size_t n_;
  fftw_complex* in_;
  fftw_complex* out_;
  fftw_plan plan_;
};

inline DftPlan& planFor(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<DftPlan>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DftPlan>(n);
  return *slot;
}

}  // namespace detail

/// Normalised transform f^(r) = E_x f(x) e(-r x / N) for every r in Z/N.
inline void dft(std::span<const std::complex<double>> f, std::span<std::complex<double>> out) {
  detail::planFor(f.size()).run(f, out);
}

inline std::vector<std::complex<double>> dft(std::span<const std::complex<double>> f) {
  std::vector<std::complex<double>> out(f.size());
  dft(f, out);
  return out;
}

/// e(theta) = exp(2 pi i theta).
inline std::complex<double> unitPhase(double theta) {
  constexpr double twoPi = 6.283185307179586476925286766559;
  return std::polar(1.0, twoPi * theta);
}

}  // namespace addcomb
