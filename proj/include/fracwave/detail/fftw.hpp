#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>

namespace fracwave::detail {

// FFTW's planner and plan destruction are not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Real-to-complex / complex-to-real plan pair of a fixed length.
///
/// Plans are made with FFTW_ESTIMATE | FFTW_UNALIGNED so that they are
/// deterministic across runs and can be executed on any caller-owned buffer
/// through the new-array interface.
class RealFftPlans {
 public:
  explicit RealFftPlans(std::size_t n) : n_(n) {
    std::lock_guard lock(fftw_planner_mutex());
    double* real = fftw_alloc_real(n);
    fftw_complex* half = fftw_alloc_complex(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED | FFTW_PRESERVE_INPUT;
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, half, flags);
    // c2r cannot preserve its input in general; callers always pass scratch.
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), half, real, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(real);
    fftw_free(half);
  }

  ~RealFftPlans() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  RealFftPlans(const RealFftPlans&) = delete;
  RealFftPlans& operator=(const RealFftPlans&) = delete;

  std::size_t size() const { return n_; }

  /// Unnormalized forward transform; `out` holds n/2 + 1 coefficients.
  void forward(const double* in, std::complex<double>* out) const {
    fftw_execute_dft_r2c(forward_, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
  }

  /// Unnormalized inverse transform; destroys `in`.
  void backward(std::complex<double>* in, double* out) const {
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(in), out);
  }

 private:
  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace fracwave::detail
