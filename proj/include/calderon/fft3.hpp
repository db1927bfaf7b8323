#pragma once

#include <array>
#include <complex>
#include <vector>

#include <fftw3.h>

#include "calderon/errors.hpp"

namespace calderon {

/// Thin RAII wrapper around FFTW complex-to-complex 3D transforms, row-major
/// (last axis fastest). Plans use FFTW_ESTIMATE so planning is deterministic.
class Fft3 {
 public:
  explicit Fft3(const std::array<int, 3>& dims) : dims_(dims) {
    size_ = std::size_t(dims[0]) * dims[1] * dims[2];
    buf_ = fftw_alloc_complex(size_);
    if (!buf_) throw Error("Fft3: allocation failed");
    fwd_ = fftw_plan_dft_3d(dims[0], dims[1], dims[2], buf_, buf_, FFTW_FORWARD,
                            FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_3d(dims[0], dims[1], dims[2], buf_, buf_, FFTW_BACKWARD,
                            FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw Error("Fft3: planning failed");
  }
  ~Fft3() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::size_t size() const { return size_; }
  const std::array<int, 3>& dims() const { return dims_; }

  /// Unnormalized forward DFT: X_m = sum_j x_j exp(-2 pi i j.m / N).
  void forward(std::vector<std::complex<double>>& data) { run(fwd_, data); }
  /// Backward DFT scaled by 1/size, inverse of forward().
  void backward(std::vector<std::complex<double>>& data) {
    run(bwd_, data);
    const double scale = 1.0 / double(size_);
    for (auto& v : data) v *= scale;
  }

 private:
  void run(fftw_plan plan, std::vector<std::complex<double>>& data) {
    if (data.size() != size_) throw Error("Fft3: size mismatch");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_execute_dft(plan, ptr, ptr);
  }

  std::array<int, 3> dims_;
  std::size_t size_ = 0;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

/// Symmetric DFT frequency index: m in [-n/2, n/2).
inline int dft_frequency_index(int m, int n) { return (m < (n + 1) / 2) ? m : m - n; }

}  // namespace calderon
