#pragma once

#include <cstddef>
#include <memory>

#include "adbar/types.hpp"

namespace adbar::detail {

/// fftw_malloc'd complex buffer.
class FftBuffer {
 public:
  FftBuffer() = default;
  explicit FftBuffer(std::size_t size);
  ~FftBuffer();
  FftBuffer(FftBuffer&& other) noexcept;
  FftBuffer& operator=(FftBuffer&& other) noexcept;
  FftBuffer(const FftBuffer&) = delete;
  FftBuffer& operator=(const FftBuffer&) = delete;

  Complex* data() { return data_; }
  const Complex* data() const { return data_; }
  std::size_t size() const { return size_; }
  Complex& operator[](std::size_t i) { return data_[i]; }
  const Complex& operator[](std::size_t i) const { return data_[i]; }

 private:
  Complex* data_ = nullptr;
  std::size_t size_ = 0;
};

/// Linear convolution of an n x n array with a kernel sampled at all
/// differences, via a zero-padded 2n x 2n cyclic FFT. Row transforms skip the
/// all-zero half of the padded array. Plans are created once; `convolve`
/// is safe to call concurrently with distinct work buffers.
class PaddedConvolver {
 public:
  /// kernel(dx, dy) for dx, dy in (-n, n); the result is
  /// out[i] = scale * sum_j kernel(i - j) f[j].
  template <class Kernel>
  PaddedConvolver(int n, Kernel&& kernel, double scale) : PaddedConvolver(n) {
    const int P = 2 * n;
    FftBuffer k(static_cast<std::size_t>(P) * P);
    for (int iy = 0; iy < P; ++iy) {
      const int dy = iy < n ? iy : iy - P;
      for (int ix = 0; ix < P; ++ix) {
        const int dx = ix < n ? ix : ix - P;
        k[static_cast<std::size_t>(iy) * P + ix] = (ix == n || iy == n) ? Complex{} : kernel(dx, dy);
      }
    }
    set_kernel(std::move(k), scale);
  }
  ~PaddedConvolver();

  int n() const { return n_; }
  FftBuffer make_work() const;

  /// f and out are n x n row-major; they may alias.
  void convolve(const Complex* f, Complex* out, FftBuffer& work) const;

 private:
  explicit PaddedConvolver(int n);
  void set_kernel(FftBuffer kernel, double scale);

  struct Plans;
  int n_;
  std::unique_ptr<Plans> plans_;
  FftBuffer kernel_hat_;
};

}  // namespace adbar::detail
