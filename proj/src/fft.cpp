#include "fft.hpp"

#include <cstring>
#include <mutex>
#include <new>

#include <fftw3.h>

namespace adbar::detail {

namespace {
// The FFTW planner is not thread-safe.
std::mutex planner_mutex;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }
}  // namespace

FftBuffer::FftBuffer(std::size_t size) : size_(size) {
  data_ = static_cast<Complex*>(fftw_malloc(sizeof(Complex) * size));
  if (data_ == nullptr && size > 0) throw std::bad_alloc();
  std::memset(static_cast<void*>(data_), 0, sizeof(Complex) * size);
}

FftBuffer::~FftBuffer() { fftw_free(data_); }

FftBuffer::FftBuffer(FftBuffer&& other) noexcept : data_(other.data_), size_(other.size_) {
  other.data_ = nullptr;
  other.size_ = 0;
}

FftBuffer& FftBuffer::operator=(FftBuffer&& other) noexcept {
  if (this != &other) {
    fftw_free(data_);
    data_ = other.data_;
    size_ = other.size_;
    other.data_ = nullptr;
    other.size_ = 0;
  }
  return *this;
}

struct PaddedConvolver::Plans {
  fftw_plan rows_fwd = nullptr;  // first n rows, length 2n
  fftw_plan rows_bwd = nullptr;
  fftw_plan cols_fwd = nullptr;  // all 2n columns, length 2n
  fftw_plan cols_bwd = nullptr;
  fftw_plan full_fwd = nullptr;  // kernel only

  ~Plans() {
    std::lock_guard lock(planner_mutex);
    for (fftw_plan p : {rows_fwd, rows_bwd, cols_fwd, cols_bwd, full_fwd})
      if (p) fftw_destroy_plan(p);
  }
};

PaddedConvolver::PaddedConvolver(int n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 1) throw ConfigError("convolution grid must be non-empty");
  const int P = 2 * n;
  FftBuffer scratch(static_cast<std::size_t>(P) * P);
  fftw_complex* a = as_fftw(scratch.data());
  const int len[1] = {P};
  std::lock_guard lock(planner_mutex);
  plans_->rows_fwd = fftw_plan_many_dft(1, len, n, a, nullptr, 1, P, a, nullptr, 1, P,
                                        FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->rows_bwd = fftw_plan_many_dft(1, len, n, a, nullptr, 1, P, a, nullptr, 1, P,
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
  plans_->cols_fwd = fftw_plan_many_dft(1, len, P, a, nullptr, P, 1, a, nullptr, P, 1,
                                        FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->cols_bwd = fftw_plan_many_dft(1, len, P, a, nullptr, P, 1, a, nullptr, P, 1,
                                        FFTW_BACKWARD, FFTW_ESTIMATE);
  plans_->full_fwd = fftw_plan_dft_2d(P, P, a, a, FFTW_FORWARD, FFTW_ESTIMATE);
  if (!plans_->rows_fwd || !plans_->rows_bwd || !plans_->cols_fwd || !plans_->cols_bwd ||
      !plans_->full_fwd)
    throw NumericalError("FFTW planning failed", 0.0);
}

PaddedConvolver::~PaddedConvolver() = default;

void PaddedConvolver::set_kernel(FftBuffer kernel, double scale) {
  fftw_execute_dft(plans_->full_fwd, as_fftw(kernel.data()), as_fftw(kernel.data()));
  const std::size_t P = 2 * static_cast<std::size_t>(n_);
  const double s = scale / static_cast<double>(P * P);
  for (std::size_t i = 0; i < kernel.size(); ++i) kernel[i] *= s;
  kernel_hat_ = std::move(kernel);
}

FftBuffer PaddedConvolver::make_work() const {
  const std::size_t P = 2 * static_cast<std::size_t>(n_);
  return FftBuffer(P * P);
}

void PaddedConvolver::convolve(const Complex* f, Complex* out, FftBuffer& work) const {
  const std::size_t n = n_;
  const std::size_t P = 2 * n;
  Complex* w = work.data();
  for (std::size_t iy = 0; iy < n; ++iy) {
    std::memcpy(static_cast<void*>(w + iy * P), f + iy * n, n * sizeof(Complex));
    std::memset(static_cast<void*>(w + iy * P + n), 0, n * sizeof(Complex));
  }
  std::memset(static_cast<void*>(w + n * P), 0, n * P * sizeof(Complex));

  fftw_execute_dft(plans_->rows_fwd, as_fftw(w), as_fftw(w));
  fftw_execute_dft(plans_->cols_fwd, as_fftw(w), as_fftw(w));
  for (std::size_t i = 0; i < P * P; ++i) w[i] *= kernel_hat_[i];
  fftw_execute_dft(plans_->cols_bwd, as_fftw(w), as_fftw(w));
  fftw_execute_dft(plans_->rows_bwd, as_fftw(w), as_fftw(w));

  for (std::size_t iy = 0; iy < n; ++iy)
    std::memcpy(static_cast<void*>(out + iy * n), w + iy * P, n * sizeof(Complex));
}

}  // namespace adbar::detail
