#pragma once

// Thin RAII wrapper over FFTW's 2D complex transforms. Plans are created
// once per (n_x, n_y) with FFTW_ESTIMATE so that the chosen algorithm, and
// therefore the round-off pattern, is identical from run to run.

#include <complex>
#include <memory>
#include <vector>

namespace shearlab::detail {

class Fft2D {
 public:
  // Shared, thread-safe cache of plans keyed by shape.
  static std::shared_ptr<const Fft2D> get(int n_x, int n_y);

  Fft2D(int n_x, int n_y);
  ~Fft2D();
  Fft2D(const Fft2D&) = delete;
  Fft2D& operator=(const Fft2D&) = delete;

  // Unnormalised e^{-i} transform; in and out must not alias.
  void forward(const std::complex<double>* in, std::complex<double>* out) const;
  // Unnormalised e^{+i} transform; in and out must not alias.
  void backward(const std::complex<double>* in, std::complex<double>* out) const;

  [[nodiscard]] int n_x() const { return n_x_; }
  [[nodiscard]] int n_y() const { return n_y_; }

 private:
  int n_x_;
  int n_y_;
  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
};

}  // namespace shearlab::detail
