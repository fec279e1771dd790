#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace shearlab::detail {

namespace {

// FFTW's planner is not re-entrant; executing plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

std::shared_ptr<const Fft2D> Fft2D::get(int n_x, int n_y) {
  static std::mutex cache_mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Fft2D>> cache;
  std::lock_guard lock(cache_mutex);
  auto& slot = cache[{n_x, n_y}];
  if (!slot) slot = std::make_shared<Fft2D>(n_x, n_y);
  return slot;
}

Fft2D::Fft2D(int n_x, int n_y) : n_x_(n_x), n_y_(n_y) {
  std::lock_guard lock(planner_mutex());
  const auto n = static_cast<std::size_t>(n_x) * n_y;
  auto* a = fftw_alloc_complex(n);
  auto* b = fftw_alloc_complex(n);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_2d(n_x, n_y, a, b, FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft_2d(n_x, n_y, a, b, FFTW_BACKWARD, flags);
  fftw_free(a);
  fftw_free(b);
}

Fft2D::~Fft2D() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

void Fft2D::forward(const std::complex<double>* in, std::complex<double>* out) const {
  // FFTW's new-array execute takes non-const input; the transform does not
  // modify it for out-of-place plans.
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

void Fft2D::backward(const std::complex<double>* in, std::complex<double>* out) const {
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_),
                   reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace shearlab::detail
