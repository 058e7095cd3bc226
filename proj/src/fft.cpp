#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace mvsp::detail {

namespace {
// FFTW's planner is not thread-safe.
std::mutex planner_mutex;
}  // namespace

void fft_forward(std::span<cplx> data) {
  if (data.size() <= 1) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex);
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex);
  fftw_destroy_plan(plan);
}

std::vector<cplx> dct2(std::span<const cplx> in) {
  const std::size_t n = in.size();
  // Even/odd embedding: y[2m+1] = y[4N-2m-1] = x_m, zeros elsewhere.
  std::vector<cplx> y(4 * n, cplx{});
  for (std::size_t m = 0; m < n; ++m) {
    y[2 * m + 1] = in[m];
    y[4 * n - 2 * m - 1] = in[m];
  }
  fft_forward(y);
  y.resize(n);
  return y;
}

}  // namespace mvsp::detail
