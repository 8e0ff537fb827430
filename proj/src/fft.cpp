#include "sfode/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace sfode {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(std::vector<std::complex<double>>& data, int sign) {
  const auto n = static_cast<int>(data.size());
  if (n <= 1) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace

void dft_forward(std::vector<std::complex<double>>& data) { transform(data, FFTW_FORWARD); }
void dft_backward(std::vector<std::complex<double>>& data) { transform(data, FFTW_BACKWARD); }

}  // namespace sfode
