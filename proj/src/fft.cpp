#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace tneedlet::detail {

namespace {
// FFTW planning and plan destruction are not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, int n, int d, int sign) {
  std::vector<int> dims(std::size_t(d), n);
  // aligned scratch keeps the planner's codelet choice, and therefore the
  // rounding, independent of where the caller's vector happens to live
  std::unique_ptr<fftw_complex, decltype(&fftw_free)> scratch(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * data.size())), &fftw_free);
  if (!scratch) throw std::bad_alloc();
  auto* buffer = scratch.get();
  std::memcpy(buffer, data.data(), sizeof(fftw_complex) * data.size());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft(d, dims.data(), buffer, buffer, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  if (plan == nullptr) throw std::runtime_error("fftw: failed to create plan");
  fftw_execute(plan);
  std::memcpy(static_cast<void*>(data.data()), buffer, sizeof(fftw_complex) * data.size());
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

}  // namespace tneedlet::detail
