#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <memory>
#include <mutex>
#include <new>

namespace pseudorain::fft {
namespace {

// FFTW's planner is not reentrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

template <typename T>
std::unique_ptr<T[], FftwFree> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return std::unique_ptr<T[], FftwFree>(p);
}

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {}
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

std::size_t half_size(int h, int w) {
  return static_cast<std::size_t>(h) * static_cast<std::size_t>(w / 2 + 1);
}

}  // namespace

std::vector<Complex> forward_real(const std::vector<double>& data, int h, int w) {
  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  auto in = fftw_buffer<double>(n);
  auto out = fftw_buffer<fftw_complex>(half_size(h, w));
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_r2c_2d(h, w, in.get(), out.get(), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  std::copy(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(n), in.get());
  plan.execute();
  std::vector<Complex> result(half_size(h, w));
  for (std::size_t i = 0; i < result.size(); ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

std::vector<double> inverse_real(const std::vector<Complex>& spectrum, int h, int w) {
  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  auto in = fftw_buffer<fftw_complex>(half_size(h, w));
  auto out = fftw_buffer<double>(n);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_c2r_2d(h, w, in.get(), out.get(), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  for (std::size_t i = 0; i < half_size(h, w); ++i) {
    in[i][0] = spectrum[i].real();
    in[i][1] = spectrum[i].imag();
  }
  plan.execute();
  std::vector<double> result(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = out[i] * scale;
  return result;
}

std::vector<Complex> forward_full(const std::vector<double>& data, int h, int w) {
  const std::size_t n = static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  auto in = fftw_buffer<fftw_complex>(n);
  auto out = fftw_buffer<fftw_complex>(n);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_2d(h, w, in.get(), out.get(), FFTW_FORWARD, FFTW_ESTIMATE);
  }
  Plan plan(raw);
  for (std::size_t i = 0; i < n; ++i) {
    in[i][0] = data[i];
    in[i][1] = 0.0;
  }
  plan.execute();
  std::vector<Complex> result(n);
  for (std::size_t i = 0; i < n; ++i) result[i] = {out[i][0], out[i][1]};
  return result;
}

}  // namespace pseudorain::fft
