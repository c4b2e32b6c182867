#include "spinterf/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <numbers>

namespace spinterf::fft {

namespace {

// fftw planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(std::span<Complex> data, int sign) {
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    std::lock_guard lock(planner_mutex());
    // ESTIMATE and UNALIGNED keep the chosen algorithm, and so the output bits,
    // independent of timing and of where the allocator placed the buffer.
    plan_ = fftw_plan_dft_1d(static_cast<int>(data.size()), ptr, ptr, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

void forward(std::span<Complex> data) {
  if (data.empty()) return;
  Plan(data, FFTW_FORWARD).execute();
}

void inverse(std::span<Complex> data) {
  if (data.empty()) return;
  Plan(data, FFTW_BACKWARD).execute();
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

double angular_wavenumber(std::size_t index, std::size_t n, double dx) {
  const auto i = static_cast<long long>(index);
  const auto len = static_cast<long long>(n);
  const long long signed_index = i <= len / 2 ? i : i - len;
  return 2.0 * std::numbers::pi * static_cast<double>(signed_index) / (static_cast<double>(n) * dx);
}

}  // namespace spinterf::fft
