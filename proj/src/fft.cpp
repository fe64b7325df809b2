#include "vsharp/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace vsharp::detail {

namespace {

// FFTW plan creation is not thread-safe; execution of distinct plans is.
// Plans (with their work buffers) are cached per thread, creation serialized.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  fftw_plan plan = nullptr;
  fftw_complex* buf = nullptr;
  int n = 0;

  Plan(int H, int W, bool inverse) {
    n = H * W;
    buf = fftw_alloc_complex(static_cast<std::size_t>(n));
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft_2d(H, W, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
  }
  ~Plan() {
    if (plan) {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fftw_destroy_plan(plan);
    }
    if (buf) fftw_free(buf);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
};

Plan& get_plan(int H, int W, bool inverse) {
  thread_local std::map<std::tuple<int, int, bool>, std::unique_ptr<Plan>> cache;
  auto key = std::make_tuple(H, W, inverse);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<Plan>(H, W, inverse)).first;
  return *it->second;
}

}  // namespace

void dft2d_centered(const std::complex<double>* in, std::complex<double>* out, int H, int W, bool inverse) {
  Plan& p = get_plan(H, W, inverse);
  auto* buf = reinterpret_cast<std::complex<double>*>(p.buf);

  // pre-shift: move the array center to index 0
  const int cy = H / 2, cx = W / 2;
  for (int y = 0; y < H; ++y) {
    const int sy = (y + cy) % H;
    for (int x = 0; x < W; ++x) buf[y * W + x] = in[sy * W + (x + cx) % W];
  }

  fftw_execute(p.plan);

  // post-shift: move DC back to the array center; orthonormal scaling
  const double scale = 1.0 / std::sqrt(double(H) * double(W));
  const int dy = H - cy, dx = W - cx;
  for (int y = 0; y < H; ++y) {
    const int sy = (y + dy) % H;
    for (int x = 0; x < W; ++x) out[y * W + x] = buf[sy * W + (x + dx) % W] * scale;
  }
}

}  // namespace vsharp::detail
