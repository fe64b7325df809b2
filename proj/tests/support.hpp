#pragma once

// Shared test utilities: independent oracles and the finite-difference
// gradient checker. Everything here is deliberately written as plain loops,
// independent of the library's implementation paths.

#include <complex>
#include <functional>
#include <vector>

#include "vsharp/mri.hpp"
#include "vsharp/random.hpp"
#include "vsharp/tape.hpp"
#include "vsharp/tensor.hpp"

namespace testsupport {

using vsharp::Shape;
using vsharp::Tensor;

/// Brute-force centered orthonormal 2D DFT (O(n^2) double-sum):
///   out[j] = 1/sqrt(HW) * sum_y in[y] * exp(-2*pi*i*(j-c)(y-c)/N) per axis,
/// with c = floor(N/2). `sign` = -1 forward, +1 inverse.
template <typename T>
Tensor<T> naive_dft2c(const Tensor<T>& in, int sign) {
  const int H = in.dim(0), W = in.dim(1);
  const int cy = H / 2, cx = W / 2;
  Tensor<T> out({H, W, 2});
  const double scale = 1.0 / std::sqrt(double(H) * double(W));
  for (int jy = 0; jy < H; ++jy)
    for (int jx = 0; jx < W; ++jx) {
      std::complex<double> acc = 0;
      for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
          const double phase =
              2.0 * M_PI * (double(jy - cy) * (y - cy) / H + double(jx - cx) * (x - cx) / W) * sign;
          const std::complex<double> w(std::cos(phase), std::sin(phase));
          acc += std::complex<double>(in.at(y, x, 0), in.at(y, x, 1)) * w;
        }
      out.at(jy, jx, 0) = static_cast<T>(acc.real() * scale);
      out.at(jy, jx, 1) = static_cast<T>(acc.imag() * scale);
    }
  return out;
}

template <typename T>
Tensor<T> random_tensor(Shape shape, vsharp::Rng& rng, double lo = -1.0, double hi = 1.0) {
  return vsharp::uniform_init<T>(std::move(shape), lo, hi, rng);
}

/// Random smooth-ish coil maps normalized so sum_k |C_k|^2 = 1 everywhere.
template <typename T>
Tensor<T> random_sens(int nc, int H, int W, vsharp::Rng& rng) {
  Tensor<T> raw = random_tensor<T>({nc, H, W, 2}, rng, -1.0, 1.0);
  // keep the per-pixel norm bounded away from zero before normalizing
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) raw.at(0, y, x, 0) += T(1.5);
  return vsharp::normalize_sens(raw, T(0));
}

/// Random binary mask tensor with the given keep probability (at least one
/// sample kept).
template <typename T>
Tensor<T> random_mask(int H, int W, double keep, vsharp::Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Tensor<T> m({H, W});
  bool any = false;
  for (std::int64_t i = 0; i < m.size(); ++i) {
    m[i] = u(rng) < keep ? T(1) : T(0);
    any = any || m[i] > T(0);
  }
  if (!any) m[0] = T(1);
  return m;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)}); }

inline double rel_diff(const Tensor<double>& a, const Tensor<double>& b) {
  double num = 0, den = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(1e-30, std::sqrt(den));
}

template <typename T>
double rel_diff_t(const Tensor<T>& a, const Tensor<T>& b) {
  double num = 0, den = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    const double d = double(a[i]) - double(b[i]);
    num += d * d;
    den += double(b[i]) * double(b[i]);
  }
  return std::sqrt(num) / std::max(1e-30, std::sqrt(den));
}

/// Central finite-difference check of every input coordinate against the
/// tape gradient. `build` constructs a scalar loss from leaf vars.
using LossBuilder = std::function<vsharp::Var(vsharp::Tape<double>&, const std::vector<vsharp::Var>&)>;

struct GradCheckResult {
  double max_rel_err = 0;
  int checked = 0;
};

inline GradCheckResult check_gradients(std::vector<Tensor<double>> inputs, const LossBuilder& build,
                                       double h = 1e-5) {
  auto eval = [&](const std::vector<Tensor<double>>& ins) {
    vsharp::Tape<double> tp;
    std::vector<vsharp::Var> vars;
    for (const auto& t : ins) vars.push_back(tp.leaf(t, false));
    return tp.val(build(tp, vars))[0];
  };

  vsharp::Tape<double> tp;
  std::vector<vsharp::Var> vars;
  for (const auto& t : inputs) vars.push_back(tp.leaf(t, true));
  vsharp::Var loss = build(tp, vars);
  tp.backward(loss);

  GradCheckResult res;
  for (std::size_t vi = 0; vi < inputs.size(); ++vi) {
    const Tensor<double>& g = tp.grad(vars[vi]);
    for (std::int64_t i = 0; i < inputs[vi].size(); ++i) {
      auto plus = inputs;
      auto minus = inputs;
      plus[vi][i] += h;
      minus[vi][i] -= h;
      const double fd = (eval(plus) - eval(minus)) / (2 * h);
      res.max_rel_err = std::max(res.max_rel_err, rel_err(g[i], fd));
      ++res.checked;
    }
  }
  return res;
}

}  // namespace testsupport
