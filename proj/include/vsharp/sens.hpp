#pragma once

#include <functional>

#include "vsharp/masks.hpp"
#include "vsharp/mri.hpp"

namespace vsharp {

/// Initial sensitivity estimate from the ACS region of masked k-space:
/// per coil, keep only ACS samples, inverse-transform, and divide by the
/// RSS of the low-resolution images (eps-guarded). The result is smooth
/// and satisfies sum_k |C_k|^2 ~ 1 where the object has signal.
template <typename T>
Tensor<T> estimate_acs(const Tensor<T>& y_masked, const SamplingMask& mask, T eps = T(1e-9)) {
  detail::check_coils(y_masked, "estimate_acs");
  const int nc = y_masked.dim(0), H = y_masked.dim(1), W = y_masked.dim(2);
  if (mask.height != H || mask.width != W) throw std::invalid_argument("estimate_acs: mask size mismatch");
  if (mask.acs_row1 <= mask.acs_row0 || mask.acs_col1 <= mask.acs_col0)
    throw std::invalid_argument("estimate_acs: mask has an empty ACS region");

  Tensor<T> acs_ks(y_masked.shape());
  const std::int64_t plane = std::int64_t(H) * W;
  for (int k = 0; k < nc; ++k)
    for (int y = mask.acs_row0; y < mask.acs_row1; ++y)
      for (int x = mask.acs_col0; x < mask.acs_col1; ++x) {
        const std::int64_t i = (std::int64_t(k) * plane + std::int64_t(y) * W + x) * 2;
        acs_ks[i] = y_masked[i];
        acs_ks[i + 1] = y_masked[i + 1];
      }

  Tensor<T> low = ifft2c(acs_ks);
  std::vector<T> rss_low(static_cast<std::size_t>(plane), T(0));
  for (int k = 0; k < nc; ++k) {
    const T* p = low.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i)
      rss_low[static_cast<std::size_t>(i)] += p[2 * i] * p[2 * i] + p[2 * i + 1] * p[2 * i + 1];
  }
  for (auto& v : rss_low) v = std::sqrt(v);

  Tensor<T> est(y_masked.shape());
  for (int k = 0; k < nc; ++k) {
    const T* p = low.data() + std::int64_t(k) * plane * 2;
    T* o = est.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) {
      const T d = rss_low[static_cast<std::size_t>(i)] + eps;
      o[2 * i] = p[2 * i] / d;
      o[2 * i + 1] = p[2 * i + 1] / d;
    }
  }
  return est;
}

/// Tape op: renormalize coil maps so sum_k |C_k|^2 = 1 on support
/// (c_k / sqrt(s + eps) with s the per-pixel power sum).
template <typename T>
Var sens_normalize(Tape<T>& tp, Var sens, T eps = T(1e-9)) {
  const Tensor<T>& v = tp.val(sens);
  detail::check_coils(v, "sens_normalize");
  const int nc = v.dim(0);
  const std::int64_t plane = std::int64_t(v.dim(1)) * v.dim(2);
  std::vector<T> rinv(static_cast<std::size_t>(plane));
  for (std::int64_t i = 0; i < plane; ++i) {
    T s = 0;
    for (int k = 0; k < nc; ++k) {
      const T re = v[(std::int64_t(k) * plane + i) * 2];
      const T im = v[(std::int64_t(k) * plane + i) * 2 + 1];
      s += re * re + im * im;
    }
    rinv[static_cast<std::size_t>(i)] = T(1) / std::sqrt(s + eps);
  }
  Tensor<T> out(v.shape());
  for (int k = 0; k < nc; ++k)
    for (std::int64_t i = 0; i < plane; ++i) {
      const T r = rinv[static_cast<std::size_t>(i)];
      out[(std::int64_t(k) * plane + i) * 2] = v[(std::int64_t(k) * plane + i) * 2] * r;
      out[(std::int64_t(k) * plane + i) * 2 + 1] = v[(std::int64_t(k) * plane + i) * 2 + 1] * r;
    }
  return tp.op(std::move(out), {sens}, [sens, nc, plane, eps](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(sens)) return;
    const Tensor<T>& c = t.val(sens);
    Tensor<T>& gc = t.grad_buffer(sens);
    for (std::int64_t i = 0; i < plane; ++i) {
      T s = 0, D = 0;
      for (int k = 0; k < nc; ++k) {
        const std::int64_t off = (std::int64_t(k) * plane + i) * 2;
        s += c[off] * c[off] + c[off + 1] * c[off + 1];
        D += c[off] * g[off] + c[off + 1] * g[off + 1];
      }
      const T r = T(1) / std::sqrt(s + eps);
      const T r3 = r * r * r;
      for (int k = 0; k < nc; ++k) {
        const std::int64_t off = (std::int64_t(k) * plane + i) * 2;
        gc[off] += r * g[off] - r3 * D * c[off];
        gc[off + 1] += r * g[off + 1] - r3 * D * c[off + 1];
      }
    }
  });
}

/// Per-coil refinement network signature: [H,W,2] -> [H,W,2].
template <typename T>
using CoilNet = std::function<Var(Tape<T>&, Var)>;

/// Applies a shared refinement network to each coil of an initial estimate
/// and renormalizes. A null network refines by normalization alone.
template <typename T>
Var refine_sens(Tape<T>& tp, Var est, const CoilNet<T>& net, T eps = T(1e-9)) {
  const Tensor<T>& v = tp.val(est);
  detail::check_coils(v, "refine_sens");
  const int nc = v.dim(0);
  Var refined = est;
  if (net) {
    std::vector<Var> coils;
    coils.reserve(static_cast<std::size_t>(nc));
    for (int k = 0; k < nc; ++k) coils.push_back(net(tp, slice_axis0(tp, est, k)));
    refined = stack_axis0(tp, coils);
  }
  return sens_normalize(tp, refined, eps);
}

}  // namespace vsharp
