#pragma once

#include "vsharp/ops.hpp"

namespace vsharp {

// Parallel-MRI measurement operators. Shapes: image [H,W,2], coil
// sensitivities and k-space [nc,H,W,2], sampling mask [H,W] (binary,
// applied multiplicatively so domain shapes stay fixed).

namespace detail {

template <typename T>
void check_image(const Tensor<T>& img, const char* op) {
  if (img.rank() != 3 || img.dim(2) != 2)
    throw std::invalid_argument(std::string(op) + ": expected image [H,W,2], got " + shape_str(img.shape()));
}

template <typename T>
void check_coils(const Tensor<T>& t, const char* op) {
  if (t.rank() != 4 || t.dim(3) != 2)
    throw std::invalid_argument(std::string(op) + ": expected [nc,H,W,2], got " + shape_str(t.shape()));
}

template <typename T>
void check_coils_match(const Tensor<T>& coils, int H, int W, const char* op) {
  check_coils(coils, op);
  if (coils.dim(1) != H || coils.dim(2) != W)
    throw std::invalid_argument(std::string(op) + ": coil array " + shape_str(coils.shape()) +
                                " does not match image " + std::to_string(H) + "x" + std::to_string(W));
}

template <typename T>
void check_mask(const Tensor<T>& mask, int H, int W, const char* op) {
  if (mask.rank() != 2 || mask.dim(0) != H || mask.dim(1) != W)
    throw std::invalid_argument(std::string(op) + ": mask " + shape_str(mask.shape()) + " does not match " +
                                std::to_string(H) + "x" + std::to_string(W));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// raw operators
// ---------------------------------------------------------------------------

/// Coil expansion: per-coil images C_k * x.
template <typename T>
Tensor<T> expand(const Tensor<T>& img, const Tensor<T>& sens) {
  detail::check_image(img, "expand");
  const int H = img.dim(0), W = img.dim(1);
  detail::check_coils_match(sens, H, W, "expand");
  const int nc = sens.dim(0);
  const std::int64_t plane = std::int64_t(H) * W;
  Tensor<T> out(sens.shape());
  for (int k = 0; k < nc; ++k) {
    const T* c = sens.data() + std::int64_t(k) * plane * 2;
    T* o = out.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) {
      const T cr = c[2 * i], ci = c[2 * i + 1];
      const T xr = img[2 * i], xi = img[2 * i + 1];
      o[2 * i] = cr * xr - ci * xi;
      o[2 * i + 1] = cr * xi + ci * xr;
    }
  }
  return out;
}

/// SENSE combination: sum_k conj(C_k) * z_k.
template <typename T>
Tensor<T> reduce(const Tensor<T>& coil_imgs, const Tensor<T>& sens) {
  detail::check_coils(coil_imgs, "reduce");
  check_same_shape(coil_imgs, sens, "reduce");
  const int nc = sens.dim(0), H = sens.dim(1), W = sens.dim(2);
  const std::int64_t plane = std::int64_t(H) * W;
  Tensor<T> out({H, W, 2});
  for (int k = 0; k < nc; ++k) {
    const T* c = sens.data() + std::int64_t(k) * plane * 2;
    const T* z = coil_imgs.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) {
      const T cr = c[2 * i], ci = c[2 * i + 1];
      const T zr = z[2 * i], zi = z[2 * i + 1];
      out[2 * i] += cr * zr + ci * zi;
      out[2 * i + 1] += cr * zi - ci * zr;
    }
  }
  return out;
}

/// Multiplicative (zero-fill) application of a binary sampling mask.
template <typename T>
Tensor<T> apply_mask(const Tensor<T>& ks, const Tensor<T>& mask) {
  const int r = ks.rank();
  if ((r != 3 && r != 4) || ks.dim(r - 1) != 2)
    throw std::invalid_argument("apply_mask: expected [H,W,2] or [nc,H,W,2]");
  const int H = ks.dim(r - 3), W = ks.dim(r - 2);
  detail::check_mask(mask, H, W, "apply_mask");
  const int planes = r == 4 ? ks.dim(0) : 1;
  const std::int64_t plane = std::int64_t(H) * W;
  Tensor<T> out(ks.shape());
  for (int k = 0; k < planes; ++k) {
    const T* s = ks.data() + std::int64_t(k) * plane * 2;
    T* o = out.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) {
      const T m = mask[i];
      o[2 * i] = m * s[2 * i];
      o[2 * i + 1] = m * s[2 * i + 1];
    }
  }
  return out;
}

/// Forward measurement operator: mask o FFT o expand.
template <typename T>
Tensor<T> forward_op(const Tensor<T>& img, const Tensor<T>& sens, const Tensor<T>& mask) {
  return apply_mask(fft2c(expand(img, sens)), mask);
}

/// Adjoint operator: reduce o IFFT o mask.
template <typename T>
Tensor<T> adjoint_op(const Tensor<T>& ks, const Tensor<T>& sens, const Tensor<T>& mask) {
  return reduce(ifft2c(apply_mask(ks, mask)), sens);
}

/// Root-sum-of-squares magnitude image from (unmasked) k-space.
template <typename T>
Tensor<T> rss(const Tensor<T>& ks_full) {
  detail::check_coils(ks_full, "rss");
  Tensor<T> imgs = ifft2c(ks_full);
  const int nc = imgs.dim(0), H = imgs.dim(1), W = imgs.dim(2);
  const std::int64_t plane = std::int64_t(H) * W;
  Tensor<T> out({H, W});
  for (int k = 0; k < nc; ++k) {
    const T* z = imgs.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) out[i] += z[2 * i] * z[2 * i] + z[2 * i + 1] * z[2 * i + 1];
  }
  for (std::int64_t i = 0; i < plane; ++i) out[i] = std::sqrt(out[i]);
  return out;
}

/// Full (unmasked) k-space predicted from an image estimate: FFT o expand.
template <typename T>
Tensor<T> predict_kspace(const Tensor<T>& img, const Tensor<T>& sens) {
  return fft2c(expand(img, sens));
}

/// Normalizes coil maps so sum_k |C_k|^2 is 1 where the maps have support
/// and 0 elsewhere (eps-guarded division).
template <typename T>
Tensor<T> normalize_sens(const Tensor<T>& sens, T eps = T(1e-9)) {
  detail::check_coils(sens, "normalize_sens");
  const int nc = sens.dim(0), H = sens.dim(1), W = sens.dim(2);
  const std::int64_t plane = std::int64_t(H) * W;
  std::vector<T> ssq(static_cast<std::size_t>(plane), T(0));
  for (int k = 0; k < nc; ++k) {
    const T* c = sens.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i)
      ssq[static_cast<std::size_t>(i)] += c[2 * i] * c[2 * i] + c[2 * i + 1] * c[2 * i + 1];
  }
  Tensor<T> out(sens.shape());
  for (int k = 0; k < nc; ++k) {
    const T* c = sens.data() + std::int64_t(k) * plane * 2;
    T* o = out.data() + std::int64_t(k) * plane * 2;
    for (std::int64_t i = 0; i < plane; ++i) {
      const T r = T(1) / std::sqrt(ssq[static_cast<std::size_t>(i)] + eps);
      o[2 * i] = c[2 * i] * r;
      o[2 * i + 1] = c[2 * i + 1] * r;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// tape operators (differentiable in both the image and the coil maps)
// ---------------------------------------------------------------------------

template <typename T>
Var expand(Tape<T>& tp, Var img, Var sens) {
  const Tensor<T>& iv = tp.val(img);
  const Tensor<T>& cv = tp.val(sens);
  Tensor<T> out = expand(iv, cv);
  const int nc = cv.dim(0);
  const std::int64_t plane = std::int64_t(cv.dim(1)) * cv.dim(2);
  return tp.op(std::move(out), {img, sens}, [img, sens, nc, plane](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& c = t.val(sens);
    if (t.requires_grad(img)) {
      // image cotangent is the SENSE combination of the coil cotangents
      Tensor<T>& gi = t.grad_buffer(img);
      for (int k = 0; k < nc; ++k) {
        const T* cp = c.data() + std::int64_t(k) * plane * 2;
        const T* gp = g.data() + std::int64_t(k) * plane * 2;
        for (std::int64_t i = 0; i < plane; ++i) {
          const T cr = cp[2 * i], ci = cp[2 * i + 1];
          const T gr = gp[2 * i], gim = gp[2 * i + 1];
          gi[2 * i] += cr * gr + ci * gim;
          gi[2 * i + 1] += cr * gim - ci * gr;
        }
      }
    }
    if (t.requires_grad(sens)) {
      const Tensor<T>& x = t.val(img);
      Tensor<T>& gc = t.grad_buffer(sens);
      for (int k = 0; k < nc; ++k) {
        T* gcp = gc.data() + std::int64_t(k) * plane * 2;
        const T* gp = g.data() + std::int64_t(k) * plane * 2;
        for (std::int64_t i = 0; i < plane; ++i) {
          const T xr = x[2 * i], xi = x[2 * i + 1];
          const T gr = gp[2 * i], gim = gp[2 * i + 1];
          gcp[2 * i] += xr * gr + xi * gim;
          gcp[2 * i + 1] += xr * gim - xi * gr;
        }
      }
    }
  });
}

template <typename T>
Var reduce(Tape<T>& tp, Var coil_imgs, Var sens) {
  const Tensor<T>& zv = tp.val(coil_imgs);
  const Tensor<T>& cv = tp.val(sens);
  Tensor<T> out = reduce(zv, cv);
  const int nc = cv.dim(0);
  const std::int64_t plane = std::int64_t(cv.dim(1)) * cv.dim(2);
  return tp.op(std::move(out), {coil_imgs, sens}, [coil_imgs, sens, nc, plane](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& c = t.val(sens);
    if (t.requires_grad(coil_imgs)) {
      Tensor<T>& gz = t.grad_buffer(coil_imgs);
      for (int k = 0; k < nc; ++k) {
        const T* cp = c.data() + std::int64_t(k) * plane * 2;
        T* gzp = gz.data() + std::int64_t(k) * plane * 2;
        for (std::int64_t i = 0; i < plane; ++i) {
          const T cr = cp[2 * i], ci = cp[2 * i + 1];
          const T gr = g[2 * i], gim = g[2 * i + 1];
          gzp[2 * i] += cr * gr - ci * gim;
          gzp[2 * i + 1] += cr * gim + ci * gr;
        }
      }
    }
    if (t.requires_grad(sens)) {
      const Tensor<T>& z = t.val(coil_imgs);
      Tensor<T>& gc = t.grad_buffer(sens);
      for (int k = 0; k < nc; ++k) {
        const T* zp = z.data() + std::int64_t(k) * plane * 2;
        T* gcp = gc.data() + std::int64_t(k) * plane * 2;
        for (std::int64_t i = 0; i < plane; ++i) {
          const T zr = zp[2 * i], zi = zp[2 * i + 1];
          const T gr = g[2 * i], gim = g[2 * i + 1];
          // conjugate-linear in the maps: cotangent is z * conj(gout)
          gcp[2 * i] += zr * gr + zi * gim;
          gcp[2 * i + 1] += zi * gr - zr * gim;
        }
      }
    }
  });
}

template <typename T>
Var apply_mask(Tape<T>& tp, Var ks, const Tensor<T>& mask) {
  Tensor<T> out = apply_mask(tp.val(ks), mask);
  Tensor<T> m = mask;
  return tp.op(std::move(out), {ks}, [ks, m](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(ks)) return;
    t.add_grad(ks, apply_mask(g, m));
  });
}

template <typename T>
Var forward_op(Tape<T>& tp, Var img, Var sens, const Tensor<T>& mask) {
  return apply_mask(tp, fft2c(tp, expand(tp, img, sens)), mask);
}

template <typename T>
Var adjoint_op(Tape<T>& tp, Var ks, Var sens, const Tensor<T>& mask) {
  return reduce(tp, ifft2c(tp, apply_mask(tp, ks, mask)), sens);
}

template <typename T>
Var predict_kspace(Tape<T>& tp, Var img, Var sens) {
  return fft2c(tp, expand(tp, img, sens));
}

}  // namespace vsharp
