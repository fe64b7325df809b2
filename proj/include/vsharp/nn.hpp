#pragma once

#include "vsharp/ops.hpp"
#include "vsharp/random.hpp"

namespace vsharp {

struct Conv2dSpec {
  int stride = 1;
  int dilation = 1;
  int pad = 0;  // symmetric zero padding
};

/// 2D convolution, channels-last. x: [H,W,Ci], w: [kh,kw,Ci,Co], optional
/// bias [Co]. Cross-correlation orientation (the deep-learning convention).
template <typename T>
Var conv2d(Tape<T>& tp, Var x, Var w, Var b = Var{}, Conv2dSpec spec = {}) {
  const Tensor<T>& xv = tp.val(x);
  const Tensor<T>& wv = tp.val(w);
  if (xv.rank() != 3 || wv.rank() != 4) throw std::invalid_argument("conv2d: expected x [H,W,Ci], w [kh,kw,Ci,Co]");
  const int H = xv.dim(0), W = xv.dim(1), Ci = xv.dim(2);
  const int kh = wv.dim(0), kw = wv.dim(1), Co = wv.dim(3);
  if (wv.dim(2) != Ci)
    throw std::invalid_argument("conv2d: input channels " + std::to_string(Ci) + " do not match kernel " +
                                shape_str(wv.shape()));
  if (spec.stride < 1 || spec.dilation < 1 || spec.pad < 0) throw std::invalid_argument("conv2d: bad spec");
  if (b.valid()) {
    const Tensor<T>& bv = tp.val(b);
    if (bv.rank() != 1 || bv.dim(0) != Co) throw std::invalid_argument("conv2d: bias shape mismatch");
  }
  const int s = spec.stride, d = spec.dilation, p = spec.pad;
  const int Ho = (H + 2 * p - d * (kh - 1) - 1) / s + 1;
  const int Wo = (W + 2 * p - d * (kw - 1) - 1) / s + 1;
  if (Ho < 1 || Wo < 1) throw std::invalid_argument("conv2d: kernel larger than padded input");

  Tensor<T> out({Ho, Wo, Co});
  {
    const T* xd = xv.data();
    const T* wd = wv.data();
    const T* bd = b.valid() ? tp.val(b).data() : nullptr;
    T* od = out.data();
    for (int oy = 0; oy < Ho; ++oy) {
      for (int ox = 0; ox < Wo; ++ox) {
        T* acc = od + (std::int64_t(oy) * Wo + ox) * Co;
        if (bd)
          for (int co = 0; co < Co; ++co) acc[co] = bd[co];
        for (int ky = 0; ky < kh; ++ky) {
          const int iy = oy * s - p + ky * d;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int ix = ox * s - p + kx * d;
            if (ix < 0 || ix >= W) continue;
            const T* xr = xd + (std::int64_t(iy) * W + ix) * Ci;
            const T* wr = wd + (std::int64_t(ky) * kw + kx) * Ci * Co;
            for (int ci = 0; ci < Ci; ++ci) {
              const T xvv = xr[ci];
              const T* wp = wr + std::int64_t(ci) * Co;
              for (int co = 0; co < Co; ++co) acc[co] += xvv * wp[co];
            }
          }
        }
      }
    }
  }

  return tp.op(std::move(out), {x, w, b.valid() ? b : x},
               [x, w, b, H, W, Ci, kh, kw, Co, s, d, p, Ho, Wo](Tape<T>& t, const Tensor<T>& g) {
                 const bool need_x = t.requires_grad(x);
                 const bool need_w = t.requires_grad(w);
                 const bool need_b = b.valid() && t.requires_grad(b);
                 const T* xd = t.val(x).data();
                 const T* wd = t.val(w).data();
                 T* gx = need_x ? t.grad_buffer(x).data() : nullptr;
                 T* gw = need_w ? t.grad_buffer(w).data() : nullptr;
                 T* gb = need_b ? t.grad_buffer(b).data() : nullptr;
                 for (int oy = 0; oy < Ho; ++oy) {
                   for (int ox = 0; ox < Wo; ++ox) {
                     const T* gr = g.data() + (std::int64_t(oy) * Wo + ox) * Co;
                     if (gb)
                       for (int co = 0; co < Co; ++co) gb[co] += gr[co];
                     for (int ky = 0; ky < kh; ++ky) {
                       const int iy = oy * s - p + ky * d;
                       if (iy < 0 || iy >= H) continue;
                       for (int kx = 0; kx < kw; ++kx) {
                         const int ix = ox * s - p + kx * d;
                         if (ix < 0 || ix >= W) continue;
                         const std::int64_t xoff = (std::int64_t(iy) * W + ix) * Ci;
                         const std::int64_t woff = (std::int64_t(ky) * kw + kx) * Ci * Co;
                         if (gw) {
                           const T* xr = xd + xoff;
                           for (int ci = 0; ci < Ci; ++ci) {
                             const T xvv = xr[ci];
                             T* gwp = gw + woff + std::int64_t(ci) * Co;
                             for (int co = 0; co < Co; ++co) gwp[co] += xvv * gr[co];
                           }
                         }
                         if (gx) {
                           T* gxr = gx + xoff;
                           for (int ci = 0; ci < Ci; ++ci) {
                             const T* wp = wd + woff + std::int64_t(ci) * Co;
                             T acc = 0;
                             for (int co = 0; co < Co; ++co) acc += wp[co] * gr[co];
                             gxr[ci] += acc;
                           }
                         }
                       }
                     }
                   }
                 }
               });
}

/// 1x1 convolution (pointwise channel mix).
template <typename T>
Var conv1x1(Tape<T>& tp, Var x, Var w, Var b = Var{}) {
  const Tensor<T>& wv = tp.val(w);
  if (wv.rank() != 4 || wv.dim(0) != 1 || wv.dim(1) != 1)
    throw std::invalid_argument("conv1x1: kernel must be [1,1,Ci,Co]");
  return conv2d(tp, x, w, b, Conv2dSpec{});
}

/// Replication (edge) padding of a [H,W,C] tensor.
template <typename T>
Var replication_pad2d(Tape<T>& tp, Var a, int top, int bottom, int left, int right) {
  const Tensor<T>& v = tp.val(a);
  if (v.rank() != 3) throw std::invalid_argument("replication_pad2d: expected [H,W,C]");
  if (top < 0 || bottom < 0 || left < 0 || right < 0) throw std::invalid_argument("replication_pad2d: negative pad");
  const int H = v.dim(0), W = v.dim(1), C = v.dim(2);
  const int Ho = H + top + bottom, Wo = W + left + right;
  Tensor<T> out({Ho, Wo, C});
  for (int y = 0; y < Ho; ++y) {
    const int sy = std::clamp(y - top, 0, H - 1);
    for (int x = 0; x < Wo; ++x) {
      const int sx = std::clamp(x - left, 0, W - 1);
      for (int c = 0; c < C; ++c) out.at(y, x, c) = v.at(sy, sx, c);
    }
  }
  return tp.op(std::move(out), {a}, [a, top, left, H, W, C, Ho, Wo](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (int y = 0; y < Ho; ++y) {
      const int sy = std::clamp(y - top, 0, H - 1);
      for (int x = 0; x < Wo; ++x) {
        const int sx = std::clamp(x - left, 0, W - 1);
        for (int c = 0; c < C; ++c) ga.at(sy, sx, c) += g.at(y, x, c);
      }
    }
  });
}

template <typename T>
Var replication_pad2d(Tape<T>& tp, Var a, int pad) {
  return replication_pad2d(tp, a, pad, pad, pad, pad);
}

/// 2x2 average pooling, stride 2. Requires even H and W.
template <typename T>
Var avgpool2(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  if (v.rank() != 3) throw std::invalid_argument("avgpool2: expected [H,W,C]");
  const int H = v.dim(0), W = v.dim(1), C = v.dim(2);
  if (H % 2 || W % 2) throw std::invalid_argument("avgpool2: dims must be even, got " + shape_str(v.shape()));
  const int Ho = H / 2, Wo = W / 2;
  Tensor<T> out({Ho, Wo, C});
  for (int y = 0; y < Ho; ++y)
    for (int x = 0; x < Wo; ++x)
      for (int c = 0; c < C; ++c)
        out.at(y, x, c) = (v.at(2 * y, 2 * x, c) + v.at(2 * y, 2 * x + 1, c) + v.at(2 * y + 1, 2 * x, c) +
                           v.at(2 * y + 1, 2 * x + 1, c)) *
                          T(0.25);
  return tp.op(std::move(out), {a}, [a, Ho, Wo, C](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (int y = 0; y < Ho; ++y)
      for (int x = 0; x < Wo; ++x)
        for (int c = 0; c < C; ++c) {
          const T q = g.at(y, x, c) * T(0.25);
          ga.at(2 * y, 2 * x, c) += q;
          ga.at(2 * y, 2 * x + 1, c) += q;
          ga.at(2 * y + 1, 2 * x, c) += q;
          ga.at(2 * y + 1, 2 * x + 1, c) += q;
        }
  });
}

/// 2x bilinear upsampling with align-corners=false semantics (source
/// coordinate (o + 0.5)/2 - 0.5, edge-clamped).
template <typename T>
Var bilinear_upsample2(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  if (v.rank() != 3) throw std::invalid_argument("bilinear_upsample2: expected [H,W,C]");
  const int H = v.dim(0), W = v.dim(1), C = v.dim(2);
  const int Ho = 2 * H, Wo = 2 * W;
  auto src = [](int o) {
    // returns (i0, weight of i1)
    const double sc = (o + 0.5) / 2.0 - 0.5;
    const double fl = std::floor(sc);
    return std::pair<int, double>{int(fl), sc - fl};
  };
  Tensor<T> out({Ho, Wo, C});
  for (int y = 0; y < Ho; ++y) {
    auto [y0, wy] = src(y);
    const int y0c = std::clamp(y0, 0, H - 1), y1c = std::clamp(y0 + 1, 0, H - 1);
    for (int x = 0; x < Wo; ++x) {
      auto [x0, wx] = src(x);
      const int x0c = std::clamp(x0, 0, W - 1), x1c = std::clamp(x0 + 1, 0, W - 1);
      for (int c = 0; c < C; ++c) {
        const double v00 = v.at(y0c, x0c, c), v01 = v.at(y0c, x1c, c);
        const double v10 = v.at(y1c, x0c, c), v11 = v.at(y1c, x1c, c);
        out.at(y, x, c) =
            static_cast<T>((1 - wy) * ((1 - wx) * v00 + wx * v01) + wy * ((1 - wx) * v10 + wx * v11));
      }
    }
  }
  return tp.op(std::move(out), {a}, [a, H, W, C, Ho, Wo, src](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (int y = 0; y < Ho; ++y) {
      auto [y0, wy] = src(y);
      const int y0c = std::clamp(y0, 0, H - 1), y1c = std::clamp(y0 + 1, 0, H - 1);
      for (int x = 0; x < Wo; ++x) {
        auto [x0, wx] = src(x);
        const int x0c = std::clamp(x0, 0, W - 1), x1c = std::clamp(x0 + 1, 0, W - 1);
        for (int c = 0; c < C; ++c) {
          const T gv = g.at(y, x, c);
          ga.at(y0c, x0c, c) += static_cast<T>((1 - wy) * (1 - wx)) * gv;
          ga.at(y0c, x1c, c) += static_cast<T>((1 - wy) * wx) * gv;
          ga.at(y1c, x0c, c) += static_cast<T>(wy * (1 - wx)) * gv;
          ga.at(y1c, x1c, c) += static_cast<T>(wy * wx) * gv;
        }
      }
    }
  });
}

/// He-normal kernel init for relu networks: N(0, sqrt(2 / fan_in)).
template <typename T>
Tensor<T> he_normal(Shape wshape, Rng& rng) {
  if (wshape.size() != 4) throw std::invalid_argument("he_normal: expected [kh,kw,Ci,Co]");
  const double fan_in = double(wshape[0]) * wshape[1] * wshape[2];
  return normal_init<T>(std::move(wshape), 0.0, std::sqrt(2.0 / fan_in), rng);
}

}  // namespace vsharp
