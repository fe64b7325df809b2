#pragma once

#include <cmath>

#include "vsharp/fft.hpp"
#include "vsharp/tape.hpp"

namespace vsharp {

namespace detail {

template <typename T>
void check_complex(const Tensor<T>& t, const char* op) {
  if (t.rank() < 1 || t.dim(t.rank() - 1) != 2)
    throw std::invalid_argument(std::string(op) + ": expected trailing complex axis, got " + shape_str(t.shape()));
}

template <typename T>
void check_scalar(const Tensor<T>& t, const char* op) {
  if (t.size() != 1) throw std::invalid_argument(std::string(op) + ": expected scalar, got " + shape_str(t.shape()));
}

template <typename T>
T stable_softplus(T x) {
  if (x > T(30)) return x;
  if (x < T(-30)) return std::exp(x);
  return std::log1p(std::exp(x));
}

template <typename T>
T sigmoid(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// elementwise
// ---------------------------------------------------------------------------

template <typename T>
Var add(Tape<T>& tp, Var a, Var b) {
  check_same_shape(tp.val(a), tp.val(b), "add");
  Tensor<T> out = add(tp.val(a), tp.val(b));
  return tp.op(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    t.add_grad(a, g);
    t.add_grad(b, g);
  });
}

template <typename T>
Var sub(Tape<T>& tp, Var a, Var b) {
  check_same_shape(tp.val(a), tp.val(b), "sub");
  Tensor<T> out = sub(tp.val(a), tp.val(b));
  return tp.op(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    t.add_grad(a, g);
    if (t.requires_grad(b)) {
      Tensor<T>& gb = t.grad_buffer(b);
      for (std::int64_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

template <typename T>
Var mul(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& va = tp.val(a);
  const Tensor<T>& vb = tp.val(b);
  check_same_shape(va, vb, "mul");
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = va[i] * vb[i];
  return tp.op(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) {
      const Tensor<T>& vb2 = t.val(b);
      Tensor<T>& ga = t.grad_buffer(a);
      for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb2[i];
    }
    if (t.requires_grad(b)) {
      const Tensor<T>& va2 = t.val(a);
      Tensor<T>& gb = t.grad_buffer(b);
      for (std::int64_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va2[i];
    }
  });
}

template <typename T>
Var div(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& va = tp.val(a);
  const Tensor<T>& vb = tp.val(b);
  check_same_shape(va, vb, "div");
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = va[i] / vb[i];
  return tp.op(std::move(out), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& va2 = t.val(a);
    const Tensor<T>& vb2 = t.val(b);
    if (t.requires_grad(a)) {
      Tensor<T>& ga = t.grad_buffer(a);
      for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / vb2[i];
    }
    if (t.requires_grad(b)) {
      Tensor<T>& gb = t.grad_buffer(b);
      for (std::int64_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * va2[i] / (vb2[i] * vb2[i]);
    }
  });
}

template <typename T>
Var neg(Tape<T>& tp, Var a) {
  Tensor<T> out = scaled(tp.val(a), T(-1));
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
  });
}

template <typename T>
Var add_const(Tape<T>& tp, Var a, T c) {
  Tensor<T> out(tp.val(a).shape());
  const Tensor<T>& va = tp.val(a);
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = va[i] + c;
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) { t.add_grad(a, g); });
}

template <typename T>
Var mul_const(Tape<T>& tp, Var a, T c) {
  Tensor<T> out = scaled(tp.val(a), c);
  return tp.op(std::move(out), {a}, [a, c](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += c * g[i];
  });
}

/// relu'(0) := 0.
template <typename T>
Var relu(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = va[i] > T(0) ? va[i] : T(0);
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& va2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i)
      if (va2[i] > T(0)) ga[i] += g[i];
  });
}

template <typename T>
Var softplus(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = detail::stable_softplus(va[i]);
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& va2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] * detail::sigmoid(va2[i]);
  });
}

template <typename T>
Var sqrt(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = std::sqrt(va[i]);
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& va2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i] / (T(2) * std::sqrt(va2[i]));
  });
}

template <typename T>
Var recip(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  Tensor<T> out(va.shape());
  for (std::int64_t i = 0; i < va.size(); ++i) out[i] = T(1) / va[i];
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& va2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] -= g[i] / (va2[i] * va2[i]);
  });
}

// ---------------------------------------------------------------------------
// structure
// ---------------------------------------------------------------------------

template <typename T>
Var reshape(Tape<T>& tp, Var a, Shape s) {
  Tensor<T> out = tp.val(a).reshaped(std::move(s));
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += g[i];
  });
}

/// Element of a rank-1 tensor as a scalar node.
template <typename T>
Var index_at(Tape<T>& tp, Var v, int i) {
  const Tensor<T>& tv = tp.val(v);
  if (tv.rank() != 1 || i < 0 || i >= tv.dim(0)) throw std::invalid_argument("index_at: out of range");
  Tensor<T> out({1}, {tv[i]});
  return tp.op(std::move(out), {v}, [v, i](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(v)) return;
    t.grad_buffer(v)[i] += g[0];
  });
}

/// Concatenate [H,W,C_k] tensors along the channel axis.
template <typename T>
Var concat_channels(Tape<T>& tp, const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_channels: no inputs");
  const int H = tp.val(parts[0]).dim(0);
  const int W = tp.val(parts[0]).dim(1);
  int C = 0;
  std::vector<int> chans;
  for (Var p : parts) {
    const Tensor<T>& v = tp.val(p);
    if (v.rank() != 3 || v.dim(0) != H || v.dim(1) != W)
      throw std::invalid_argument("concat_channels: incompatible shape " + shape_str(v.shape()));
    chans.push_back(v.dim(2));
    C += v.dim(2);
  }
  Tensor<T> out({H, W, C});
  int off = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = tp.val(parts[k]);
    const int c = chans[k];
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int j = 0; j < c; ++j) out.at(y, x, off + j) = v.at(y, x, j);
    off += c;
  }
  std::vector<Var> ps = parts;
  return tp.op(std::move(out), ps, [ps, chans, H, W](Tape<T>& t, const Tensor<T>& g) {
    int o = 0;
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const int c = chans[k];
      if (t.requires_grad(ps[k])) {
        Tensor<T>& gp = t.grad_buffer(ps[k]);
        for (int y = 0; y < H; ++y)
          for (int x = 0; x < W; ++x)
            for (int j = 0; j < c; ++j) gp.at(y, x, j) += g.at(y, x, o + j);
      }
      o += c;
    }
  });
}

/// Spatial crop of a [H,W,C] tensor.
template <typename T>
Var crop2d(Tape<T>& tp, Var a, int y0, int x0, int h, int w) {
  const Tensor<T>& v = tp.val(a);
  if (v.rank() != 3) throw std::invalid_argument("crop2d: expected [H,W,C]");
  const int H = v.dim(0), W = v.dim(1), C = v.dim(2);
  if (y0 < 0 || x0 < 0 || h < 1 || w < 1 || y0 + h > H || x0 + w > W)
    throw std::invalid_argument("crop2d: window out of range");
  Tensor<T> out({h, w, C});
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < C; ++c) out.at(y, x, c) = v.at(y0 + y, x0 + x, c);
  return tp.op(std::move(out), {a}, [a, y0, x0, h, w, C](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (int c = 0; c < C; ++c) ga.at(y0 + y, x0 + x, c) += g.at(y, x, c);
  });
}

// ---------------------------------------------------------------------------
// reductions
// ---------------------------------------------------------------------------

template <typename T>
Var sum_all(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  T s = 0;
  for (std::int64_t i = 0; i < v.size(); ++i) s += v[i];
  return tp.op(Tensor<T>({1}, {s}), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += g[0];
  });
}

template <typename T>
Var mean_all(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  const T inv = T(1) / T(v.size());
  T s = 0;
  for (std::int64_t i = 0; i < v.size(); ++i) s += v[i];
  return tp.op(Tensor<T>({1}, {s * inv}), {a}, [a, inv](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * inv;
  });
}

template <typename T>
Var sum_sq(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  T s = 0;
  for (std::int64_t i = 0; i < v.size(); ++i) s += v[i] * v[i];
  return tp.op(Tensor<T>({1}, {s}), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& v2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += T(2) * g[0] * v2[i];
  });
}

/// Sum of |a_i| with subgradient sign(a), sign(0) := 0.
template <typename T>
Var sum_abs(Tape<T>& tp, Var a) {
  const Tensor<T>& v = tp.val(a);
  T s = 0;
  for (std::int64_t i = 0; i < v.size(); ++i) s += std::abs(v[i]);
  return tp.op(Tensor<T>({1}, {s}), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& v2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < ga.size(); ++i) {
      if (v2[i] > T(0))
        ga[i] += g[0];
      else if (v2[i] < T(0))
        ga[i] -= g[0];
    }
  });
}

template <typename T>
Var dot_sum(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& va = tp.val(a);
  const Tensor<T>& vb = tp.val(b);
  check_same_shape(va, vb, "dot_sum");
  T s = 0;
  for (std::int64_t i = 0; i < va.size(); ++i) s += va[i] * vb[i];
  return tp.op(Tensor<T>({1}, {s}), {a, b}, [a, b](Tape<T>& t, const Tensor<T>& g) {
    if (t.requires_grad(a)) {
      const Tensor<T>& vb2 = t.val(b);
      Tensor<T>& ga = t.grad_buffer(a);
      for (std::int64_t i = 0; i < ga.size(); ++i) ga[i] += g[0] * vb2[i];
    }
    if (t.requires_grad(b)) {
      const Tensor<T>& va2 = t.val(a);
      Tensor<T>& gb = t.grad_buffer(b);
      for (std::int64_t i = 0; i < gb.size(); ++i) gb[i] += g[0] * va2[i];
    }
  });
}

// ---------------------------------------------------------------------------
// scalar-tensor
// ---------------------------------------------------------------------------

/// s * a for a scalar node s.
template <typename T>
Var smul(Tape<T>& tp, Var s, Var a) {
  detail::check_scalar(tp.val(s), "smul");
  const T sv = tp.val(s)[0];
  Tensor<T> out = scaled(tp.val(a), sv);
  return tp.op(std::move(out), {s, a}, [s, a](Tape<T>& t, const Tensor<T>& g) {
    const T sv2 = t.val(s)[0];
    if (t.requires_grad(a)) {
      Tensor<T>& ga = t.grad_buffer(a);
      for (std::int64_t i = 0; i < g.size(); ++i) ga[i] += sv2 * g[i];
    }
    if (t.requires_grad(s)) {
      const Tensor<T>& va = t.val(a);
      T acc = 0;
      for (std::int64_t i = 0; i < g.size(); ++i) acc += va[i] * g[i];
      t.grad_buffer(s)[0] += acc;
    }
  });
}

/// a / s for a scalar node s.
template <typename T>
Var sdiv(Tape<T>& tp, Var a, Var s) {
  return smul(tp, recip(tp, s), a);
}

// ---------------------------------------------------------------------------
// complex (trailing axis of size 2)
// ---------------------------------------------------------------------------

template <typename T>
Var cmul(Tape<T>& tp, Var a, Var b) {
  const Tensor<T>& va = tp.val(a);
  const Tensor<T>& vb = tp.val(b);
  check_same_shape(va, vb, "cmul");
  detail::check_complex(va, "cmul");
  Tensor<T> out(va.shape());
  const std::int64_t n = va.size() / 2;
  for (std::int64_t i = 0; i < n; ++i) {
    const T ar = va[2 * i], ai = va[2 * i + 1];
    const T br = vb[2 * i], bi = vb[2 * i + 1];
    out[2 * i] = ar * br - ai * bi;
    out[2 * i + 1] = ar * bi + ai * br;
  }
  return tp.op(std::move(out), {a, b}, [a, b, n](Tape<T>& t, const Tensor<T>& g) {
    // d(a*b) accumulates conj(other) * gout on each side
    if (t.requires_grad(a)) {
      const Tensor<T>& vb2 = t.val(b);
      Tensor<T>& ga = t.grad_buffer(a);
      for (std::int64_t i = 0; i < n; ++i) {
        const T br = vb2[2 * i], bi = vb2[2 * i + 1];
        const T gr = g[2 * i], gi = g[2 * i + 1];
        ga[2 * i] += br * gr + bi * gi;
        ga[2 * i + 1] += br * gi - bi * gr;
      }
    }
    if (t.requires_grad(b)) {
      const Tensor<T>& va2 = t.val(a);
      Tensor<T>& gb = t.grad_buffer(b);
      for (std::int64_t i = 0; i < n; ++i) {
        const T ar = va2[2 * i], ai = va2[2 * i + 1];
        const T gr = g[2 * i], gi = g[2 * i + 1];
        gb[2 * i] += ar * gr + ai * gi;
        gb[2 * i + 1] += ar * gi - ai * gr;
      }
    }
  });
}

template <typename T>
Var conj(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  detail::check_complex(va, "conj");
  Tensor<T> out(va.shape());
  const std::int64_t n = va.size() / 2;
  for (std::int64_t i = 0; i < n; ++i) {
    out[2 * i] = va[2 * i];
    out[2 * i + 1] = -va[2 * i + 1];
  }
  return tp.op(std::move(out), {a}, [a, n](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < n; ++i) {
      ga[2 * i] += g[2 * i];
      ga[2 * i + 1] -= g[2 * i + 1];
    }
  });
}

/// Complex magnitude: [..., 2] -> [...]. Gradient at exactly-zero magnitude
/// is taken as 0.
template <typename T>
Var cabs(Tape<T>& tp, Var a) {
  const Tensor<T>& va = tp.val(a);
  detail::check_complex(va, "cabs");
  Shape out_shape(va.shape().begin(), va.shape().end() - 1);
  Tensor<T> out(out_shape);
  const std::int64_t n = va.size() / 2;
  for (std::int64_t i = 0; i < n; ++i) out[i] = std::hypot(va[2 * i], va[2 * i + 1]);
  return tp.op(std::move(out), {a}, [a, n](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    const Tensor<T>& va2 = t.val(a);
    Tensor<T>& ga = t.grad_buffer(a);
    for (std::int64_t i = 0; i < n; ++i) {
      const T m = std::hypot(va2[2 * i], va2[2 * i + 1]);
      if (m > T(1e-30)) {
        ga[2 * i] += g[i] * va2[2 * i] / m;
        ga[2 * i + 1] += g[i] * va2[2 * i + 1] / m;
      }
    }
  });
}

/// Complex soft-threshold: shrinks magnitudes by a scalar threshold,
/// preserving phase; zero below the threshold.
template <typename T>
Var cshrink(Tape<T>& tp, Var a, Var thr) {
  const Tensor<T>& va = tp.val(a);
  detail::check_complex(va, "cshrink");
  detail::check_scalar(tp.val(thr), "cshrink");
  const T tv = tp.val(thr)[0];
  Tensor<T> out(va.shape());
  const std::int64_t n = va.size() / 2;
  for (std::int64_t i = 0; i < n; ++i) {
    const T m = std::hypot(va[2 * i], va[2 * i + 1]);
    const T f = m > tv ? (T(1) - tv / m) : T(0);
    out[2 * i] = f * va[2 * i];
    out[2 * i + 1] = f * va[2 * i + 1];
  }
  return tp.op(std::move(out), {a, thr}, [a, thr, n](Tape<T>& t, const Tensor<T>& g) {
    const Tensor<T>& va2 = t.val(a);
    const T tv2 = t.val(thr)[0];
    const bool need_a = t.requires_grad(a);
    const bool need_t = t.requires_grad(thr);
    T tacc = 0;
    Tensor<T>* ga = need_a ? &t.grad_buffer(a) : nullptr;
    for (std::int64_t i = 0; i < n; ++i) {
      const T p = va2[2 * i], q = va2[2 * i + 1];
      const T m = std::hypot(p, q);
      if (m <= tv2) continue;
      const T gr = g[2 * i], gi = g[2 * i + 1];
      const T proj = p * gr + q * gi;
      if (need_a) {
        const T f = T(1) - tv2 / m;
        const T m3 = m * m * m;
        (*ga)[2 * i] += f * gr + tv2 * p * proj / m3;
        (*ga)[2 * i + 1] += f * gi + tv2 * q * proj / m3;
      }
      if (need_t) tacc -= proj / m;
    }
    if (need_t) t.grad_buffer(thr)[0] += tacc;
  });
}

/// Subtensor at index k along axis 0: [N, ...] -> [...].
template <typename T>
Var slice_axis0(Tape<T>& tp, Var a, int k) {
  const Tensor<T>& v = tp.val(a);
  if (v.rank() < 2 || k < 0 || k >= v.dim(0)) throw std::invalid_argument("slice_axis0: index out of range");
  Shape s(v.shape().begin() + 1, v.shape().end());
  const std::int64_t plane = numel(s);
  Tensor<T> out(s);
  const T* src = v.data() + std::int64_t(k) * plane;
  for (std::int64_t i = 0; i < plane; ++i) out[i] = src[i];
  return tp.op(std::move(out), {a}, [a, k, plane](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    T* dst = t.grad_buffer(a).data() + std::int64_t(k) * plane;
    for (std::int64_t i = 0; i < plane; ++i) dst[i] += g[i];
  });
}

/// Stack equal-shape tensors along a new leading axis.
template <typename T>
Var stack_axis0(Tape<T>& tp, const std::vector<Var>& parts) {
  if (parts.empty()) throw std::invalid_argument("stack_axis0: no inputs");
  const Shape inner = tp.val(parts[0]).shape();
  const std::int64_t plane = numel(inner);
  Shape s;
  s.push_back(static_cast<int>(parts.size()));
  s.insert(s.end(), inner.begin(), inner.end());
  Tensor<T> out(s);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor<T>& v = tp.val(parts[k]);
    if (v.shape() != inner) throw std::invalid_argument("stack_axis0: shape mismatch");
    T* dst = out.data() + std::int64_t(k) * plane;
    for (std::int64_t i = 0; i < plane; ++i) dst[i] = v[i];
  }
  std::vector<Var> ps = parts;
  return tp.op(std::move(out), ps, [ps, plane](Tape<T>& t, const Tensor<T>& g) {
    for (std::size_t k = 0; k < ps.size(); ++k) {
      if (!t.requires_grad(ps[k])) continue;
      Tensor<T>& gp = t.grad_buffer(ps[k]);
      const T* src = g.data() + std::int64_t(k) * plane;
      for (std::int64_t i = 0; i < plane; ++i) gp[i] += src[i];
    }
  });
}

// ---------------------------------------------------------------------------
// Fourier
// ---------------------------------------------------------------------------

/// Tape node for the centered orthonormal FFT; the reverse pass applies the
/// inverse transform (the adjoint, since the map is unitary).
template <typename T>
Var fft2c(Tape<T>& tp, Var a) {
  Tensor<T> out = fft2c(tp.val(a));
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    t.add_grad(a, ifft2c(g));
  });
}

template <typename T>
Var ifft2c(Tape<T>& tp, Var a) {
  Tensor<T> out = ifft2c(tp.val(a));
  return tp.op(std::move(out), {a}, [a](Tape<T>& t, const Tensor<T>& g) {
    if (!t.requires_grad(a)) return;
    t.add_grad(a, fft2c(g));
  });
}

}  // namespace vsharp
