#pragma once

#include <complex>

#include "vsharp/tensor.hpp"

namespace vsharp {

namespace detail {
/// Centered orthonormal 2D DFT of one H x W plane:
///   shift -> DFT -> shift, scaled by 1/sqrt(H*W) in both directions,
/// so the inverse is the adjoint. Thread-safe (thread-local plans).
void dft2d_centered(const std::complex<double>* in, std::complex<double>* out, int H, int W, bool inverse);
}  // namespace detail

/// Centered 2D Fourier transform, DC at the array center.
/// Accepts [H, W, 2] or [nc, H, W, 2]; transforms each plane.
template <typename T>
Tensor<T> fft2c(const Tensor<T>& img);

template <typename T>
Tensor<T> ifft2c(const Tensor<T>& ks);

namespace detail {

template <typename T>
Tensor<T> transform_planes(const Tensor<T>& t, bool inverse, const char* op) {
  const int r = t.rank();
  if ((r != 3 && r != 4) || t.dim(r - 1) != 2)
    throw std::invalid_argument(std::string(op) + ": expected [H,W,2] or [nc,H,W,2], got " + shape_str(t.shape()));
  if (!all_finite(t)) throw std::invalid_argument(std::string(op) + ": non-finite input");
  const int H = t.dim(r - 3);
  const int W = t.dim(r - 2);
  const int planes = (r == 4) ? t.dim(0) : 1;
  const std::int64_t plane_elems = std::int64_t(H) * W;

  Tensor<T> out(t.shape());
  std::vector<std::complex<double>> in_buf(static_cast<std::size_t>(plane_elems));
  std::vector<std::complex<double>> out_buf(static_cast<std::size_t>(plane_elems));
  for (int p = 0; p < planes; ++p) {
    const T* src = t.data() + std::int64_t(p) * plane_elems * 2;
    T* dst = out.data() + std::int64_t(p) * plane_elems * 2;
    for (std::int64_t i = 0; i < plane_elems; ++i)
      in_buf[static_cast<std::size_t>(i)] = {double(src[2 * i]), double(src[2 * i + 1])};
    dft2d_centered(in_buf.data(), out_buf.data(), H, W, inverse);
    for (std::int64_t i = 0; i < plane_elems; ++i) {
      dst[2 * i] = static_cast<T>(out_buf[static_cast<std::size_t>(i)].real());
      dst[2 * i + 1] = static_cast<T>(out_buf[static_cast<std::size_t>(i)].imag());
    }
  }
  return out;
}

}  // namespace detail

template <typename T>
Tensor<T> fft2c(const Tensor<T>& img) {
  return detail::transform_planes(img, /*inverse=*/false, "fft2c");
}

template <typename T>
Tensor<T> ifft2c(const Tensor<T>& ks) {
  return detail::transform_planes(ks, /*inverse=*/true, "ifft2c");
}

}  // namespace vsharp
