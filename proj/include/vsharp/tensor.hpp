#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace vsharp {

using Shape = std::vector<int>;

inline std::int64_t numel(const Shape& s) {
  std::int64_t n = 1;
  for (int d : s) {
    if (d < 0) throw std::invalid_argument("tensor dimension must be non-negative");
    n *= d;
  }
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::string r = "[";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) r += ",";
    r += std::to_string(s[i]);
  }
  return r + "]";
}

/// Dense row-major tensor of f32 or f64 scalars. Complex data uses a trailing
/// axis of size 2 (interleaved re/im), the repo-wide convention; image tensors
/// are channels-last [H, W, C].
template <typename T>
class Tensor {
  static_assert(std::is_floating_point_v<T>, "Tensor supports f32/f64 only");

public:
  Tensor() = default;
  explicit Tensor(Shape shape) : shape_(std::move(shape)), data_(static_cast<std::size_t>(numel(shape_)), T(0)) {}
  Tensor(Shape shape, std::vector<T> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (static_cast<std::int64_t>(data_.size()) != numel(shape_))
      throw std::invalid_argument("tensor data size does not match shape " + shape_str(shape_));
  }

  static Tensor full(Shape shape, T v) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), v);
    return t;
  }

  const Shape& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  T& operator[](std::int64_t i) { return data_[static_cast<std::size_t>(i)]; }
  T operator[](std::int64_t i) const { return data_[static_cast<std::size_t>(i)]; }

  T& at(int i, int j) { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }
  T at(int i, int j) const { return data_[static_cast<std::size_t>(i) * dim(1) + j]; }
  T& at(int i, int j, int k) { return data_[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k]; }
  T at(int i, int j, int k) const { return data_[(static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k]; }
  T& at(int i, int j, int k, int l) {
    return data_[((static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }
  T at(int i, int j, int k, int l) const {
    return data_[((static_cast<std::size_t>(i) * dim(1) + j) * dim(2) + k) * dim(3) + l];
  }

  void reshape(Shape s) {
    if (numel(s) != size()) throw std::invalid_argument("reshape to incompatible size " + shape_str(s));
    shape_ = std::move(s);
  }
  Tensor reshaped(Shape s) const {
    Tensor t = *this;
    t.reshape(std::move(s));
    return t;
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename T>
bool same_shape(const Tensor<T>& a, const Tensor<T>& b) {
  return a.shape() == b.shape();
}

template <typename T>
void check_same_shape(const Tensor<T>& a, const Tensor<T>& b, const char* op) {
  if (!same_shape(a, b))
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                                shape_str(b.shape()));
}

template <typename T>
bool all_finite(const Tensor<T>& t) {
  for (std::int64_t i = 0; i < t.size(); ++i)
    if (!std::isfinite(t[i])) return false;
  return true;
}

template <typename T>
double norm2(const Tensor<T>& t) {
  double s = 0;
  for (std::int64_t i = 0; i < t.size(); ++i) s += double(t[i]) * double(t[i]);
  return std::sqrt(s);
}

template <typename T>
double dot(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "dot");
  double s = 0;
  for (std::int64_t i = 0; i < a.size(); ++i) s += double(a[i]) * double(b[i]);
  return s;
}

template <typename T>
double max_abs(const Tensor<T>& t) {
  double m = 0;
  for (std::int64_t i = 0; i < t.size(); ++i) m = std::max(m, std::abs(double(t[i])));
  return m;
}

template <typename T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "add");
  Tensor<T> r(a.shape());
  for (std::int64_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

template <typename T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "sub");
  Tensor<T> r(a.shape());
  for (std::int64_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

template <typename T>
Tensor<T> scaled(const Tensor<T>& a, T c) {
  Tensor<T> r(a.shape());
  for (std::int64_t i = 0; i < a.size(); ++i) r[i] = a[i] * c;
  return r;
}

template <typename T>
void axpy(T alpha, const Tensor<T>& x, Tensor<T>& y) {
  check_same_shape(x, y, "axpy");
  for (std::int64_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Complex view of a tensor whose trailing axis has size 2.
template <typename T>
std::complex<T>* as_complex(Tensor<T>& t) {
  if (t.rank() < 1 || t.dim(t.rank() - 1) != 2)
    throw std::invalid_argument("complex view requires trailing axis of size 2, got " + shape_str(t.shape()));
  return reinterpret_cast<std::complex<T>*>(t.data());
}

template <typename T>
const std::complex<T>* as_complex(const Tensor<T>& t) {
  if (t.rank() < 1 || t.dim(t.rank() - 1) != 2)
    throw std::invalid_argument("complex view requires trailing axis of size 2, got " + shape_str(t.shape()));
  return reinterpret_cast<const std::complex<T>*>(t.data());
}

/// Inner product sum_i a_i * conj(b_i) over complex tensors (trailing axis 2).
template <typename T>
std::complex<double> cdot(const Tensor<T>& a, const Tensor<T>& b) {
  check_same_shape(a, b, "cdot");
  const std::complex<T>* pa = as_complex(a);
  const std::complex<T>* pb = as_complex(b);
  std::complex<double> s = 0;
  const std::int64_t n = a.size() / 2;
  for (std::int64_t i = 0; i < n; ++i)
    s += std::complex<double>(pa[i]) * std::conj(std::complex<double>(pb[i]));
  return s;
}

template <typename Dst, typename Src>
Tensor<Dst> cast(const Tensor<Src>& t) {
  Tensor<Dst> r(t.shape());
  for (std::int64_t i = 0; i < t.size(); ++i) r[i] = static_cast<Dst>(t[i]);
  return r;
}

}  // namespace vsharp
