#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

#include "vsharp/tensor.hpp"

namespace vsharp {

using Rng = std::mt19937_64;

/// Derive an independent stream from a base seed; keeps per-sample / per-mask
/// streams decoupled from each other and from the weight init stream.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  const std::uint64_t mixed = stream ^ 0x9e3779b97f4a7c15ull;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(mixed), static_cast<std::uint32_t>(mixed >> 32)};
  return Rng(seq);
}

template <typename T>
Tensor<T> normal_init(Shape shape, double mean, double stddev, Rng& rng) {
  std::normal_distribution<double> dist(mean, stddev);
  Tensor<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(dist(rng));
  return t;
}

template <typename T>
Tensor<T> uniform_init(Shape shape, double lo, double hi, Rng& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(dist(rng));
  return t;
}

/// Samples N(0,1) restricted to [lo, hi] by rejection.
template <typename T>
Tensor<T> truncated_normal_init(Shape shape, double lo, double hi, Rng& rng) {
  if (!(lo < hi)) throw std::invalid_argument("truncated_normal_init: lo must be < hi");
  std::normal_distribution<double> dist(0.0, 1.0);
  Tensor<T> t(std::move(shape));
  for (std::int64_t i = 0; i < t.size(); ++i) {
    double v;
    do {
      v = dist(rng);
    } while (v < lo || v > hi);
    t[i] = static_cast<T>(v);
  }
  return t;
}

}  // namespace vsharp
