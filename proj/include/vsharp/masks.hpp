#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "vsharp/tensor.hpp"

namespace vsharp {

/// Binary k-space sampling pattern with a fully-sampled centered ACS block.
struct SamplingMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> grid;  // height*width, row-major
  double acs_fraction = 0.0;
  double requested_accel = 1.0;
  double achieved_accel = 1.0;
  // ACS block [acs_row0, acs_row1) x [acs_col0, acs_col1)
  int acs_row0 = 0, acs_row1 = 0;
  int acs_col0 = 0, acs_col1 = 0;
  std::string kind;
  std::uint64_t seed = 0;

  std::uint8_t at(int y, int x) const { return grid[static_cast<std::size_t>(y) * width + x]; }
  std::int64_t ones() const;
  bool in_acs(int y, int x) const { return y >= acs_row0 && y < acs_row1 && x >= acs_col0 && x < acs_col1; }

  template <typename T>
  Tensor<T> to_tensor() const {
    Tensor<T> t({height, width});
    for (std::int64_t i = 0; i < t.size(); ++i) t[i] = static_cast<T>(grid[static_cast<std::size_t>(i)]);
    return t;
  }
};

SamplingMask full_mask(int H, int W);

/// Vertical rectilinear mask: full columns, a centered fully-sampled ACS
/// band of ceil(acs_fraction*W) columns, and the remaining target columns
/// picked on a uniform stride with a seeded offset.
SamplingMask equispaced_mask(int H, int W, double accel, double acs_fraction, std::uint64_t seed);

/// Variable-density Poisson-disc mask (Bridson sampling with radius growing
/// away from the k-space center), fully-sampled centered ACS rectangle.
/// The base radius is bisected until the achieved acceleration matches.
SamplingMask poisson_disc_mask(int H, int W, double accel, double acs_fraction, std::uint64_t seed);

/// Sample spacing profile used by the Poisson mask: r(d) = r0 * (1 + alpha*d/dmax).
double poisson_radius(double r0, double dist, double dist_max, double alpha = 3.0);

/// The raw Bridson point set for a given base radius (exposed so the
/// min-distance property is testable against the accepted points).
std::vector<std::array<double, 2>> poisson_disc_points(int H, int W, double r0, std::uint64_t seed,
                                                       double alpha = 3.0);

}  // namespace vsharp
