#include <doctest.h>

#include "vsharp/masks.hpp"

using namespace vsharp;

namespace {

int column_count(const SamplingMask& m) {
  int cols = 0;
  for (int x = 0; x < m.width; ++x) cols += m.at(0, x);
  return cols;
}

}  // namespace

TEST_CASE("equispaced mask: 32 wide, 4x, 8% ACS keeps ~8 columns with 3 central ACS") {
  SamplingMask m = equispaced_mask(64, 32, 4.0, 0.08, 5);
  CHECK(column_count(m) == 8);
  CHECK(m.acs_col1 - m.acs_col0 == 3);  // ceil(0.08*32)
  // full columns: every row identical
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) CHECK(m.at(y, x) == m.at(0, x));
  // ACS fully sampled
  for (int y = 0; y < m.height; ++y)
    for (int x = m.acs_col0; x < m.acs_col1; ++x) CHECK(m.at(y, x) == 1);
  CHECK(m.achieved_accel == doctest::Approx(4.0));
}

TEST_CASE("equispaced mask at acceleration 1 is all ones") {
  SamplingMask m = equispaced_mask(16, 24, 1.0, 0.08, 9);
  CHECK(m.ones() == 16 * 24);
  CHECK(m.achieved_accel == doctest::Approx(1.0));
}

TEST_CASE("equispaced mask determinism and seed sensitivity") {
  SamplingMask a = equispaced_mask(32, 96, 8.0, 0.04, 1234);
  SamplingMask b = equispaced_mask(32, 96, 8.0, 0.04, 1234);
  CHECK(a.grid == b.grid);
  bool any_diff = false;
  for (std::uint64_t s = 0; s < 16 && !any_diff; ++s) any_diff = equispaced_mask(32, 96, 8.0, 0.04, s).grid != a.grid;
  CHECK(any_diff);
}

TEST_CASE("equispaced mask rejects unreachable targets") {
  // acs_fraction * W >= W / accel
  CHECK_THROWS_AS(equispaced_mask(32, 32, 16.0, 0.25, 1), std::invalid_argument);
  CHECK_THROWS_AS(equispaced_mask(32, 32, 4.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(equispaced_mask(32, 32, 0.5, 0.08, 1), std::invalid_argument);
}

TEST_CASE("poisson mask: achieved acceleration within band on 64x64 at 4x") {
  SamplingMask m = poisson_disc_mask(64, 64, 4.0, 0.08, 7);
  CHECK(m.achieved_accel >= 3.6);
  CHECK(m.achieved_accel <= 4.4);
  // ACS block fully sampled
  for (int y = m.acs_row0; y < m.acs_row1; ++y)
    for (int x = m.acs_col0; x < m.acs_col1; ++x) CHECK(m.at(y, x) == 1);
  // binary
  for (auto v : m.grid) CHECK((v == 0 || v == 1));
}

TEST_CASE("poisson mask determinism under seed") {
  SamplingMask a = poisson_disc_mask(48, 48, 8.0, 0.04, 21);
  SamplingMask b = poisson_disc_mask(48, 48, 8.0, 0.04, 21);
  CHECK(a.grid == b.grid);
}

TEST_CASE("poisson points respect the local radius bound (brute force)") {
  const int H = 48, W = 48;
  const double r0 = 2.0;
  auto pts = poisson_disc_points(H, W, r0, 33);
  REQUIRE(pts.size() > 20);
  const double cy = (H - 1) / 2.0, cx = (W - 1) / 2.0;
  const double dmax = std::hypot(cy, cx);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double d = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
      const double ri = poisson_radius(r0, std::hypot(pts[i][0] - cy, pts[i][1] - cx), dmax);
      const double rj = poisson_radius(r0, std::hypot(pts[j][0] - cy, pts[j][1] - cx), dmax);
      CHECK(d >= std::min(ri, rj) - 1e-9);
    }
}

TEST_CASE("acceleration tolerance holds across accelerations and sizes") {
  for (double accel : {2.0, 4.0, 8.0, 16.0}) {
    const double acs = accel <= 4 ? 0.08 : (accel <= 8 ? 0.04 : 0.02);
    for (int w : {32, 64, 128, 256}) {
      SamplingMask e = equispaced_mask(32, w, accel, acs, 42);
      CHECK(std::abs(e.achieved_accel - accel) <= 0.1 * accel);
    }
    for (int w : {32, 64}) {
      SamplingMask p = poisson_disc_mask(w, w, accel, acs, 42);
      CHECK(std::abs(p.achieved_accel - accel) <= 0.1 * accel);
    }
  }
}

TEST_CASE("full mask helper") {
  SamplingMask m = full_mask(8, 10);
  CHECK(m.ones() == 80);
  CHECK(m.in_acs(0, 0));
  auto t = m.to_tensor<float>();
  CHECK(t.shape() == Shape{8, 10});
  CHECK(t[0] == 1.f);
}
