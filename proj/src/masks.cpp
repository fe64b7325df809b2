#include "vsharp/masks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vsharp/random.hpp"

namespace vsharp {

namespace {

void check_dims(int H, int W, double accel, double acs_fraction) {
  if (H < 1 || W < 1) throw std::invalid_argument("mask: dimensions must be positive");
  if (accel < 1.0) throw std::invalid_argument("mask: acceleration must be >= 1");
  if (acs_fraction <= 0.0 || acs_fraction >= 1.0) throw std::invalid_argument("mask: acs_fraction must be in (0,1)");
}

void finalize(SamplingMask& m) {
  const double total = double(m.height) * m.width;
  const std::int64_t on = m.ones();
  if (on == 0) throw std::runtime_error("mask: empty sampling pattern");
  m.achieved_accel = total / double(on);
  if (std::abs(m.achieved_accel - m.requested_accel) > 0.1 * m.requested_accel)
    throw std::runtime_error("mask: achieved acceleration " + std::to_string(m.achieved_accel) +
                             " outside +-10% of requested " + std::to_string(m.requested_accel));
}

}  // namespace

std::int64_t SamplingMask::ones() const {
  std::int64_t n = 0;
  for (auto v : grid) n += v;
  return n;
}

SamplingMask full_mask(int H, int W) {
  SamplingMask m;
  m.height = H;
  m.width = W;
  m.grid.assign(static_cast<std::size_t>(H) * W, 1);
  m.acs_fraction = 1.0;
  m.requested_accel = 1.0;
  m.achieved_accel = 1.0;
  m.acs_row0 = 0;
  m.acs_row1 = H;
  m.acs_col0 = 0;
  m.acs_col1 = W;
  m.kind = "full";
  return m;
}

SamplingMask equispaced_mask(int H, int W, double accel, double acs_fraction, std::uint64_t seed) {
  check_dims(H, W, accel, acs_fraction);
  if (acs_fraction * W >= double(W) / accel)
    throw std::invalid_argument("equispaced_mask: ACS fraction makes the acceleration target unreachable");

  const int acs_cols = std::max(1, int(std::ceil(acs_fraction * W)));
  const int c0 = (W - acs_cols) / 2;
  const int c1 = c0 + acs_cols;
  const int target_cols = std::max(1, int(std::lround(double(W) / accel)));
  const int needed = target_cols - acs_cols;

  std::vector<char> col_on(static_cast<std::size_t>(W), 0);
  for (int c = c0; c < c1; ++c) col_on[static_cast<std::size_t>(c)] = 1;

  if (needed > 0) {
    std::vector<int> cand;
    cand.reserve(static_cast<std::size_t>(W - acs_cols));
    for (int c = 0; c < W; ++c)
      if (!col_on[static_cast<std::size_t>(c)]) cand.push_back(c);
    const int n_cand = static_cast<int>(cand.size());
    if (needed > n_cand) throw std::invalid_argument("equispaced_mask: not enough columns for target");
    const int stride = std::max(1, n_cand / needed);
    // offsets are capped so the pick count stays exactly at target
    const int max_off = std::max(1, n_cand - (needed - 1) * stride);
    Rng rng = make_rng(seed, 101);
    const int off = int(rng() % static_cast<std::uint64_t>(max_off));
    for (int j = 0; j < needed; ++j) col_on[static_cast<std::size_t>(cand[static_cast<std::size_t>(off + j * stride)])] = 1;
  }

  SamplingMask m;
  m.height = H;
  m.width = W;
  m.grid.assign(static_cast<std::size_t>(H) * W, 0);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) m.grid[static_cast<std::size_t>(y) * W + x] = col_on[static_cast<std::size_t>(x)];
  m.acs_fraction = acs_fraction;
  m.requested_accel = accel;
  m.acs_row0 = 0;
  m.acs_row1 = H;
  m.acs_col0 = c0;
  m.acs_col1 = c1;
  m.kind = "equispaced";
  m.seed = seed;
  finalize(m);
  return m;
}

double poisson_radius(double r0, double dist, double dist_max, double alpha) {
  return r0 * (1.0 + alpha * dist / dist_max);
}

std::vector<std::array<double, 2>> poisson_disc_points(int H, int W, double r0, std::uint64_t seed, double alpha) {
  if (r0 <= 0) throw std::invalid_argument("poisson_disc_points: r0 must be positive");
  const double cy = (H - 1) / 2.0, cx = (W - 1) / 2.0;
  const double dmax = std::max(1.0, std::hypot(cy, cx));
  auto radius = [&](double y, double x) { return poisson_radius(r0, std::hypot(y - cy, x - cx), dmax, alpha); };

  // background grid sized for the minimum spacing; variable radii only grow
  const double cell = r0 / std::sqrt(2.0);
  const int gh = std::max(1, int(std::ceil(H / cell)));
  const int gw = std::max(1, int(std::ceil(W / cell)));
  std::vector<int> cells(static_cast<std::size_t>(gh) * gw, -1);
  std::vector<std::array<double, 2>> pts;
  std::vector<int> active;

  auto cell_of = [&](double y, double x) {
    const int iy = std::min(gh - 1, int(y / cell));
    const int ix = std::min(gw - 1, int(x / cell));
    return std::pair<int, int>{iy, ix};
  };
  auto ok = [&](double y, double x) {
    const double rc = radius(y, x);
    auto [iy, ix] = cell_of(y, x);
    const int reach = int(std::ceil(rc / cell)) + 1;
    for (int dy = -reach; dy <= reach; ++dy) {
      const int ny = iy + dy;
      if (ny < 0 || ny >= gh) continue;
      for (int dx = -reach; dx <= reach; ++dx) {
        const int nx = ix + dx;
        if (nx < 0 || nx >= gw) continue;
        const int pi = cells[static_cast<std::size_t>(ny) * gw + nx];
        if (pi < 0) continue;
        const auto& q = pts[static_cast<std::size_t>(pi)];
        const double d = std::hypot(q[0] - y, q[1] - x);
        if (d < std::min(rc, radius(q[0], q[1]))) return false;
      }
    }
    return true;
  };
  auto insert = [&](double y, double x) {
    auto [iy, ix] = cell_of(y, x);
    cells[static_cast<std::size_t>(iy) * gw + ix] = static_cast<int>(pts.size());
    pts.push_back({y, x});
    active.push_back(static_cast<int>(pts.size() - 1));
  };

  Rng rng = make_rng(seed, 202);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  insert(cy, cx);

  constexpr int kAttempts = 30;
  while (!active.empty()) {
    const std::size_t ai = static_cast<std::size_t>(rng() % active.size());
    const auto p = pts[static_cast<std::size_t>(active[ai])];
    const double rp = radius(p[0], p[1]);
    bool placed = false;
    for (int a = 0; a < kAttempts; ++a) {
      const double ang = 2.0 * M_PI * unit(rng);
      const double rad = rp * (1.0 + unit(rng));
      const double y = p[0] + rad * std::sin(ang);
      const double x = p[1] + rad * std::cos(ang);
      if (y < 0 || y >= H || x < 0 || x >= W) continue;
      if (!ok(y, x)) continue;
      insert(y, x);
      placed = true;
      break;
    }
    if (!placed) {
      active[ai] = active.back();
      active.pop_back();
    }
  }
  return pts;
}

namespace {

std::int64_t poisson_count(int H, int W, double r0, std::uint64_t seed, int ar0, int ar1, int ac0, int ac1,
                           std::vector<std::uint8_t>* out_grid) {
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(H) * W, 0);
  for (const auto& p : poisson_disc_points(H, W, r0, seed))
    grid[static_cast<std::size_t>(int(p[0])) * W + int(p[1])] = 1;
  for (int y = ar0; y < ar1; ++y)
    for (int x = ac0; x < ac1; ++x) grid[static_cast<std::size_t>(y) * W + x] = 1;
  std::int64_t n = 0;
  for (auto v : grid) n += v;
  if (out_grid) *out_grid = std::move(grid);
  return n;
}

}  // namespace

SamplingMask poisson_disc_mask(int H, int W, double accel, double acs_fraction, std::uint64_t seed) {
  check_dims(H, W, accel, acs_fraction);
  const int acs_h = std::max(1, int(std::ceil(acs_fraction * H)));
  const int acs_w = std::max(1, int(std::ceil(acs_fraction * W)));
  const int ar0 = (H - acs_h) / 2, ar1 = ar0 + acs_h;
  const int ac0 = (W - acs_w) / 2, ac1 = ac0 + acs_w;

  const double target = double(H) * W / accel;
  if (double(acs_h) * acs_w >= target)
    throw std::invalid_argument("poisson_disc_mask: ACS fraction makes the acceleration target unreachable");

  auto count_at = [&](double r0) { return poisson_count(H, W, r0, seed, ar0, ar1, ac0, ac1, nullptr); };

  // bracket: count decreases as r0 grows
  double lo = 0.4, hi = 2.0 * std::sqrt(accel);
  int guard = 0;
  while (count_at(lo) < target) {
    lo *= 0.5;
    if (++guard > 12) throw std::runtime_error("poisson_disc_mask: failed to bracket target density (low side)");
  }
  guard = 0;
  while (count_at(hi) > target) {
    hi *= 2.0;
    if (++guard > 12) throw std::runtime_error("poisson_disc_mask: failed to bracket target density (high side)");
  }

  double best_r0 = hi;
  double best_err = std::abs(double(count_at(hi)) - target);
  constexpr int kBisectCap = 28;
  for (int it = 0; it < kBisectCap; ++it) {
    const double mid = 0.5 * (lo + hi);
    const std::int64_t n = count_at(mid);
    const double err = std::abs(double(n) - target);
    if (err < best_err) {
      best_err = err;
      best_r0 = mid;
    }
    if (err <= 0.02 * target) break;
    if (double(n) > target)
      lo = mid;
    else
      hi = mid;
  }
  if (best_err > 0.1 * target)
    throw std::runtime_error("poisson_disc_mask: bisection failed to reach target density within cap");

  SamplingMask m;
  m.height = H;
  m.width = W;
  poisson_count(H, W, best_r0, seed, ar0, ar1, ac0, ac1, &m.grid);
  m.acs_fraction = acs_fraction;
  m.requested_accel = accel;
  m.acs_row0 = ar0;
  m.acs_row1 = ar1;
  m.acs_col0 = ac0;
  m.acs_col1 = ac1;
  m.kind = "poisson";
  m.seed = seed;
  finalize(m);
  return m;
}

}  // namespace vsharp
