#include <doctest.h>

#include "support.hpp"
#include "vsharp/nn.hpp"

using namespace vsharp;
using testsupport::check_gradients;
using testsupport::random_tensor;

namespace {

// independent sliding-window cross-correlation
Tensor<double> naive_conv2d(const Tensor<double>& x, const Tensor<double>& w, const Tensor<double>* bias, int stride,
                            int dilation, int pad) {
  const int H = x.dim(0), W = x.dim(1), Ci = x.dim(2);
  const int kh = w.dim(0), kw = w.dim(1), Co = w.dim(3);
  const int Ho = (H + 2 * pad - dilation * (kh - 1) - 1) / stride + 1;
  const int Wo = (W + 2 * pad - dilation * (kw - 1) - 1) / stride + 1;
  Tensor<double> out({Ho, Wo, Co});
  for (int oy = 0; oy < Ho; ++oy)
    for (int ox = 0; ox < Wo; ++ox)
      for (int co = 0; co < Co; ++co) {
        double acc = bias ? (*bias)[co] : 0.0;
        for (int ky = 0; ky < kh; ++ky)
          for (int kx = 0; kx < kw; ++kx)
            for (int ci = 0; ci < Ci; ++ci) {
              const int iy = oy * stride - pad + ky * dilation;
              const int ix = ox * stride - pad + kx * dilation;
              if (iy < 0 || iy >= H || ix < 0 || ix >= W) continue;
              acc += x.at(iy, ix, ci) * w.at(ky, kx, ci, co);
            }
        out.at(oy, ox, co) = acc;
      }
  return out;
}

Var probe(Tape<double>& tp, Var out, std::uint64_t seed) {
  auto rng = make_rng(seed, 9000);
  return dot_sum(tp, out, tp.leaf(random_tensor<double>(tp.val(out).shape(), rng)));
}

}  // namespace

TEST_CASE("conv2d with identity 1x1 kernel reproduces the input") {
  auto rng = make_rng(71);
  Tensor<double> x = random_tensor<double>({5, 7, 3}, rng);
  Tensor<double> w({1, 1, 3, 3});
  for (int c = 0; c < 3; ++c) w.at(0, 0, c, c) = 1.0;
  Tape<double> tp;
  Var out = conv1x1(tp, tp.leaf(x), tp.leaf(w));
  CHECK(testsupport::rel_diff(tp.val(out), x) == 0.0);
}

TEST_CASE("conv2d matches the naive sliding-window oracle") {
  auto rng = make_rng(73);
  struct Case {
    int stride, dilation, pad, kh, kw;
  };
  for (auto c : {Case{1, 1, 1, 3, 3}, Case{2, 1, 1, 3, 3}, Case{1, 2, 0, 3, 3}, Case{1, 2, 2, 3, 3},
                 Case{1, 1, 0, 1, 1}, Case{2, 2, 1, 2, 3}}) {
    Tensor<double> x = random_tensor<double>({8, 8, 2}, rng);
    Tensor<double> w = random_tensor<double>({c.kh, c.kw, 2, 3}, rng);
    Tensor<double> b = random_tensor<double>({3}, rng);
    Tape<double> tp;
    Var out = conv2d(tp, tp.leaf(x), tp.leaf(w), tp.leaf(b), Conv2dSpec{c.stride, c.dilation, c.pad});
    Tensor<double> ref = naive_conv2d(x, w, &b, c.stride, c.dilation, c.pad);
    CHECK(testsupport::rel_diff(tp.val(out), ref) < 1e-13);
  }
}

TEST_CASE("conv2d gradients match finite differences (incl. stride/dilation)") {
  auto rng = make_rng(79);
  const std::uint64_t rng2 = 83;
  Tensor<double> x = random_tensor<double>({6, 6, 2}, rng);
  Tensor<double> w = random_tensor<double>({3, 3, 2, 2}, rng);
  Tensor<double> b = random_tensor<double>({2}, rng);
  for (Conv2dSpec spec : {Conv2dSpec{1, 1, 1}, Conv2dSpec{2, 1, 0}, Conv2dSpec{1, 2, 2}}) {
    auto res = check_gradients({x, w, b}, [&](Tape<double>& tp, const std::vector<Var>& v) {
      return probe(tp, conv2d(tp, v[0], v[1], v[2], spec), rng2);
    });
    CHECK(res.max_rel_err < 1e-4);
  }
}

TEST_CASE("conv2d shape errors") {
  Tape<double> tp;
  Var x = tp.leaf(Tensor<double>({4, 4, 2}));
  Var w = tp.leaf(Tensor<double>({3, 3, 3, 2}));  // wrong Ci
  CHECK_THROWS_AS(conv2d(tp, x, w), std::invalid_argument);
  Var w5 = tp.leaf(Tensor<double>({5, 5, 2, 1}));
  CHECK_THROWS_AS(conv2d(tp, x, w5), std::invalid_argument);  // kernel larger than input
}

TEST_CASE("replication_pad(1) of 2x2 replicates edges into 4x4") {
  Tensor<double> x({2, 2, 1}, {1, 2, 3, 4});
  Tape<double> tp;
  Var out = replication_pad2d(tp, tp.leaf(x), 1);
  const Tensor<double>& o = tp.val(out);
  REQUIRE(o.shape() == Shape{4, 4, 1});
  const double expect[4][4] = {{1, 1, 2, 2}, {1, 1, 2, 2}, {3, 3, 4, 4}, {3, 3, 4, 4}};
  for (int y = 0; y < 4; ++y)
    for (int xx = 0; xx < 4; ++xx) CHECK(o.at(y, xx, 0) == expect[y][xx]);
}

TEST_CASE("pool / pad / upsample gradients match finite differences") {
  auto rng = make_rng(89);
  const std::uint64_t rng2 = 97;
  Tensor<double> x = random_tensor<double>({4, 6, 2}, rng);

  auto res = check_gradients({x}, [&](Tape<double>& tp, const std::vector<Var>& v) {
    return probe(tp, avgpool2(tp, v[0]), rng2);
  });
  CHECK(res.max_rel_err < 1e-4);

  res = check_gradients({x}, [&](Tape<double>& tp, const std::vector<Var>& v) {
    return probe(tp, replication_pad2d(tp, v[0], 2, 1, 0, 3), rng2);
  });
  CHECK(res.max_rel_err < 1e-4);

  res = check_gradients({x}, [&](Tape<double>& tp, const std::vector<Var>& v) {
    return probe(tp, bilinear_upsample2(tp, v[0]), rng2);
  });
  CHECK(res.max_rel_err < 1e-4);
}

TEST_CASE("avgpool2 halves even dims and rejects odd ones") {
  Tensor<double> x({4, 4, 1}, std::vector<double>(16, 1.0));
  Tape<double> tp;
  Var out = avgpool2(tp, tp.leaf(x));
  CHECK(tp.val(out).shape() == Shape{2, 2, 1});
  CHECK(tp.val(out)[0] == 1.0);
  Var odd = tp.leaf(Tensor<double>({3, 4, 1}));
  CHECK_THROWS_AS(avgpool2(tp, odd), std::invalid_argument);
}

TEST_CASE("bilinear_upsample2 matches a direct interpolation loop") {
  auto rng = make_rng(101);
  Tensor<double> x = random_tensor<double>({3, 5, 2}, rng);
  Tape<double> tp;
  const Tensor<double>& o = tp.val(bilinear_upsample2(tp, tp.leaf(x)));
  const int H = 3, W = 5;
  for (int y = 0; y < 2 * H; ++y)
    for (int xx = 0; xx < 2 * W; ++xx)
      for (int c = 0; c < 2; ++c) {
        const double sy = (y + 0.5) / 2.0 - 0.5, sx = (xx + 0.5) / 2.0 - 0.5;
        const int y0 = int(std::floor(sy)), x0 = int(std::floor(sx));
        const double wy = sy - y0, wx = sx - x0;
        auto cl = [](int v, int n) { return std::min(std::max(v, 0), n - 1); };
        const double ref = (1 - wy) * ((1 - wx) * x.at(cl(y0, H), cl(x0, W), c) + wx * x.at(cl(y0, H), cl(x0 + 1, W), c)) +
                           wy * ((1 - wx) * x.at(cl(y0 + 1, H), cl(x0, W), c) + wx * x.at(cl(y0 + 1, H), cl(x0 + 1, W), c));
        CHECK(o.at(y, xx, c) == doctest::Approx(ref).epsilon(1e-12));
      }
}
