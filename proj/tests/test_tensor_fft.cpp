#include <doctest.h>

#include "support.hpp"
#include "vsharp/fft.hpp"
#include "vsharp/tensor.hpp"

using namespace vsharp;
using testsupport::naive_dft2c;
using testsupport::random_tensor;

TEST_CASE("tensor basics") {
  Tensor<float> t({2, 3, 2});
  CHECK(t.size() == 12);
  CHECK(t.rank() == 3);
  t.at(1, 2, 0) = 5.f;
  CHECK(t[(1 * 3 + 2) * 2 + 0] == 5.f);
  CHECK_THROWS_AS(Tensor<float>({2, 2}, {1.f, 2.f, 3.f}), std::invalid_argument);
  CHECK_THROWS_AS(t.reshape({5}), std::invalid_argument);
  t.reshape({12});
  CHECK(t.rank() == 1);

  Tensor<double> c({4, 3});
  CHECK_THROWS_AS(as_complex(c), std::invalid_argument);
}

TEST_CASE("complex view and cdot") {
  Tensor<double> a({2, 2}, {1, 2, 3, 4});  // (1+2i), (3+4i)
  auto* ca = as_complex(a);
  CHECK(ca[0] == std::complex<double>(1, 2));
  CHECK(ca[1] == std::complex<double>(3, 4));
  Tensor<double> b({2, 2}, {1, 0, 0, 1});
  auto d = cdot(a, b);  // (1+2i)*1 + (3+4i)*(-i) = 1+2i + (4 - 3i) = 5 - i
  CHECK(d.real() == doctest::Approx(5.0));
  CHECK(d.imag() == doctest::Approx(-1.0));
}

TEST_CASE("fft2c of constant image has a single coefficient at the center") {
  const int H = 6, W = 5;
  const double c = 0.7;
  Tensor<double> img({H, W, 2});
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) img.at(y, x, 0) = c;
  Tensor<double> ks = fft2c(img);
  const double expect = c * std::sqrt(double(H * W));
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const double re = ks.at(y, x, 0), im = ks.at(y, x, 1);
      if (y == H / 2 && x == W / 2) {
        CHECK(re == doctest::Approx(expect).epsilon(1e-12));
        CHECK(std::abs(im) < 1e-12);
      } else {
        CHECK(std::abs(re) < 1e-12);
        CHECK(std::abs(im) < 1e-12);
      }
    }
}

TEST_CASE("ifft2c of a centered impulse is the constant 1/sqrt(n)") {
  const int H = 8, W = 8;
  Tensor<double> ks({H, W, 2});
  ks.at(H / 2, W / 2, 0) = 1.0;
  Tensor<double> img = ifft2c(ks);
  const double expect = 1.0 / std::sqrt(double(H * W));
  for (std::int64_t i = 0; i < img.size(); i += 2) {
    CHECK(img[i] == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::abs(img[i + 1]) < 1e-13);
  }
}

TEST_CASE("fft2c matches the brute-force centered DFT") {
  auto rng = make_rng(11);
  for (auto [H, W] : {std::pair{4, 4}, {5, 7}, {8, 6}, {9, 9}}) {
    Tensor<double> x = random_tensor<double>({H, W, 2}, rng);
    CHECK(testsupport::rel_diff(fft2c(x), naive_dft2c(x, -1)) < 1e-12);
    CHECK(testsupport::rel_diff(ifft2c(x), naive_dft2c(x, +1)) < 1e-12);
  }
}

TEST_CASE("fft round trip, including odd sizes") {
  auto rng = make_rng(7);
  for (int n : {4, 5, 16, 31, 32, 33, 64}) {
    Tensor<double> x64 = random_tensor<double>({n, n, 2}, rng);
    CHECK(testsupport::rel_diff(ifft2c(fft2c(x64)), x64) < 1e-12);
    CHECK(testsupport::rel_diff(fft2c(ifft2c(x64)), x64) < 1e-12);
    Tensor<float> x32 = cast<float>(x64);
    CHECK(testsupport::rel_diff_t(ifft2c(fft2c(x32)), x32) < 1e-6);
  }
  // rectangular with odd dims
  Tensor<double> r = random_tensor<double>({11, 24, 2}, rng);
  CHECK(testsupport::rel_diff(ifft2c(fft2c(r)), r) < 1e-12);
}

TEST_CASE("Parseval equality") {
  auto rng = make_rng(13);
  for (int n : {8, 15, 32}) {
    Tensor<double> x = random_tensor<double>({n, n, 2}, rng);
    CHECK(norm2(fft2c(x)) == doctest::Approx(norm2(x)).epsilon(1e-12));
    Tensor<float> xf = cast<float>(x);
    CHECK(norm2(fft2c(xf)) == doctest::Approx(norm2(xf)).epsilon(1e-6));
  }
}

TEST_CASE("fft adjointness by direct inner products") {
  auto rng = make_rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + int(rng() % 20);
    Tensor<double> x = random_tensor<double>({n, n, 2}, rng);
    Tensor<double> y = random_tensor<double>({n, n, 2}, rng);
    const auto lhs = cdot(fft2c(x), y);
    const auto rhs = cdot(x, ifft2c(y));
    CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-12);
  }
}

TEST_CASE("fft2c rejects non-finite input") {
  Tensor<double> x({4, 4, 2});
  x[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(fft2c(x), std::invalid_argument);
  x[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(ifft2c(x), std::invalid_argument);
}

TEST_CASE("multi-coil fft transforms each plane") {
  auto rng = make_rng(19);
  Tensor<double> ks = random_tensor<double>({3, 8, 8, 2}, rng);
  Tensor<double> imgs = ifft2c(ks);
  for (int k = 0; k < 3; ++k) {
    Tensor<double> plane({8, 8, 2});
    for (std::int64_t i = 0; i < plane.size(); ++i) plane[i] = ks[k * plane.size() + i];
    Tensor<double> single = ifft2c(plane);
    for (std::int64_t i = 0; i < plane.size(); ++i) CHECK(imgs[k * plane.size() + i] == doctest::Approx(single[i]));
  }
}
