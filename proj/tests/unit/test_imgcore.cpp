#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "srfid/common/error.hpp"
#include "srfid/imgcore/codec.hpp"
#include "srfid/imgcore/filter.hpp"
#include "srfid/imgcore/resize.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"

using namespace srfid;
using srfid::img::ImageBuffer;
using srfid::img::LumaPlane;

namespace {

// Keys cubic written directly from the piecewise definition (a = -0.5).
double keys(double x) {
  x = std::fabs(x);
  if (x < 1) return 1.5 * x * x * x - 2.5 * x * x + 1;
  if (x < 2) return -0.5 * x * x * x + 2.5 * x * x - 4 * x + 2;
  return 0;
}

// Per-pixel kernel sum over every source sample, clamped to the edge.
double bicubic_oracle(const LumaPlane& src, int nw, int nh, int X, int Y) {
  const double sx = (X + 0.5) * src.width() / nw - 0.5;
  const double sy = (Y + 0.5) * src.height() / nh - 0.5;
  double acc = 0;
  for (int j = static_cast<int>(std::floor(sy)) - 1; j <= static_cast<int>(std::floor(sy)) + 2; ++j) {
    for (int i = static_cast<int>(std::floor(sx)) - 1; i <= static_cast<int>(std::floor(sx)) + 2; ++i) {
      const int ci = std::clamp(i, 0, src.width() - 1);
      const int cj = std::clamp(j, 0, src.height() - 1);
      acc += keys(sx - i) * keys(sy - j) * src.at(ci, cj);
    }
  }
  return std::clamp(acc, 0.0, 255.0);
}

double plane_sum(const LumaPlane& p) {
  return std::accumulate(p.data().begin(), p.data().end(), 0.0);
}

}  // namespace

TEST_CASE("ImageBuffer enforces its invariants") {
  CHECK_THROWS_AS(ImageBuffer(0, 1, 1, {}), ArgumentError);
  CHECK_THROWS_AS(ImageBuffer(1, 1, 2, {0, 0}), ArgumentError);
  CHECK_THROWS_AS(ImageBuffer(2, 2, 3, std::vector<std::uint8_t>(11)), ArgumentError);
  ImageBuffer ok(2, 1, 3, {1, 2, 3, 4, 5, 6});
  CHECK(ok.at(1, 0, 2) == 6);
}

TEST_CASE("PNG round-trips bit-exactly") {
  testing::TempDir dir;
  ImageBuffer rgb(2, 2, 3, {0, 1, 2, 3, 4, 5, 250, 251, 252, 253, 254, 255});
  img::save_image(rgb, dir / "a.png", img::ImageFormat::png());
  CHECK(img::load_image(dir / "a.png") == rgb);

  ImageBuffer gray(3, 1, 1, {7, 8, 9});
  img::save_image(gray, dir / "g.png", img::ImageFormat::png());
  const auto loaded = img::load_image(dir / "g.png");
  CHECK(loaded.channels() == 1);
  CHECK(loaded == gray);
}

TEST_CASE("16-bit PNG keeps the high byte and alpha is dropped") {
  const auto g16 = img::load_image(std::string(SRFID_FIXTURE_DIR) + "/gray16.png");
  REQUIRE(g16.channels() == 1);
  CHECK(std::vector<std::uint8_t>(g16.data().begin(), g16.data().end()) ==
        std::vector<std::uint8_t>{0x12, 0xAB, 0xFF, 0x00});

  const auto rgba = img::load_image(std::string(SRFID_FIXTURE_DIR) + "/rgba.png");
  REQUIRE(rgba.channels() == 3);
  CHECK(std::vector<std::uint8_t>(rgba.data().begin(), rgba.data().end()) ==
        std::vector<std::uint8_t>{10, 20, 30, 40, 50, 60});
}

TEST_CASE("JPEG save keeps dimensions; quality is validated") {
  testing::TempDir dir;
  Rng rng(3);
  const auto img = testing::natural_rgb(40, 24, 11);
  img::save_image(img, dir / "a.jpg", img::ImageFormat::jpeg(95));
  const auto back = img::load_image(dir / "a.jpg");
  CHECK(back.width() == 40);
  CHECK(back.height() == 24);
  CHECK(back.channels() == 3);
  CHECK_THROWS_AS(img::save_image(img, dir / "b.jpg", img::ImageFormat::jpeg(0)), ArgumentError);
  CHECK_THROWS_AS(img::encode_image(img, img::ImageFormat::jpeg(101)), ArgumentError);
}

TEST_CASE("decode errors: truncated, garbage, missing, unwritable") {
  testing::TempDir dir;
  const auto img = testing::natural_rgb(32, 32, 5);
  for (auto fmt : {img::ImageFormat::png(), img::ImageFormat::jpeg(90)}) {
    auto bytes = img::encode_image(img, fmt);
    bytes.resize(bytes.size() / 2);
    CHECK_THROWS_AS(img::decode_image(bytes), FormatError);
  }
  const std::vector<std::uint8_t> garbage{'G', 'I', 'F', '8', '9', 'a', 0, 0};
  CHECK_THROWS_AS(img::decode_image(garbage), FormatError);
  CHECK_THROWS_AS(img::load_image(dir / "nope.png"), IoError);
  CHECK_THROWS_AS(img::save_image(img, dir / "no/such/dir/x.png", img::ImageFormat::png()), IoError);
}

TEST_CASE("to_luma uses BT.601 weights") {
  const auto gray = img::to_luma(ImageBuffer::filled(3, 2, 3, 100));
  for (double v : gray.data()) CHECK(v == doctest::Approx(100.0).epsilon(1e-12));

  const auto red = img::to_luma(ImageBuffer(1, 1, 3, {255, 0, 0}));
  CHECK(red.at(0, 0) == doctest::Approx(76.245).epsilon(1e-12));

  const ImageBuffer one(2, 1, 1, {42, 7});
  const auto y = img::to_luma(one);
  CHECK(y.at(0, 0) == 42.0);
  CHECK(y.at(1, 0) == 7.0);
  // idempotent on 1-channel input
  CHECK(img::to_luma(img::merge_channels(std::vector<LumaPlane>{y})) == y);
}

TEST_CASE("resize: uniform images stay uniform for every kernel") {
  for (auto k : {img::ResizeKernel::nearest, img::ResizeKernel::bilinear, img::ResizeKernel::bicubic}) {
    const auto out = img::resize(LumaPlane::filled(9, 7, 123.0), 4, 13, k);
    CHECK(out.width() == 4);
    CHECK(out.height() == 13);
    for (double v : out.data()) CHECK(v == doctest::Approx(123.0).epsilon(1e-12));
  }
}

TEST_CASE("resize: nearest 4x4 -> 1x1 picks the top-left sample") {
  std::vector<double> v(16);
  std::iota(v.begin(), v.end(), 10.0);
  const auto out = img::resize(LumaPlane(4, 4, v), 1, 1, img::ResizeKernel::nearest);
  CHECK(out.at(0, 0) == 10.0);
}

TEST_CASE("resize: 8x8 ramp -> 2x2 bicubic matches the kernel-sum oracle") {
  std::vector<double> v(64);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) v[y * 8 + x] = 10.0 * x + 20.0 * y + 5.0;
  const LumaPlane ramp(8, 8, v);
  const auto out = img::resize(ramp, 2, 2, img::ResizeKernel::bicubic);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) CHECK(out.at(x, y) == doctest::Approx(bicubic_oracle(ramp, 2, 2, x, y)).epsilon(1e-12));

  Rng rng(17);
  const auto noise = testing::random_plane(13, 11, rng);
  const auto up = img::resize(noise, 29, 5, img::ResizeKernel::bicubic);
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 29; ++x) CHECK(up.at(x, y) == doctest::Approx(bicubic_oracle(noise, 29, 5, x, y)).epsilon(1e-12));
}

TEST_CASE("resize: same size is the identity; zero size is rejected") {
  Rng rng(1);
  const auto p = testing::random_plane(12, 9, rng);
  for (auto k : {img::ResizeKernel::nearest, img::ResizeKernel::bilinear, img::ResizeKernel::bicubic}) {
    const auto out = img::resize(p, 12, 9, k);
    for (std::size_t i = 0; i < p.size(); ++i) CHECK(std::abs(out.data()[i] - p.data()[i]) <= 1e-9);
    CHECK_THROWS_AS(img::resize(p, 0, 4, k), ArgumentError);
  }
  const auto rgb = testing::random_image(6, 5, 3, rng);
  CHECK(img::resize(rgb, 6, 5, img::ResizeKernel::bicubic) == rgb);
  CHECK(img::resize(rgb, 3, 2, img::ResizeKernel::bilinear).channels() == 3);
  CHECK(img::parse_resize_kernel("bicubic") == img::ResizeKernel::bicubic);
  CHECK_THROWS_AS(img::parse_resize_kernel("lanczos"), ArgumentError);
}

TEST_CASE("gaussian_blur: uniform images are fixed points") {
  const auto out = img::gaussian_blur(LumaPlane::filled(20, 15, 77.0), 1.7);
  for (double v : out.data()) CHECK(std::abs(v - 77.0) <= 1e-9);
  CHECK_THROWS_AS(img::gaussian_blur(LumaPlane::filled(4, 4, 0.0), 0.0), ArgumentError);
  CHECK_THROWS_AS(img::gaussian_blur(LumaPlane::filled(4, 4, 0.0), -1.0), ArgumentError);
}

TEST_CASE("gaussian_blur: impulse response matches direct 2-D kernel evaluation") {
  const int n = 21;
  std::vector<double> v(n * n, 0.0);
  v[10 * n + 10] = 255.0;
  const auto out = img::gaussian_blur(LumaPlane(n, n, v), 1.0);

  // Direct 2-D evaluation of the normalized radius-3 Gaussian window.
  double norm = 0;
  for (int j = -3; j <= 3; ++j)
    for (int i = -3; i <= 3; ++i) norm += std::exp(-(i * i + j * j) / 2.0);
  for (int j = -3; j <= 3; ++j)
    for (int i = -3; i <= 3; ++i) {
      const double expected = 255.0 * std::exp(-(i * i + j * j) / 2.0) / norm;
      CHECK(out.at(10 + i, 10 + j) == doctest::Approx(expected).epsilon(1e-12));
    }
  CHECK(out.at(0, 0) == 0.0);
  CHECK(std::abs(plane_sum(out) - 255.0) <= 1e-6);
}

TEST_CASE("gaussian_blur commutes with intensity shifts") {
  auto base = testing::natural_image(24, 24, 9);
  std::vector<double> lo(base.data().begin(), base.data().end());
  std::vector<double> hi(lo);
  for (double& x : lo) x = x * 0.5;
  for (double& x : hi) x = x * 0.5 + 60.0;
  const auto a = img::gaussian_blur(LumaPlane(24, 24, lo), 2.3);
  const auto b = img::gaussian_blur(LumaPlane(24, 24, hi), 2.3);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b.data()[i] - a.data()[i] - 60.0) <= 1e-6);
}

TEST_CASE("gaussian_blur handles kernels wider than the image") {
  const auto out = img::gaussian_blur(LumaPlane::filled(2, 3, 40.0), 3.0);
  for (double v : out.data()) CHECK(std::abs(v - 40.0) <= 1e-9);
}

TEST_CASE("add_gaussian_noise: degenerate, deterministic, calibrated") {
  const auto gray = LumaPlane::filled(400, 400, 128.0);
  Rng r0(5);
  CHECK(img::add_gaussian_noise(gray, 0.0, r0) == gray);

  Rng r1(42), r2(42);
  const auto a = img::add_gaussian_noise(gray, 10.0, r1);
  const auto b = img::add_gaussian_noise(gray, 10.0, r2);
  CHECK(a == b);

  double mean = plane_sum(a) / static_cast<double>(a.size());
  double var = 0;
  for (double v : a.data()) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(a.size() - 1));
  CHECK(std::abs(sd - 10.0) <= 0.5);
  CHECK(std::abs(mean - 128.0) <= 0.1);

  Rng r3(1);
  CHECK_THROWS_AS(img::add_gaussian_noise(gray, -1.0, r3), ArgumentError);
}

TEST_CASE("reflect_index folds symmetrically") {
  CHECK(img::reflect_index(-1, 5) == 0);
  CHECK(img::reflect_index(-2, 5) == 1);
  CHECK(img::reflect_index(5, 5) == 4);
  CHECK(img::reflect_index(6, 5) == 3);
  CHECK(img::reflect_index(12, 5) == 2);
  CHECK(img::reflect_index(-7, 3) == 0);
  CHECK(img::reflect_index(3, 1) == 0);
}
