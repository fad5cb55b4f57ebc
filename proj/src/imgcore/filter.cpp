#include "srfid/imgcore/filter.hpp"

#include <cmath>
#include <string>

#include "srfid/common/error.hpp"

namespace srfid::img {

int reflect_index(int i, int n) noexcept {
  if (n == 1) return 0;
  const int period = 2 * n;
  int m = i % period;
  if (m < 0) m += period;
  return m < n ? m : period - 1 - m;
}

std::vector<double> gaussian_kernel(double sigma, int radius) {
  if (!(sigma > 0.0)) throw ArgumentError("gaussian sigma must be > 0");
  if (radius < 0) throw ArgumentError("gaussian radius must be >= 0");
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    k[i + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

LumaPlane separable_filter(const LumaPlane& img, std::span<const double> kx,
                           std::span<const double> ky) {
  if (kx.size() % 2 == 0 || ky.size() % 2 == 0) {
    throw ArgumentError("separable kernels must have odd length");
  }
  const int w = img.width();
  const int h = img.height();
  const int rx = static_cast<int>(kx.size() / 2);
  const int ry = static_cast<int>(ky.size() / 2);
  const auto src = img.data();

  std::vector<double> tmp(src.size());
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * w;
    double* out = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -rx; k <= rx; ++k) acc += kx[k + rx] * row[reflect_index(x + k, w)];
      out[x] = acc;
    }
  }

  std::vector<double> dst(src.size());
  std::vector<int> rows(ky.size());
  for (int y = 0; y < h; ++y) {
    for (int k = -ry; k <= ry; ++k) rows[k + ry] = reflect_index(y + k, h);
    double* out = dst.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < ky.size(); ++k) {
        acc += ky[k] * tmp[static_cast<std::size_t>(rows[k]) * w + x];
      }
      out[x] = acc;
    }
  }
  return LumaPlane(w, h, std::move(dst));
}

LumaPlane filter2d(const LumaPlane& img, const Kernel2D& kernel) {
  const int kw = 2 * kernel.radius_x + 1;
  const int kh = 2 * kernel.radius_y + 1;
  if (kernel.radius_x < 0 || kernel.radius_y < 0 ||
      kernel.weights.size() != static_cast<std::size_t>(kw) * kh) {
    throw ArgumentError("malformed 2-D kernel");
  }
  const int w = img.width();
  const int h = img.height();
  std::vector<double> dst(img.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < kh; ++j) {
        const int sy = reflect_index(y + j - kernel.radius_y, h);
        for (int i = 0; i < kw; ++i) {
          const int sx = reflect_index(x + i - kernel.radius_x, w);
          acc += kernel.weights[static_cast<std::size_t>(j) * kw + i] * img.at(sx, sy);
        }
      }
      dst[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  return LumaPlane(w, h, std::move(dst));
}

LumaPlane gaussian_blur(const LumaPlane& img, double sigma) {
  if (!(sigma > 0.0)) {
    throw ArgumentError("gaussian_blur sigma must be > 0, got " + std::to_string(sigma));
  }
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  const auto k = gaussian_kernel(sigma, radius);
  return separable_filter(img, k, k);
}

LumaPlane add_gaussian_noise(const LumaPlane& img, double sigma, Rng& rng) {
  if (!(sigma >= 0.0)) throw ArgumentError("noise sigma must be >= 0");
  if (sigma == 0.0) return img;
  std::vector<double> out(img.data().begin(), img.data().end());
  for (double& v : out) v += sigma * rng.normal();
  return LumaPlane(img.width(), img.height(), std::move(out));
}

}  // namespace srfid::img
