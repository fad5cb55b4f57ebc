#pragma once

// Straight-line reference implementations used only by tests. They share
// no code with src/metrics: direct 2-D window sums, no separability, no
// moment shortcuts where avoidable.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "srfid/imgcore/image.hpp"

namespace srfid::testing {

inline double mse_oracle(const img::LumaPlane& a, const img::LumaPlane& b) {
  double acc = 0;
  for (int y = 0; y < a.height(); ++y)
    for (int x = 0; x < a.width(); ++x) acc += (a.at(x, y) - b.at(x, y)) * (a.at(x, y) - b.at(x, y));
  return acc / (static_cast<double>(a.width()) * a.height());
}

inline std::vector<double> gaussian_window_2d(int size, double sigma) {
  std::vector<double> w(static_cast<std::size_t>(size) * size);
  const int r = size / 2;
  double sum = 0;
  for (int j = 0; j < size; ++j)
    for (int i = 0; i < size; ++i) {
      const double dx = i - r, dy = j - r;
      w[j * size + i] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      sum += w[j * size + i];
    }
  for (double& v : w) v /= sum;
  return w;
}

/// SSIM by direct window sums; variances from centred second moments.
inline double ssim_oracle(const img::LumaPlane& a, const img::LumaPlane& b) {
  const int n = 11;
  const auto w = gaussian_window_2d(n, 1.5);
  const double c1 = 6.5025, c2 = 58.5225;
  double total = 0;
  int count = 0;
  for (int y0 = 0; y0 + n <= a.height(); ++y0) {
    for (int x0 = 0; x0 + n <= a.width(); ++x0) {
      double mx = 0, my = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          mx += w[j * n + i] * a.at(x0 + i, y0 + j);
          my += w[j * n + i] * b.at(x0 + i, y0 + j);
        }
      double vx = 0, vy = 0, cxy = 0;
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          const double dx = a.at(x0 + i, y0 + j) - mx;
          const double dy = b.at(x0 + i, y0 + j) - my;
          vx += w[j * n + i] * dx * dx;
          vy += w[j * n + i] * dy * dy;
          cxy += w[j * n + i] * dx * dy;
        }
      total += (2 * mx * my + c1) * (2 * cxy + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return total / count;
}

namespace vif_oracle_detail {

struct Img {
  int w, h;
  std::vector<double> v;
  double operator()(int x, int y) const { return v[y * w + x]; }
};

inline int mirror(int i, int n) {
  // half-sample symmetric: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

inline Img conv(const Img& src, const std::vector<double>& w2d, int size) {
  const int r = size / 2;
  Img out{src.w, src.h, std::vector<double>(src.v.size())};
  for (int y = 0; y < src.h; ++y)
    for (int x = 0; x < src.w; ++x) {
      double acc = 0;
      for (int j = -r; j <= r; ++j)
        for (int i = -r; i <= r; ++i)
          acc += w2d[(j + r) * size + (i + r)] * src(mirror(x + i, src.w), mirror(y + j, src.h));
      out.v[y * src.w + x] = acc;
    }
  return out;
}

}  // namespace vif_oracle_detail

/// Pixel-domain VIF written out step by step with 2-D convolutions.
inline double vif_oracle(const img::LumaPlane& ref, const img::LumaPlane& dist) {
  using namespace vif_oracle_detail;
  Img x{ref.width(), ref.height(), std::vector<double>(ref.data().begin(), ref.data().end())};
  Img y{dist.width(), dist.height(), std::vector<double>(dist.data().begin(), dist.data().end())};
  const double sigma_nsq = 2.0, eps = 1e-10;
  double num = 0, den = 0;
  for (int scale = 1; scale <= 4; ++scale) {
    const int n = static_cast<int>(std::pow(2.0, 4 - scale + 1)) + 1;
    const auto w = gaussian_window_2d(n, n / 5.0);
    if (scale > 1) {
      const Img fx = conv(x, w, n), fy = conv(y, w, n);
      Img dx{(fx.w + 1) / 2, (fx.h + 1) / 2, {}}, dy{(fy.w + 1) / 2, (fy.h + 1) / 2, {}};
      for (int j = 0; j < fx.h; j += 2)
        for (int i = 0; i < fx.w; i += 2) {
          dx.v.push_back(fx(i, j));
          dy.v.push_back(fy(i, j));
        }
      x = dx;
      y = dy;
    }
    Img xx = x, yy = y, xy = x;
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      xx.v[i] = x.v[i] * x.v[i];
      yy.v[i] = y.v[i] * y.v[i];
      xy.v[i] = x.v[i] * y.v[i];
    }
    const Img mu1 = conv(x, w, n), mu2 = conv(y, w, n);
    const Img e11 = conv(xx, w, n), e22 = conv(yy, w, n), e12 = conv(xy, w, n);
    for (std::size_t i = 0; i < x.v.size(); ++i) {
      double s1 = e11.v[i] - mu1.v[i] * mu1.v[i];
      double s2 = e22.v[i] - mu2.v[i] * mu2.v[i];
      const double s12 = e12.v[i] - mu1.v[i] * mu2.v[i];
      if (s1 < 0) s1 = 0;
      if (s2 < 0) s2 = 0;
      double g = s12 / (s1 + eps);
      double sv = s2 - g * s12;
      if (s1 < eps) { g = 0; sv = s2; s1 = 0; }
      if (s2 < eps) { g = 0; sv = 0; }
      if (g < 0) { sv = s2; g = 0; }
      if (sv <= eps) sv = eps;
      num += std::log10(1 + g * g * s1 / (sv + sigma_nsq));
      den += std::log10(1 + s1 / sigma_nsq);
    }
  }
  if (den == 0) throw std::runtime_error("vif oracle: constant reference");
  return num / den;
}

}  // namespace srfid::testing
