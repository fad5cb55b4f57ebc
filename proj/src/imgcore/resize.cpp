#include "srfid/imgcore/resize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "srfid/common/error.hpp"

namespace srfid::img {

namespace {

struct Taps {
  std::vector<int> index;     // out_n * taps
  std::vector<double> weight; // out_n * taps
  int taps = 1;
};

Taps build_taps(int in_n, int out_n, ResizeKernel kernel) {
  Taps t;
  const double scale = static_cast<double>(in_n) / out_n;
  switch (kernel) {
    case ResizeKernel::nearest:
      t.taps = 1;
      for (int d = 0; d < out_n; ++d) {
        const auto src = static_cast<int>((static_cast<long long>(d) * in_n) / out_n);
        t.index.push_back(std::min(src, in_n - 1));
        t.weight.push_back(1.0);
      }
      break;
    case ResizeKernel::bilinear:
      t.taps = 2;
      for (int d = 0; d < out_n; ++d) {
        const double src = (d + 0.5) * scale - 0.5;
        const double x0 = std::floor(src);
        const double f = src - x0;
        const int i0 = static_cast<int>(x0);
        t.index.push_back(std::clamp(i0, 0, in_n - 1));
        t.index.push_back(std::clamp(i0 + 1, 0, in_n - 1));
        t.weight.push_back(1.0 - f);
        t.weight.push_back(f);
      }
      break;
    case ResizeKernel::bicubic:
      t.taps = 4;
      for (int d = 0; d < out_n; ++d) {
        const double src = (d + 0.5) * scale - 0.5;
        const double x0 = std::floor(src);
        const double f = src - x0;
        const int i0 = static_cast<int>(x0);
        for (int k = -1; k <= 2; ++k) {
          t.index.push_back(std::clamp(i0 + k, 0, in_n - 1));
          t.weight.push_back(cubic_weight(f - k));
        }
      }
      break;
  }
  return t;
}

std::vector<double> resample(std::span<const double> src, int w, int h, int nw, int nh,
                             ResizeKernel kernel) {
  const Taps tx = build_taps(w, nw, kernel);
  const Taps ty = build_taps(h, nh, kernel);

  std::vector<double> tmp(static_cast<std::size_t>(nw) * h);
  for (int y = 0; y < h; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < nw; ++x) {
      double acc = 0.0;
      for (int k = 0; k < tx.taps; ++k) {
        const auto slot = static_cast<std::size_t>(x) * tx.taps + k;
        acc += tx.weight[slot] * row[tx.index[slot]];
      }
      tmp[static_cast<std::size_t>(y) * nw + x] = acc;
    }
  }

  std::vector<double> out(static_cast<std::size_t>(nw) * nh);
  for (int y = 0; y < nh; ++y) {
    for (int x = 0; x < nw; ++x) {
      double acc = 0.0;
      for (int k = 0; k < ty.taps; ++k) {
        const auto slot = static_cast<std::size_t>(y) * ty.taps + k;
        acc += ty.weight[slot] * tmp[static_cast<std::size_t>(ty.index[slot]) * nw + x];
      }
      out[static_cast<std::size_t>(y) * nw + x] = std::clamp(acc, 0.0, 255.0);
    }
  }
  return out;
}

void check_target(int new_width, int new_height) {
  if (new_width < 1 || new_height < 1) {
    throw ArgumentError("resize target must be at least 1x1, got " + std::to_string(new_width) +
                        "x" + std::to_string(new_height));
  }
}

}  // namespace

std::string_view to_string(ResizeKernel kernel) noexcept {
  switch (kernel) {
    case ResizeKernel::nearest: return "nearest";
    case ResizeKernel::bilinear: return "bilinear";
    case ResizeKernel::bicubic: return "bicubic";
  }
  return "?";
}

ResizeKernel parse_resize_kernel(std::string_view name) {
  if (name == "nearest") return ResizeKernel::nearest;
  if (name == "bilinear") return ResizeKernel::bilinear;
  if (name == "bicubic") return ResizeKernel::bicubic;
  throw ArgumentError("unknown resize kernel '" + std::string(name) + "'");
}

double cubic_weight(double t) noexcept {
  constexpr double a = -0.5;
  const double x = std::abs(t);
  if (x <= 1.0) return (a + 2.0) * x * x * x - (a + 3.0) * x * x + 1.0;
  if (x < 2.0) return a * x * x * x - 5.0 * a * x * x + 8.0 * a * x - 4.0 * a;
  return 0.0;
}

LumaPlane resize(const LumaPlane& img, int new_width, int new_height, ResizeKernel kernel) {
  check_target(new_width, new_height);
  return LumaPlane(new_width, new_height,
                   resample(img.data(), img.width(), img.height(), new_width, new_height, kernel));
}

ImageBuffer resize(const ImageBuffer& img, int new_width, int new_height, ResizeKernel kernel) {
  check_target(new_width, new_height);
  auto planes = split_channels(img);
  std::vector<LumaPlane> out;
  out.reserve(planes.size());
  for (const auto& p : planes) out.push_back(resize(p, new_width, new_height, kernel));
  return merge_channels(out);
}

}  // namespace srfid::img
