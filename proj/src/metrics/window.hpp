#pragma once

// Unclamped floating grids and windowed filtering shared by SSIM and VIF.

#include <span>
#include <vector>

#include "srfid/imgcore/image.hpp"

namespace srfid::metrics::detail {

struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> v;

  double at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

Grid from_plane(const img::LumaPlane& p);
Grid multiply(const Grid& a, const Grid& b);

/// Separable correlation keeping only positions where the whole window
/// fits: output is (w - k + 1) x (h - k + 1).
Grid filter_valid(const Grid& g, std::span<const double> k);

/// Separable correlation with half-sample symmetric reflection; same size.
Grid filter_same(const Grid& g, std::span<const double> k);

/// Keeps every second sample starting at (0, 0).
Grid downsample2(const Grid& g);

}  // namespace srfid::metrics::detail
