#pragma once

#include <span>
#include <vector>

#include "srfid/common/rng.hpp"
#include "srfid/imgcore/image.hpp"

namespace srfid::img {

/// Half-sample symmetric reflection (-1 -> 0, n -> n-1), folded
/// periodically so any integer maps into [0, n).
int reflect_index(int i, int n) noexcept;

/// Sampled Gaussian of the given radius (length 2*radius+1), normalized to
/// sum 1.
std::vector<double> gaussian_kernel(double sigma, int radius);

/// Correlates the plane with an odd-length horizontal then vertical
/// kernel, reflecting at the borders.
LumaPlane separable_filter(const LumaPlane& img, std::span<const double> kx,
                           std::span<const double> ky);

/// Dense odd-sized 2-D kernel, row-major, centred.
struct Kernel2D {
  int radius_x = 0;
  int radius_y = 0;
  std::vector<double> weights;  // (2*radius_y+1) rows of (2*radius_x+1)
};

LumaPlane filter2d(const LumaPlane& img, const Kernel2D& kernel);

/// Separable Gaussian blur, radius ceil(3 sigma), reflection at borders.
/// Throws ArgumentError for sigma <= 0.
LumaPlane gaussian_blur(const LumaPlane& img, double sigma);

/// Adds i.i.d. N(0, sigma^2) noise per sample and clamps to [0, 255].
/// Throws ArgumentError for negative sigma.
LumaPlane add_gaussian_noise(const LumaPlane& img, double sigma, Rng& rng);

}  // namespace srfid::img
