#include "srfid/degrade/pipeline.hpp"

#include <cmath>
#include <string>

#include "srfid/common/error.hpp"
#include "srfid/common/rng.hpp"
#include "srfid/imgcore/codec.hpp"
#include "srfid/imgcore/resize.hpp"

namespace srfid::degrade {

img::ImageBuffer prepare_gt(const img::ImageBuffer& gt) {
  if (gt.width() < 8 || gt.height() < 8) {
    throw ArgumentError("GT must be at least 8x8, got " + std::to_string(gt.width()) + "x" +
                        std::to_string(gt.height()));
  }
  const int w = gt.width() / 4 * 4;
  const int h = gt.height() / 4 * 4;
  if (w == gt.width() && h == gt.height()) return gt;
  return img::crop(gt, (gt.width() - w) / 2, (gt.height() - h) / 2, w, h);
}

img::Kernel2D anisotropic_gaussian_kernel(double sigma_x, double sigma_y, double angle) {
  if (!(sigma_x > 0.0) || !(sigma_y > 0.0)) throw ArgumentError("kernel sigmas must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * std::max(sigma_x, sigma_y)));
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  // Inverse covariance of R diag(sx^2, sy^2) R^T.
  const double ix = 1.0 / (sigma_x * sigma_x);
  const double iy = 1.0 / (sigma_y * sigma_y);
  const double a = c * c * ix + s * s * iy;
  const double b = c * s * (ix - iy);
  const double d = s * s * ix + c * c * iy;

  img::Kernel2D k;
  k.radius_x = k.radius_y = radius;
  const int side = 2 * radius + 1;
  k.weights.resize(static_cast<std::size_t>(side) * side);
  double sum = 0.0;
  for (int y = -radius; y <= radius; ++y) {
    for (int x = -radius; x <= radius; ++x) {
      const double v = std::exp(-0.5 * (a * x * x + 2.0 * b * x * y + d * y * y));
      k.weights[static_cast<std::size_t>(y + radius) * side + (x + radius)] = v;
      sum += v;
    }
  }
  for (double& v : k.weights) v /= sum;
  return k;
}

img::ImageBuffer apply_degradation(const img::ImageBuffer& gt, const DegradationRecipe& recipe) {
  recipe.validate();
  if (gt.width() < 8 || gt.height() < 8) {
    throw ArgumentError("GT must be at least 8x8 for degradation");
  }
  if (gt.width() % DegradationRecipe::kScale != 0 || gt.height() % DegradationRecipe::kScale != 0) {
    throw ArgumentError("GT sides must be multiples of 4; run prepare_gt first");
  }

  auto planes = img::split_channels(gt);
  Rng noise_rng(mix_seed(recipe.seed, "noise"));

  for (Stage stage : recipe.stage_order) {
    switch (stage) {
      case Stage::blur:
        if (recipe.blur_kind.anisotropic) {
          const auto k = anisotropic_gaussian_kernel(recipe.blur_kind.sigma_x, recipe.blur_kind.sigma_y,
                                                     recipe.blur_kind.angle);
          for (auto& p : planes) p = img::filter2d(p, k);
        } else {
          for (auto& p : planes) p = img::gaussian_blur(p, recipe.blur_sigma);
        }
        break;
      case Stage::resize: {
        const int w = gt.width() / recipe.scale;
        const int h = gt.height() / recipe.scale;
        for (auto& p : planes) p = img::resize(p, w, h, recipe.resize_kernel);
        break;
      }
      case Stage::noise:
        for (auto& p : planes) p = img::add_gaussian_noise(p, recipe.noise_sigma, noise_rng);
        break;
      case Stage::jpeg: {
        const auto quantized = img::merge_channels(planes);
        const auto bytes = img::encode_image(quantized, img::ImageFormat::jpeg(recipe.jpeg_quality));
        planes = img::split_channels(img::decode_image(bytes));
        break;
      }
    }
  }
  return img::merge_channels(planes);
}

}  // namespace srfid::degrade
