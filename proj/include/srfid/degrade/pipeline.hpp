#pragma once

#include "srfid/degrade/recipe.hpp"
#include "srfid/imgcore/filter.hpp"
#include "srfid/imgcore/image.hpp"

namespace srfid::degrade {

/// Centre crop to the largest width/height multiples of 4 (offset rounds
/// down). Throws ArgumentError for images under 8x8.
img::ImageBuffer prepare_gt(const img::ImageBuffer& gt);

/// Rotated elliptical Gaussian, radius ceil(3 * max sigma), normalized.
img::Kernel2D anisotropic_gaussian_kernel(double sigma_x, double sigma_y, double angle);

/// Runs the recipe's stages in order on a GT image whose sides are
/// multiples of 4; the output is GT/4 in each dimension. Samples stay
/// floating between stages and are quantized only for the JPEG stage and
/// the final image. Throws ArgumentError for GT under 8x8, sides not
/// divisible by 4, or an invalid recipe.
img::ImageBuffer apply_degradation(const img::ImageBuffer& gt, const DegradationRecipe& recipe);

}  // namespace srfid::degrade
