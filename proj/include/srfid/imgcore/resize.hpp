#pragma once

#include <string>
#include <string_view>

#include "srfid/imgcore/image.hpp"

namespace srfid::img {

enum class ResizeKernel { nearest, bilinear, bicubic };

std::string_view to_string(ResizeKernel kernel) noexcept;
/// Throws ArgumentError for an unknown name.
ResizeKernel parse_resize_kernel(std::string_view name);

/// Cubic convolution weight with a = -0.5 (Catmull-Rom).
double cubic_weight(double t) noexcept;

// Conventions:
//   nearest   src = floor(dst * in / out), i.e. the top-left sample of the
//             source footprint;
//   bilinear, bicubic  pixel-centre mapping src = (dst + 0.5) * in / out - 0.5
//             with taps clamped to the image edge.
// Outputs are clamped to [0, 255]; ImageBuffer results are rounded.
// Zero or negative target dimensions throw ArgumentError.
LumaPlane resize(const LumaPlane& img, int new_width, int new_height, ResizeKernel kernel);
ImageBuffer resize(const ImageBuffer& img, int new_width, int new_height, ResizeKernel kernel);

}  // namespace srfid::img
