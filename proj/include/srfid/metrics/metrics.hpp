#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "srfid/common/orientation.hpp"
#include "srfid/imgcore/image.hpp"

namespace srfid::metrics {

struct MetricValue {
  std::string name;
  double value = 0.0;  // +inf when `infinite` is set
  Orientation orientation = Orientation::higher_is_better;
  bool infinite = false;
};

enum class MetricKind { psnr, ssim, vif };

std::string_view to_string(MetricKind kind) noexcept;
MetricKind parse_metric(std::string_view name);
/// Comma separated list, e.g. "psnr,ssim,vif".
std::vector<MetricKind> parse_metric_list(std::string_view list);

inline constexpr double kPeak = 255.0;

/// Mean squared error. Throws ArgumentError on a dimension mismatch.
double mse(const img::LumaPlane& a, const img::LumaPlane& b);

/// 10 log10(255^2 / MSE); identical inputs give the infinite flag.
MetricValue psnr(const img::LumaPlane& a, const img::LumaPlane& b);

/// Mean SSIM over the valid region of an 11x11 Gaussian window
/// (sigma 1.5), C1 = (0.01 L)^2, C2 = (0.03 L)^2. Both images must be at
/// least 11x11.
MetricValue ssim(const img::LumaPlane& a, const img::LumaPlane& b);

/// Pixel-domain VIF over four scales, reference first. Needs at least
/// 32x32 inputs; a constant reference raises DegenerateInputError.
MetricValue vif(const img::LumaPlane& ref, const img::LumaPlane& dist);

MetricValue compute(MetricKind kind, const img::LumaPlane& ref, const img::LumaPlane& dist);

}  // namespace srfid::metrics
