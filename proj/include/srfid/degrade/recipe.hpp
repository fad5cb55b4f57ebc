#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "srfid/common/jsonl.hpp"
#include "srfid/imgcore/resize.hpp"

namespace srfid::degrade {

enum class Stage { blur, resize, noise, jpeg };
enum class Severity { mild, medium, severe };

std::string_view to_string(Stage stage) noexcept;
std::string_view to_string(Severity severity) noexcept;
Stage parse_stage(std::string_view name);
Severity parse_severity(std::string_view name);

struct BlurKind {
  bool anisotropic = false;
  double sigma_x = 0.0;  // anisotropic only
  double sigma_y = 0.0;
  double angle = 0.0;    // radians

  friend bool operator==(const BlurKind&, const BlurKind&) = default;
};

/// One fully seeded LR synthesis: four stages in `stage_order`, the resize
/// stage performing the fixed x4 downscale.
struct DegradationRecipe {
  static constexpr int kScale = 4;

  std::uint64_t seed = 0;
  std::array<Stage, 4> stage_order{Stage::blur, Stage::resize, Stage::noise, Stage::jpeg};
  double blur_sigma = 1.0;  // isotropic blur
  BlurKind blur_kind;
  img::ResizeKernel resize_kernel = img::ResizeKernel::bicubic;
  int scale = kScale;
  double noise_sigma = 5.0;
  int jpeg_quality = 90;

  /// Throws ArgumentError when any parameter leaves its global range or the
  /// stage order is not a permutation.
  void validate() const;

  friend bool operator==(const DegradationRecipe&, const DegradationRecipe&) = default;
};

struct Range {
  double lo;
  double hi;
};

/// Parameter sub-ranges per severity level. Global ranges: blur sigma
/// [0.2, 3.0], noise sigma [1, 25], JPEG quality [30, 95]; each is cut in
/// three consecutive bands, mild taking the gentlest band.
struct SeverityRanges {
  Range blur_sigma;
  Range noise_sigma;
  int jpeg_quality_lo;
  int jpeg_quality_hi;
};

SeverityRanges severity_ranges(Severity severity) noexcept;

inline constexpr double kAnisotropicProbability = 0.3;

/// Deterministic in (seed, severity). The stage order is a uniform random
/// permutation; every parameter is uniform over the severity band.
DegradationRecipe sample_recipe(std::uint64_t seed, Severity severity);

Json to_json(const DegradationRecipe& recipe);
/// Throws ArgumentError on missing/invalid fields.
DegradationRecipe recipe_from_json(const Json& j);

}  // namespace srfid::degrade
