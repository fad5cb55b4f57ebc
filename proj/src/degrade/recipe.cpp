#include "srfid/degrade/recipe.hpp"

#include <algorithm>
#include <numbers>

#include "srfid/common/error.hpp"
#include "srfid/common/rng.hpp"

namespace srfid::degrade {

std::string_view to_string(Stage stage) noexcept {
  switch (stage) {
    case Stage::blur: return "blur";
    case Stage::resize: return "resize";
    case Stage::noise: return "noise";
    case Stage::jpeg: return "jpeg";
  }
  return "?";
}

std::string_view to_string(Severity severity) noexcept {
  switch (severity) {
    case Severity::mild: return "mild";
    case Severity::medium: return "medium";
    case Severity::severe: return "severe";
  }
  return "?";
}

Stage parse_stage(std::string_view name) {
  for (Stage s : {Stage::blur, Stage::resize, Stage::noise, Stage::jpeg}) {
    if (to_string(s) == name) return s;
  }
  throw ArgumentError("unknown degradation stage '" + std::string(name) + "'");
}

Severity parse_severity(std::string_view name) {
  for (Severity s : {Severity::mild, Severity::medium, Severity::severe}) {
    if (to_string(s) == name) return s;
  }
  throw ArgumentError("unknown severity '" + std::string(name) + "' (mild|medium|severe)");
}

SeverityRanges severity_ranges(Severity severity) noexcept {
  switch (severity) {
    case Severity::mild: return {{0.2, 1.0}, {1.0, 9.0}, 74, 95};
    case Severity::medium: return {{1.0, 2.0}, {9.0, 17.0}, 52, 73};
    case Severity::severe: return {{2.0, 3.0}, {17.0, 25.0}, 30, 51};
  }
  return {{0.2, 3.0}, {1.0, 25.0}, 30, 95};
}

void DegradationRecipe::validate() const {
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  std::array<Stage, 4> sorted = stage_order;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != std::array<Stage, 4>{Stage::blur, Stage::resize, Stage::noise, Stage::jpeg}) {
    throw ArgumentError("stage_order must be a permutation of blur, resize, noise, jpeg");
  }
  if (!in(blur_sigma, 0.2, 3.0)) throw ArgumentError("blur_sigma outside [0.2, 3.0]");
  if (blur_kind.anisotropic) {
    if (!in(blur_kind.sigma_x, 0.2, 3.0) || !in(blur_kind.sigma_y, 0.2, 3.0)) {
      throw ArgumentError("anisotropic sigmas outside [0.2, 3.0]");
    }
    if (!in(blur_kind.angle, 0.0, std::numbers::pi)) throw ArgumentError("blur angle outside [0, pi]");
  }
  if (scale != kScale) throw ArgumentError("scale must be 4");
  if (!in(noise_sigma, 1.0, 25.0)) throw ArgumentError("noise_sigma outside [1, 25]");
  if (jpeg_quality < 30 || jpeg_quality > 95) throw ArgumentError("jpeg_quality outside [30, 95]");
}

DegradationRecipe sample_recipe(std::uint64_t seed, Severity severity) {
  const SeverityRanges r = severity_ranges(severity);
  Rng rng(mix_seed(seed, to_string(severity)));
  DegradationRecipe recipe;
  recipe.seed = seed;
  rng.shuffle(std::span<Stage>(recipe.stage_order));

  // Draw every value in a fixed order so the stream layout never depends
  // on earlier outcomes.
  recipe.blur_sigma = rng.uniform(r.blur_sigma.lo, r.blur_sigma.hi);
  const bool anisotropic = rng.uniform01() < kAnisotropicProbability;
  const double sx = rng.uniform(r.blur_sigma.lo, r.blur_sigma.hi);
  const double sy = rng.uniform(r.blur_sigma.lo, r.blur_sigma.hi);
  const double angle = rng.uniform(0.0, std::numbers::pi);
  if (anisotropic) recipe.blur_kind = {true, sx, sy, angle};
  constexpr img::ResizeKernel kernels[] = {img::ResizeKernel::nearest, img::ResizeKernel::bilinear,
                                           img::ResizeKernel::bicubic};
  recipe.resize_kernel = kernels[rng.below(3)];
  recipe.noise_sigma = rng.uniform(r.noise_sigma.lo, r.noise_sigma.hi);
  recipe.jpeg_quality = static_cast<int>(rng.uniform_int(r.jpeg_quality_lo, r.jpeg_quality_hi));
  return recipe;
}

Json to_json(const DegradationRecipe& recipe) {
  Json order = Json::array();
  for (Stage s : recipe.stage_order) order.push_back(std::string(to_string(s)));
  Json kind;
  if (recipe.blur_kind.anisotropic) {
    kind = {{"type", "anisotropic"},
            {"sigma_x", recipe.blur_kind.sigma_x},
            {"sigma_y", recipe.blur_kind.sigma_y},
            {"angle", recipe.blur_kind.angle}};
  } else {
    kind = {{"type", "isotropic"}};
  }
  return Json{{"seed", recipe.seed},
              {"stage_order", order},
              {"blur_sigma", recipe.blur_sigma},
              {"blur_kind", kind},
              {"resize_kernel", std::string(img::to_string(recipe.resize_kernel))},
              {"scale", recipe.scale},
              {"noise_sigma", recipe.noise_sigma},
              {"jpeg_quality", recipe.jpeg_quality}};
}

DegradationRecipe recipe_from_json(const Json& j) {
  DegradationRecipe r;
  try {
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto& order = j.at("stage_order");
    if (!order.is_array() || order.size() != 4) throw ArgumentError("stage_order must have 4 entries");
    for (std::size_t i = 0; i < 4; ++i) r.stage_order[i] = parse_stage(order[i].get<std::string>());
    r.blur_sigma = j.at("blur_sigma").get<double>();
    const auto& kind = j.at("blur_kind");
    const auto type = kind.at("type").get<std::string>();
    if (type == "anisotropic") {
      r.blur_kind = {true, kind.at("sigma_x").get<double>(), kind.at("sigma_y").get<double>(),
                     kind.at("angle").get<double>()};
    } else if (type != "isotropic") {
      throw ArgumentError("unknown blur_kind '" + type + "'");
    }
    r.resize_kernel = img::parse_resize_kernel(j.at("resize_kernel").get<std::string>());
    r.scale = j.at("scale").get<int>();
    r.noise_sigma = j.at("noise_sigma").get<double>();
    r.jpeg_quality = j.at("jpeg_quality").get<int>();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed recipe: ") + e.what());
  }
  r.validate();
  return r;
}

}  // namespace srfid::degrade
