#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>

#include "srfid/common/jsonl.hpp"

namespace srfid::hlf {

enum class ResizePolicy { stretch, center_crop_after_resize };

std::string_view to_string(ResizePolicy policy) noexcept;
/// Throws ModelSpecError for an unknown name.
ResizePolicy parse_resize_policy(std::string_view name);

struct EmbeddingModelSpec {
  std::filesystem::path model_path;
  int input_height = 224;
  int input_width = 224;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};
  ResizePolicy resize_policy = ResizePolicy::stretch;
  int embedding_dim = 0;
  bool fine_tuned = false;

  /// Throws ModelSpecError on non-positive sizes or std entries.
  void validate() const;
};

/// Sidecar JSON form. `base_dir` anchors a relative model_path.
EmbeddingModelSpec spec_from_json(const Json& j, const std::filesystem::path& base_dir);
/// `model_path` is written relative to `base_dir` when it lies beneath it.
Json to_json(const EmbeddingModelSpec& spec, const std::filesystem::path& base_dir);

/// Reads `<model>.spec.json`; throws ModelLoadError if the file is
/// unreadable and ModelSpecError if its content is invalid.
EmbeddingModelSpec load_model_spec(const std::filesystem::path& sidecar);

/// Display name derived from the model file stem.
std::string model_name(const EmbeddingModelSpec& spec);

}  // namespace srfid::hlf
