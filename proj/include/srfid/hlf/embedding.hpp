#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "srfid/common/jsonl.hpp"
#include "srfid/hlf/model_spec.hpp"
#include "srfid/hlf/tensor.hpp"
#include "srfid/imgcore/image.hpp"

namespace srfid::hlf {

struct Embedding {
  std::vector<double> values;
};

struct HlfScore {
  std::string pair_id;
  double cosine = 1.0;
  double change_score = 0.0;
};

class OnnxGraph;

/// Loaded model plus its preprocessing contract. Exclusive use: run one
/// backend per worker thread.
class EmbeddingBackend {
 public:
  EmbeddingBackend(EmbeddingModelSpec spec, std::unique_ptr<OnnxGraph> graph);
  EmbeddingBackend(EmbeddingBackend&&) noexcept;
  EmbeddingBackend& operator=(EmbeddingBackend&&) noexcept;
  ~EmbeddingBackend();

  const EmbeddingModelSpec& spec() const noexcept { return spec_; }
  const std::string& name() const noexcept { return name_; }

  /// Runs the graph on an already normalised N x 3 x H x W tensor and
  /// returns the raw output. Throws BackendError.
  Tensor forward(const Tensor& input) const;

 private:
  EmbeddingModelSpec spec_;
  std::string name_;
  std::unique_ptr<OnnxGraph> graph_;
};

/// Throws ModelLoadError for a missing or unparsable model and
/// ModelSpecError when the graph boundary disagrees with the spec.
EmbeddingBackend load_backend(const EmbeddingModelSpec& spec);

/// Resizes per spec.resize_policy, scales samples to [0, 1], applies (x - mean) / std
/// and lays the result out as 1 x 3 x H x W.
Tensor preprocess(const EmbeddingModelSpec& spec, const img::ImageBuffer& image);

/// Throws BackendError on inference failure or non-finite output and
/// DegenerateEmbeddingError on an all-zero output.
Embedding embed(const EmbeddingBackend& backend, const img::ImageBuffer& image);

/// Clamped to [-1, 1]. Throws ArgumentError on a dimension mismatch and
/// DegenerateEmbeddingError on a zero vector.
double cosine_similarity(const Embedding& a, const Embedding& b);

/// Pretrained: `raw` is a cosine and maps to (1 - raw) / 2.
/// Fine-tuned: `raw` is the regressed change score and is clamped to [0, 1].
double derive_change_score(double raw, bool fine_tuned) noexcept;

/// Regressed change score of a fine-tuned backbone for an unclamped cosine.
double regressed_change_score(double raw_cosine) noexcept;

/// Errors are rethrown with the pair id prefixed to the message.
HlfScore hlf_score(const EmbeddingBackend& backend, const img::ImageBuffer& gt,
                   const img::ImageBuffer& sr, const std::string& pair_id);

Json to_json(const HlfScore& score, const std::string& model_name);

}  // namespace srfid::hlf
