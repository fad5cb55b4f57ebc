#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "srfid/hlf/tensor.hpp"

namespace srfid::hlf {

/// Declared graph boundary value; nullopt marks a symbolic or unknown dim.
struct ValueInfo {
  std::string name;
  std::vector<std::optional<std::int64_t>> dims;
};

/// Interpreter for single-input, single-output ONNX graphs restricted to
/// float32 activations and the operator subset listed in `supported_ops()`.
class OnnxGraph {
 public:
  /// Throws ModelLoadError if the file is missing, is not a model, uses an
  /// unsupported operator, or its graph is not a DAG over known values.
  static OnnxGraph load(const std::filesystem::path& path);
  static OnnxGraph parse(std::span<const std::uint8_t> bytes);

  OnnxGraph(OnnxGraph&&) noexcept;
  OnnxGraph& operator=(OnnxGraph&&) noexcept;
  ~OnnxGraph();

  const ValueInfo& input() const noexcept;
  const ValueInfo& output() const noexcept;
  std::size_t node_count() const noexcept;

  /// Executes the graph; throws BackendError on any runtime failure.
  Tensor run(const Tensor& input) const;

  static std::span<const std::string_view> supported_ops() noexcept;

 private:
  struct Impl;
  explicit OnnxGraph(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace srfid::hlf
