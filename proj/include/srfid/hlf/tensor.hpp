#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace srfid::hlf {

/// Dense row-major tensor. Float tensors carry activations and weights;
/// int64 tensors only carry shapes and axes.
struct Tensor {
  enum class Type { f32, i64 };

  Type type = Type::f32;
  std::vector<std::int64_t> shape;
  std::vector<float> f;
  std::vector<std::int64_t> i;

  static Tensor floats(std::vector<std::int64_t> shape, std::vector<float> data);
  static Tensor ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data);

  std::size_t numel() const noexcept;
  std::size_t rank() const noexcept { return shape.size(); }
};

std::size_t element_count(std::span<const std::int64_t> shape) noexcept;
std::string shape_string(std::span<const std::int64_t> shape);

}  // namespace srfid::hlf
