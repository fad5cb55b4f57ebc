#pragma once

// Reference CPU kernels for the operator subset the interpreter accepts.
// All kernels throw BackendError on shape or attribute violations.

#include <cstdint>
#include <optional>
#include <vector>

#include "srfid/hlf/tensor.hpp"

namespace srfid::hlf::ops {

enum class Binary { add, sub, mul, div };
enum class Unary { relu, sigmoid, tanh, sqrt, exp, neg };

Tensor binary(Binary op, const Tensor& a, const Tensor& b);
Tensor unary(Unary op, const Tensor& x);

Tensor gemm(const Tensor& a, const Tensor& b, const Tensor* c, float alpha, float beta,
            bool trans_a, bool trans_b);
Tensor matmul(const Tensor& a, const Tensor& b);

struct ConvParams {
  std::vector<std::int64_t> strides;    // [sh, sw]
  std::vector<std::int64_t> pads;       // [top, left, bottom, right]
  std::vector<std::int64_t> dilations;  // [dh, dw]
  std::int64_t group = 1;
};
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvParams& p);

struct PoolParams {
  std::vector<std::int64_t> kernel;   // [kh, kw]
  std::vector<std::int64_t> strides;  // [sh, sw]
  std::vector<std::int64_t> pads;     // [top, left, bottom, right]
  bool count_include_pad = false;
};
Tensor max_pool(const Tensor& x, const PoolParams& p);
Tensor average_pool(const Tensor& x, const PoolParams& p);
Tensor global_average_pool(const Tensor& x);
Tensor global_max_pool(const Tensor& x);

Tensor flatten(const Tensor& x, std::int64_t axis);
Tensor reshape(const Tensor& x, const std::vector<std::int64_t>& target, bool allow_zero);
Tensor transpose(const Tensor& x, std::vector<std::int64_t> perm);
Tensor squeeze(const Tensor& x, std::vector<std::int64_t> axes);
Tensor unsqueeze(const Tensor& x, std::vector<std::int64_t> axes);
Tensor concat(const std::vector<const Tensor*>& xs, std::int64_t axis);

Tensor reduce_mean(const Tensor& x, std::vector<std::int64_t> axes, bool keepdims);
Tensor batch_norm(const Tensor& x, const Tensor& scale, const Tensor& bias, const Tensor& mean,
                  const Tensor& var, float epsilon);
Tensor softmax(const Tensor& x, std::int64_t axis);
Tensor lp_normalize(const Tensor& x, std::int64_t axis, std::int64_t p);

}  // namespace srfid::hlf::ops
