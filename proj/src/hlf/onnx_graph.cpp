#include "srfid/hlf/onnx_graph.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <unordered_map>
#include <unordered_set>

#include "onnx_subset.pb.h"
#include "srfid/common/error.hpp"
#include "tensor_ops.hpp"

namespace srfid::hlf {
namespace {

namespace pb = srfid::onnx;

constexpr std::array<std::string_view, 34> kOps = {
    "Add",       "Sub",        "Mul",         "Div",          "Relu",
    "Sigmoid",   "Tanh",       "Sqrt",        "Exp",          "Neg",
    "Identity",  "Dropout",    "Gemm",        "MatMul",       "Conv",
    "MaxPool",   "AveragePool", "GlobalAveragePool", "GlobalMaxPool", "Flatten",
    "Reshape",   "Transpose",  "Squeeze",     "Unsqueeze",    "Concat",
    "ReduceMean", "BatchNormalization", "Softmax", "LpNormalization", "Constant",
    "Clip",      "Pow",        "Erf",         "Gelu"};

// Data type codes from the ONNX TensorProto enum.
enum DataType : int { kFloat = 1, kInt32 = 6, kInt64 = 7, kDouble = 11 };
// Attribute type codes from the ONNX AttributeProto enum.
enum AttrType : int { kAttrFloat = 1, kAttrInt = 2, kAttrString = 3, kAttrTensor = 4,
                      kAttrFloats = 6, kAttrInts = 7 };

struct Attribute {
  int type = 0;
  float f = 0.0f;
  std::int64_t i = 0;
  std::string s;
  std::vector<float> floats;
  std::vector<std::int64_t> ints;
  std::optional<Tensor> t;
};

struct Node {
  std::string name;
  std::string op;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, Attribute> attrs;

  const Attribute* attr(const std::string& key) const {
    auto it = attrs.find(key);
    return it == attrs.end() ? nullptr : &it->second;
  }
  std::int64_t attr_int(const std::string& key, std::int64_t fallback) const {
    const Attribute* a = attr(key);
    return a ? a->i : fallback;
  }
  float attr_float(const std::string& key, float fallback) const {
    const Attribute* a = attr(key);
    return a ? a->f : fallback;
  }
  std::vector<std::int64_t> attr_ints(const std::string& key) const {
    const Attribute* a = attr(key);
    return a ? a->ints : std::vector<std::int64_t>{};
  }
  std::string attr_string(const std::string& key, std::string fallback) const {
    const Attribute* a = attr(key);
    return a ? a->s : fallback;
  }
};

template <typename T>
std::vector<T> from_raw(const std::string& raw, std::size_t count, const std::string& name) {
  if (raw.size() != count * sizeof(T)) {
    throw ModelLoadError("tensor '" + name + "': raw_data size does not match its shape");
  }
  std::vector<T> out(count);
  if (count > 0) std::memcpy(out.data(), raw.data(), raw.size());
  return out;
}

Tensor convert_tensor(const pb::TensorProto& tp) {
  const std::string& name = tp.name();
  if (tp.data_location() == 1) {
    throw ModelLoadError("tensor '" + name + "': external data is not supported");
  }
  std::vector<std::int64_t> shape(tp.dims().begin(), tp.dims().end());
  for (auto d : shape) {
    if (d < 0) throw ModelLoadError("tensor '" + name + "': negative dimension");
  }
  const std::size_t n = element_count(shape);
  const bool raw = tp.has_raw_data();
  auto check = [&](std::size_t got) {
    if (got != n) throw ModelLoadError("tensor '" + name + "': data does not match its shape");
  };
  switch (tp.data_type()) {
    case kFloat: {
      if (raw) return Tensor::floats(shape, from_raw<float>(tp.raw_data(), n, name));
      check(static_cast<std::size_t>(tp.float_data_size()));
      return Tensor::floats(shape, {tp.float_data().begin(), tp.float_data().end()});
    }
    case kDouble: {
      std::vector<double> d = raw ? from_raw<double>(tp.raw_data(), n, name)
                                  : std::vector<double>(tp.double_data().begin(), tp.double_data().end());
      check(d.size());
      return Tensor::floats(shape, std::vector<float>(d.begin(), d.end()));
    }
    case kInt64: {
      if (raw) return Tensor::ints(shape, from_raw<std::int64_t>(tp.raw_data(), n, name));
      check(static_cast<std::size_t>(tp.int64_data_size()));
      return Tensor::ints(shape, {tp.int64_data().begin(), tp.int64_data().end()});
    }
    case kInt32: {
      std::vector<std::int32_t> d = raw ? from_raw<std::int32_t>(tp.raw_data(), n, name)
                                        : std::vector<std::int32_t>(tp.int32_data().begin(),
                                                                    tp.int32_data().end());
      check(d.size());
      return Tensor::ints(shape, std::vector<std::int64_t>(d.begin(), d.end()));
    }
    default:
      throw ModelLoadError("tensor '" + name + "': unsupported data type " +
                           std::to_string(tp.data_type()));
  }
}

ValueInfo convert_value_info(const pb::ValueInfoProto& vi) {
  ValueInfo out;
  out.name = vi.name();
  if (!vi.has_type() || !vi.type().has_tensor_type()) {
    throw ModelLoadError("value '" + vi.name() + "' is not a tensor");
  }
  const auto& tt = vi.type().tensor_type();
  if (tt.has_elem_type() && tt.elem_type() != kFloat) {
    throw ModelLoadError("value '" + vi.name() + "' must be float32");
  }
  if (tt.has_shape()) {
    for (const auto& d : tt.shape().dim()) {
      if (d.has_dim_value() && d.dim_value() > 0) out.dims.emplace_back(d.dim_value());
      else out.dims.emplace_back(std::nullopt);
    }
  }
  return out;
}

Attribute convert_attribute(const pb::AttributeProto& ap) {
  Attribute a;
  a.type = ap.type();
  a.f = ap.f();
  a.i = ap.i();
  a.s = ap.s();
  a.floats.assign(ap.floats().begin(), ap.floats().end());
  a.ints.assign(ap.ints().begin(), ap.ints().end());
  if (ap.has_t()) a.t = convert_tensor(ap.t());
  // Producers occasionally omit the type tag; infer it from the payload.
  if (a.type == 0) {
    if (ap.has_t()) a.type = kAttrTensor;
    else if (!a.ints.empty()) a.type = kAttrInts;
    else if (!a.floats.empty()) a.type = kAttrFloats;
    else if (ap.has_s()) a.type = kAttrString;
    else if (ap.has_f()) a.type = kAttrFloat;
    else a.type = kAttrInt;
  }
  return a;
}

std::vector<std::int64_t> as_ints(const Tensor* t, const char* what) {
  if (t == nullptr) return {};
  if (t->type != Tensor::Type::i64) throw BackendError(std::string(what) + " must be an int64 tensor");
  return t->i;
}

// Resolves explicit pads from auto_pad for 2-D spatial ops.
std::vector<std::int64_t> resolve_pads(const Node& node, const Tensor& x,
                                       const std::vector<std::int64_t>& kernel,
                                       const std::vector<std::int64_t>& strides,
                                       const std::vector<std::int64_t>& dilations) {
  const std::string mode = node.attr_string("auto_pad", "NOTSET");
  if (mode == "NOTSET") {
    auto pads = node.attr_ints("pads");
    if (!pads.empty() && pads.size() != 4) throw BackendError(node.op + ": pads must have 4 entries");
    return pads;
  }
  if (mode == "VALID") return {0, 0, 0, 0};
  if (mode != "SAME_UPPER" && mode != "SAME_LOWER") {
    throw BackendError(node.op + ": unknown auto_pad " + mode);
  }
  if (x.rank() != 4 || kernel.size() != 2) throw BackendError(node.op + ": auto_pad needs a 2-D kernel");
  std::vector<std::int64_t> pads(4);
  for (int k = 0; k < 2; ++k) {
    const std::int64_t in = x.shape[2 + k];
    const std::int64_t s = k < static_cast<int>(strides.size()) ? strides[k] : 1;
    const std::int64_t d = k < static_cast<int>(dilations.size()) ? dilations[k] : 1;
    const std::int64_t out = (in + s - 1) / s;
    const std::int64_t total = std::max<std::int64_t>(0, (out - 1) * s + (kernel[k] - 1) * d + 1 - in);
    const std::int64_t small = total / 2;
    const std::int64_t begin = mode == "SAME_UPPER" ? small : total - small;
    pads[k] = begin;
    pads[k + 2] = total - begin;
  }
  return pads;
}

Tensor eval_constant(const Node& node) {
  if (const Attribute* a = node.attr("value"); a && a->t) return *a->t;
  if (const Attribute* a = node.attr("value_float")) return Tensor::floats({}, {a->f});
  if (const Attribute* a = node.attr("value_floats")) {
    return Tensor::floats({static_cast<std::int64_t>(a->floats.size())}, a->floats);
  }
  if (const Attribute* a = node.attr("value_int")) return Tensor::ints({}, {a->i});
  if (const Attribute* a = node.attr("value_ints")) {
    return Tensor::ints({static_cast<std::int64_t>(a->ints.size())}, a->ints);
  }
  throw BackendError("Constant: no supported value attribute");
}

Tensor eval(const Node& node, const std::vector<const Tensor*>& in) {
  auto arg = [&](std::size_t k) -> const Tensor& {
    if (k >= in.size() || in[k] == nullptr) {
      throw BackendError(node.op + ": missing input " + std::to_string(k));
    }
    return *in[k];
  };
  auto opt = [&](std::size_t k) -> const Tensor* { return k < in.size() ? in[k] : nullptr; };
  const std::string& op = node.op;

  if (op == "Add") return ops::binary(ops::Binary::add, arg(0), arg(1));
  if (op == "Sub") return ops::binary(ops::Binary::sub, arg(0), arg(1));
  if (op == "Mul") return ops::binary(ops::Binary::mul, arg(0), arg(1));
  if (op == "Div") return ops::binary(ops::Binary::div, arg(0), arg(1));
  if (op == "Relu") return ops::unary(ops::Unary::relu, arg(0));
  if (op == "Sigmoid") return ops::unary(ops::Unary::sigmoid, arg(0));
  if (op == "Tanh") return ops::unary(ops::Unary::tanh, arg(0));
  if (op == "Sqrt") return ops::unary(ops::Unary::sqrt, arg(0));
  if (op == "Exp") return ops::unary(ops::Unary::exp, arg(0));
  if (op == "Neg") return ops::unary(ops::Unary::neg, arg(0));
  if (op == "Identity" || op == "Dropout") return arg(0);
  if (op == "Erf") {
    Tensor r = arg(0);
    if (r.type != Tensor::Type::f32) throw BackendError("Erf: expected a float tensor");
    for (float& v : r.f) v = std::erf(v);
    return r;
  }
  if (op == "Gelu") {
    Tensor r = arg(0);
    if (r.type != Tensor::Type::f32) throw BackendError("Gelu: expected a float tensor");
    if (node.attr_string("approximate", "none") != "none") {
      throw BackendError("Gelu: only the exact form is supported");
    }
    for (float& v : r.f) v = 0.5f * v * (1.0f + std::erf(v / std::sqrt(2.0f)));
    return r;
  }
  if (op == "Pow") {
    const Tensor& x = arg(0);
    const Tensor& e = arg(1);
    if (e.numel() != 1 || e.type != Tensor::Type::f32 || x.type != Tensor::Type::f32) {
      throw BackendError("Pow: only a scalar float exponent is supported");
    }
    Tensor r = x;
    for (float& v : r.f) v = std::pow(v, e.f[0]);
    return r;
  }
  if (op == "Clip") {
    Tensor r = arg(0);
    if (r.type != Tensor::Type::f32) throw BackendError("Clip: expected a float tensor");
    float lo = node.attr_float("min", -INFINITY), hi = node.attr_float("max", INFINITY);
    if (const Tensor* t = opt(1); t && t->numel() == 1) lo = t->f.at(0);
    if (const Tensor* t = opt(2); t && t->numel() == 1) hi = t->f.at(0);
    for (float& v : r.f) v = std::clamp(v, lo, hi);
    return r;
  }
  if (op == "Gemm") {
    return ops::gemm(arg(0), arg(1), opt(2), node.attr_float("alpha", 1.0f),
                     node.attr_float("beta", 1.0f), node.attr_int("transA", 0) != 0,
                     node.attr_int("transB", 0) != 0);
  }
  if (op == "MatMul") return ops::matmul(arg(0), arg(1));
  if (op == "Conv") {
    const Tensor& x = arg(0);
    const Tensor& w = arg(1);
    ops::ConvParams p;
    p.strides = node.attr_ints("strides");
    p.dilations = node.attr_ints("dilations");
    p.group = node.attr_int("group", 1);
    std::vector<std::int64_t> kernel = node.attr_ints("kernel_shape");
    if (kernel.empty() && w.rank() == 4) kernel = {w.shape[2], w.shape[3]};
    p.pads = resolve_pads(node, x, kernel, p.strides, p.dilations);
    return ops::conv2d(x, w, opt(2), p);
  }
  if (op == "MaxPool" || op == "AveragePool") {
    if (node.attr_int("ceil_mode", 0) != 0) throw BackendError(op + ": ceil_mode is not supported");
    if (!node.attr_ints("dilations").empty()) {
      for (auto d : node.attr_ints("dilations")) {
        if (d != 1) throw BackendError(op + ": dilations are not supported");
      }
    }
    if (node.outputs.size() > 1) throw BackendError("MaxPool: indices output is not supported");
    ops::PoolParams p;
    p.kernel = node.attr_ints("kernel_shape");
    p.strides = node.attr_ints("strides");
    p.pads = resolve_pads(node, arg(0), p.kernel, p.strides, {});
    p.count_include_pad = node.attr_int("count_include_pad", 0) != 0;
    return op == "MaxPool" ? ops::max_pool(arg(0), p) : ops::average_pool(arg(0), p);
  }
  if (op == "GlobalAveragePool") return ops::global_average_pool(arg(0));
  if (op == "GlobalMaxPool") return ops::global_max_pool(arg(0));
  if (op == "Flatten") return ops::flatten(arg(0), node.attr_int("axis", 1));
  if (op == "Reshape") {
    return ops::reshape(arg(0), as_ints(&arg(1), "Reshape shape"), node.attr_int("allowzero", 0) != 0);
  }
  if (op == "Transpose") return ops::transpose(arg(0), node.attr_ints("perm"));
  if (op == "Squeeze" || op == "Unsqueeze") {
    std::vector<std::int64_t> axes = node.attr_ints("axes");
    if (const Tensor* t = opt(1)) axes = as_ints(t, "axes");
    return op == "Squeeze" ? ops::squeeze(arg(0), axes) : ops::unsqueeze(arg(0), axes);
  }
  if (op == "Concat") return ops::concat(in, node.attr_int("axis", 0));
  if (op == "ReduceMean") {
    std::vector<std::int64_t> axes = node.attr_ints("axes");
    if (const Tensor* t = opt(1)) axes = as_ints(t, "axes");
    if (axes.empty() && node.attr_int("noop_with_empty_axes", 0) != 0) return arg(0);
    return ops::reduce_mean(arg(0), axes, node.attr_int("keepdims", 1) != 0);
  }
  if (op == "BatchNormalization") {
    if (node.attr_int("training_mode", 0) != 0 || node.outputs.size() > 1) {
      throw BackendError("BatchNormalization: training mode is not supported");
    }
    return ops::batch_norm(arg(0), arg(1), arg(2), arg(3), arg(4), node.attr_float("epsilon", 1e-5f));
  }
  if (op == "Softmax") return ops::softmax(arg(0), node.attr_int("axis", -1));
  if (op == "LpNormalization") {
    return ops::lp_normalize(arg(0), node.attr_int("axis", -1), node.attr_int("p", 2));
  }
  if (op == "Constant") return eval_constant(node);
  throw BackendError("unsupported operator " + op);
}

}  // namespace

struct OnnxGraph::Impl {
  ValueInfo input;
  ValueInfo output;
  std::unordered_map<std::string, Tensor> initializers;
  std::vector<Node> nodes;  // topologically ordered
};

OnnxGraph::OnnxGraph(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
OnnxGraph::OnnxGraph(OnnxGraph&&) noexcept = default;
OnnxGraph& OnnxGraph::operator=(OnnxGraph&&) noexcept = default;
OnnxGraph::~OnnxGraph() = default;

const ValueInfo& OnnxGraph::input() const noexcept { return impl_->input; }
const ValueInfo& OnnxGraph::output() const noexcept { return impl_->output; }
std::size_t OnnxGraph::node_count() const noexcept { return impl_->nodes.size(); }

std::span<const std::string_view> OnnxGraph::supported_ops() noexcept { return kOps; }

OnnxGraph OnnxGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelLoadError("cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse(bytes);
  } catch (const ModelLoadError& e) {
    throw ModelLoadError(path.string() + ": " + e.what());
  }
}

OnnxGraph OnnxGraph::parse(std::span<const std::uint8_t> bytes) {
  pb::ModelProto model;
  if (bytes.empty() || !model.ParseFromArray(bytes.data(), static_cast<int>(bytes.size()))) {
    throw ModelLoadError("not a valid ONNX model");
  }
  if (!model.has_graph()) throw ModelLoadError("model has no graph");
  for (const auto& opset : model.opset_import()) {
    if (!opset.domain().empty() && opset.domain() != "ai.onnx") {
      throw ModelLoadError("unsupported operator domain '" + opset.domain() + "'");
    }
  }
  const pb::GraphProto& g = model.graph();
  auto impl = std::make_unique<Impl>();

  try {
    for (const auto& tp : g.initializer()) impl->initializers.emplace(tp.name(), convert_tensor(tp));

    std::vector<const pb::ValueInfoProto*> real_inputs;
    for (const auto& vi : g.input()) {
      if (!impl->initializers.count(vi.name())) real_inputs.push_back(&vi);
    }
    if (real_inputs.size() != 1) {
      throw ModelLoadError("graph must have exactly one non-initializer input, found " +
                           std::to_string(real_inputs.size()));
    }
    if (g.output_size() != 1) {
      throw ModelLoadError("graph must have exactly one output, found " + std::to_string(g.output_size()));
    }
    impl->input = convert_value_info(*real_inputs.front());
    impl->output = convert_value_info(g.output(0));

    std::vector<Node> pending;
    for (const auto& np : g.node()) {
      if (!np.domain().empty() && np.domain() != "ai.onnx") {
        throw ModelLoadError("node '" + np.name() + "' uses unsupported domain '" + np.domain() + "'");
      }
      if (std::find(kOps.begin(), kOps.end(), np.op_type()) == kOps.end()) {
        throw ModelLoadError("unsupported operator " + np.op_type());
      }
      Node node;
      node.name = np.name();
      node.op = np.op_type();
      node.inputs.assign(np.input().begin(), np.input().end());
      node.outputs.assign(np.output().begin(), np.output().end());
      for (const auto& ap : np.attribute()) node.attrs.emplace(ap.name(), convert_attribute(ap));
      pending.push_back(std::move(node));
    }

    // Kahn-style ordering; keeps file order among ready nodes.
    std::unordered_set<std::string> known;
    known.insert(impl->input.name);
    for (const auto& [name, _] : impl->initializers) known.insert(name);
    std::vector<bool> placed(pending.size(), false);
    for (std::size_t done = 0; done < pending.size();) {
      bool progressed = false;
      for (std::size_t k = 0; k < pending.size(); ++k) {
        if (placed[k]) continue;
        const Node& n = pending[k];
        const bool ready = std::all_of(n.inputs.begin(), n.inputs.end(), [&](const std::string& s) {
          return s.empty() || known.count(s) > 0;
        });
        if (!ready) continue;
        for (const auto& o : n.outputs) known.insert(o);
        impl->nodes.push_back(n);
        placed[k] = true;
        ++done;
        progressed = true;
      }
      if (!progressed) throw ModelLoadError("graph has a cycle or references an undefined value");
    }
    if (!known.count(impl->output.name)) {
      throw ModelLoadError("graph output '" + impl->output.name + "' is never produced");
    }
  } catch (const BackendError& e) {
    throw ModelLoadError(e.what());
  }
  return OnnxGraph(std::move(impl));
}

Tensor OnnxGraph::run(const Tensor& input) const {
  const ValueInfo& decl = impl_->input;
  if (input.type != Tensor::Type::f32) throw BackendError("graph input must be float32");
  if (!decl.dims.empty()) {
    if (decl.dims.size() != input.rank()) {
      throw BackendError("input rank " + std::to_string(input.rank()) + " does not match declared rank " +
                         std::to_string(decl.dims.size()));
    }
    for (std::size_t k = 0; k < decl.dims.size(); ++k) {
      if (decl.dims[k] && *decl.dims[k] != input.shape[k]) {
        throw BackendError("input " + shape_string(input.shape) + " does not match the declared shape");
      }
    }
  }

  std::unordered_map<std::string, Tensor> values;
  auto lookup = [&](const std::string& name) -> const Tensor* {
    if (name.empty()) return nullptr;
    if (auto it = values.find(name); it != values.end()) return &it->second;
    if (auto it = impl_->initializers.find(name); it != impl_->initializers.end()) return &it->second;
    if (name == decl.name) return &input;
    throw BackendError("value '" + name + "' is undefined");
  };

  for (const Node& node : impl_->nodes) {
    try {
      std::vector<const Tensor*> args;
      args.reserve(node.inputs.size());
      for (const auto& name : node.inputs) args.push_back(lookup(name));
      Tensor out = eval(node, args);
      if (node.outputs.empty()) continue;
      values.insert_or_assign(node.outputs.front(), std::move(out));
    } catch (const BackendError& e) {
      throw BackendError(node.op + (node.name.empty() ? "" : " '" + node.name + "'") + ": " + e.what());
    } catch (const std::exception& e) {
      throw BackendError(node.op + ": " + e.what());
    }
  }
  const Tensor* out = lookup(impl_->output.name);
  if (out == nullptr || out->type != Tensor::Type::f32) throw BackendError("graph output is not float32");
  return *out;
}

}  // namespace srfid::hlf
