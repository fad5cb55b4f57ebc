#include "tensor_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "srfid/common/error.hpp"

namespace srfid::hlf {

Tensor Tensor::floats(std::vector<std::int64_t> shape, std::vector<float> data) {
  Tensor t;
  t.type = Type::f32;
  t.shape = std::move(shape);
  t.f = std::move(data);
  if (t.f.size() != element_count(t.shape)) {
    throw BackendError("tensor data does not match shape " + shape_string(t.shape));
  }
  return t;
}

Tensor Tensor::ints(std::vector<std::int64_t> shape, std::vector<std::int64_t> data) {
  Tensor t;
  t.type = Type::i64;
  t.shape = std::move(shape);
  t.i = std::move(data);
  if (t.i.size() != element_count(t.shape)) {
    throw BackendError("tensor data does not match shape " + shape_string(t.shape));
  }
  return t;
}

std::size_t Tensor::numel() const noexcept { return element_count(shape); }

std::size_t element_count(std::span<const std::int64_t> shape) noexcept {
  std::size_t n = 1;
  for (auto d : shape) n *= static_cast<std::size_t>(std::max<std::int64_t>(d, 0));
  return n;
}

std::string shape_string(std::span<const std::int64_t> shape) {
  std::string s = "[";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(shape[k]);
  }
  return s + "]";
}

namespace ops {
namespace {

using Shape = std::vector<std::int64_t>;

const Tensor& need_float(const Tensor& t, const char* op) {
  if (t.type != Tensor::Type::f32) throw BackendError(std::string(op) + ": expected a float tensor");
  return t;
}

std::int64_t normalize_axis(std::int64_t axis, std::size_t rank, const char* op, bool inclusive = false) {
  const auto r = static_cast<std::int64_t>(rank) + (inclusive ? 1 : 0);
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) throw BackendError(std::string(op) + ": axis out of range");
  return axis;
}

Shape strides_of(const Shape& shape) {
  Shape s(shape.size(), 1);
  for (std::size_t k = shape.size(); k-- > 1;) s[k - 1] = s[k] * shape[k];
  return s;
}

Shape broadcast_shape(const Shape& a, const Shape& b) {
  const std::size_t r = std::max(a.size(), b.size());
  Shape out(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::int64_t da = k + a.size() >= r ? a[k + a.size() - r] : 1;
    const std::int64_t db = k + b.size() >= r ? b[k + b.size() - r] : 1;
    if (da != db && da != 1 && db != 1) {
      throw BackendError("cannot broadcast " + shape_string(a) + " with " + shape_string(b));
    }
    out[k] = da == 1 ? db : da;
  }
  return out;
}

// Strides of `in` viewed through the broadcast `out` shape (0 on expanded axes).
Shape broadcast_strides(const Shape& in, const Shape& out) {
  const Shape s = strides_of(in);
  Shape bs(out.size(), 0);
  const std::size_t off = out.size() - in.size();
  for (std::size_t k = 0; k < in.size(); ++k) bs[k + off] = in[k] == 1 ? 0 : s[k];
  return bs;
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw BackendError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got " +
                       shape_string(t.shape));
  }
}

std::int64_t param(const std::vector<std::int64_t>& v, std::size_t k, std::int64_t fallback) {
  return k < v.size() ? v[k] : fallback;
}

}  // namespace

Tensor binary(Binary op, const Tensor& a, const Tensor& b) {
  need_float(a, "binary");
  need_float(b, "binary");
  const Shape out = broadcast_shape(a.shape, b.shape);
  const Shape sa = broadcast_strides(a.shape, out);
  const Shape sb = broadcast_strides(b.shape, out);
  const std::size_t n = element_count(out);
  std::vector<float> r(n);
  Shape idx(out.size(), 0);
  std::int64_t ia = 0, ib = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const float x = a.f[ia], y = b.f[ib];
    switch (op) {
      case Binary::add: r[k] = x + y; break;
      case Binary::sub: r[k] = x - y; break;
      case Binary::mul: r[k] = x * y; break;
      case Binary::div: r[k] = x / y; break;
    }
    for (std::size_t d = out.size(); d-- > 0;) {
      ia += sa[d];
      ib += sb[d];
      if (++idx[d] < out[d]) break;
      ia -= sa[d] * out[d];
      ib -= sb[d] * out[d];
      idx[d] = 0;
    }
  }
  return Tensor::floats(out, std::move(r));
}

Tensor unary(Unary op, const Tensor& x) {
  need_float(x, "unary");
  Tensor r = x;
  for (float& v : r.f) {
    switch (op) {
      case Unary::relu: v = v > 0.0f ? v : 0.0f; break;
      case Unary::sigmoid: v = 1.0f / (1.0f + std::exp(-v)); break;
      case Unary::tanh: v = std::tanh(v); break;
      case Unary::sqrt: v = std::sqrt(v); break;
      case Unary::exp: v = std::exp(v); break;
      case Unary::neg: v = -v; break;
    }
  }
  return r;
}

Tensor gemm(const Tensor& a, const Tensor& b, const Tensor* c, float alpha, float beta,
            bool trans_a, bool trans_b) {
  need_float(a, "Gemm");
  need_float(b, "Gemm");
  require_rank(a, 2, "Gemm");
  require_rank(b, 2, "Gemm");
  const std::int64_t m = trans_a ? a.shape[1] : a.shape[0];
  const std::int64_t k = trans_a ? a.shape[0] : a.shape[1];
  const std::int64_t kb = trans_b ? b.shape[1] : b.shape[0];
  const std::int64_t n = trans_b ? b.shape[0] : b.shape[1];
  if (k != kb) {
    throw BackendError("Gemm: inner dimensions differ " + shape_string(a.shape) + " x " +
                       shape_string(b.shape));
  }
  std::vector<float> r(static_cast<std::size_t>(m * n), 0.0f);
  for (std::int64_t i = 0; i < m; ++i) {
    for (std::int64_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (std::int64_t t = 0; t < k; ++t) {
        const float av = trans_a ? a.f[t * m + i] : a.f[i * k + t];
        const float bv = trans_b ? b.f[j * k + t] : b.f[t * n + j];
        acc += av * bv;
      }
      r[i * n + j] = alpha * acc;
    }
  }
  Tensor out = Tensor::floats({m, n}, std::move(r));
  if (c != nullptr && beta != 0.0f) {
    need_float(*c, "Gemm");
    Tensor scaled = *c;
    for (float& v : scaled.f) v *= beta;
    out = binary(Binary::add, out, scaled);
    if (out.shape != Shape{m, n}) throw BackendError("Gemm: bias does not broadcast to output");
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  need_float(a, "MatMul");
  need_float(b, "MatMul");
  if (a.rank() < 2 || b.rank() < 2) throw BackendError("MatMul: operands must have rank >= 2");
  const std::int64_t m = a.shape[a.rank() - 2], k = a.shape[a.rank() - 1];
  const std::int64_t kb = b.shape[b.rank() - 2], n = b.shape[b.rank() - 1];
  if (k != kb) {
    throw BackendError("MatMul: inner dimensions differ " + shape_string(a.shape) + " x " +
                       shape_string(b.shape));
  }
  const Shape batch_a(a.shape.begin(), a.shape.end() - 2);
  const Shape batch_b(b.shape.begin(), b.shape.end() - 2);
  const Shape batch = broadcast_shape(batch_a, batch_b);
  const Shape sa = broadcast_strides(batch_a, batch);
  const Shape sb = broadcast_strides(batch_b, batch);
  const std::size_t nb = element_count(batch);
  Shape out_shape = batch;
  out_shape.push_back(m);
  out_shape.push_back(n);
  std::vector<float> r(nb * static_cast<std::size_t>(m * n));
  Shape idx(batch.size(), 0);
  for (std::size_t bi = 0; bi < nb; ++bi) {
    std::int64_t oa = 0, ob = 0;
    for (std::size_t d = 0; d < batch.size(); ++d) {
      oa += idx[d] * sa[d];
      ob += idx[d] * sb[d];
    }
    const float* pa = a.f.data() + oa * m * k;
    const float* pb = b.f.data() + ob * k * n;
    float* pr = r.data() + bi * static_cast<std::size_t>(m * n);
    for (std::int64_t i = 0; i < m; ++i) {
      for (std::int64_t j = 0; j < n; ++j) {
        float acc = 0.0f;
        for (std::int64_t t = 0; t < k; ++t) acc += pa[i * k + t] * pb[t * n + j];
        pr[i * n + j] = acc;
      }
    }
    for (std::size_t d = batch.size(); d-- > 0;) {
      if (++idx[d] < batch[d]) break;
      idx[d] = 0;
    }
  }
  return Tensor::floats(std::move(out_shape), std::move(r));
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvParams& p) {
  need_float(x, "Conv");
  need_float(w, "Conv");
  require_rank(x, 4, "Conv");
  require_rank(w, 4, "Conv");
  const std::int64_t n = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3];
  const std::int64_t m = w.shape[0], cg = w.shape[1], kh = w.shape[2], kw = w.shape[3];
  const std::int64_t g = p.group;
  if (g < 1 || c % g != 0 || m % g != 0 || c / g != cg) {
    throw BackendError("Conv: input " + shape_string(x.shape) + " incompatible with weight " +
                       shape_string(w.shape) + " and group " + std::to_string(g));
  }
  const std::int64_t sh = param(p.strides, 0, 1), sw = param(p.strides, 1, 1);
  const std::int64_t dh = param(p.dilations, 0, 1), dw = param(p.dilations, 1, 1);
  const std::int64_t pt = param(p.pads, 0, 0), pl = param(p.pads, 1, 0);
  const std::int64_t pb = param(p.pads, 2, 0), pr = param(p.pads, 3, 0);
  if (sh < 1 || sw < 1 || dh < 1 || dw < 1) throw BackendError("Conv: strides and dilations must be positive");
  const std::int64_t oh = (h + pt + pb - dh * (kh - 1) - 1) / sh + 1;
  const std::int64_t ow = (wd + pl + pr - dw * (kw - 1) - 1) / sw + 1;
  if (oh < 1 || ow < 1) throw BackendError("Conv: kernel larger than padded input");
  if (bias != nullptr) {
    need_float(*bias, "Conv");
    if (bias->numel() != static_cast<std::size_t>(m)) throw BackendError("Conv: bias length mismatch");
  }
  std::vector<float> out(static_cast<std::size_t>(n * m * oh * ow));
  const std::int64_t mg = m / g;
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t oc = 0; oc < m; ++oc) {
      const std::int64_t grp = oc / mg;
      const float b0 = bias ? bias->f[oc] : 0.0f;
      for (std::int64_t oy = 0; oy < oh; ++oy) {
        for (std::int64_t ox = 0; ox < ow; ++ox) {
          float acc = b0;
          for (std::int64_t ic = 0; ic < cg; ++ic) {
            const std::int64_t ch = grp * cg + ic;
            const float* px = x.f.data() + ((b * c + ch) * h) * wd;
            const float* pw = w.f.data() + ((oc * cg + ic) * kh) * kw;
            for (std::int64_t ky = 0; ky < kh; ++ky) {
              const std::int64_t iy = oy * sh - pt + ky * dh;
              if (iy < 0 || iy >= h) continue;
              for (std::int64_t kx = 0; kx < kw; ++kx) {
                const std::int64_t ix = ox * sw - pl + kx * dw;
                if (ix < 0 || ix >= wd) continue;
                acc += px[iy * wd + ix] * pw[ky * kw + kx];
              }
            }
          }
          out[((b * m + oc) * oh + oy) * ow + ox] = acc;
        }
      }
    }
  }
  return Tensor::floats({n, m, oh, ow}, std::move(out));
}

namespace {

template <typename Reduce>
Tensor pool(const Tensor& x, const PoolParams& p, const char* op, Reduce reduce) {
  need_float(x, op);
  require_rank(x, 4, op);
  if (p.kernel.size() != 2) throw BackendError(std::string(op) + ": kernel_shape must have 2 entries");
  const std::int64_t n = x.shape[0], c = x.shape[1], h = x.shape[2], w = x.shape[3];
  const std::int64_t kh = p.kernel[0], kw = p.kernel[1];
  const std::int64_t sh = param(p.strides, 0, 1), sw = param(p.strides, 1, 1);
  const std::int64_t pt = param(p.pads, 0, 0), pl = param(p.pads, 1, 0);
  const std::int64_t pb = param(p.pads, 2, 0), pr = param(p.pads, 3, 0);
  if (kh < 1 || kw < 1 || sh < 1 || sw < 1) throw BackendError(std::string(op) + ": bad kernel or stride");
  const std::int64_t oh = (h + pt + pb - kh) / sh + 1;
  const std::int64_t ow = (w + pl + pr - kw) / sw + 1;
  if (oh < 1 || ow < 1) throw BackendError(std::string(op) + ": kernel larger than padded input");
  std::vector<float> out(static_cast<std::size_t>(n * c * oh * ow));
  for (std::int64_t plane = 0; plane < n * c; ++plane) {
    const float* px = x.f.data() + plane * h * w;
    for (std::int64_t oy = 0; oy < oh; ++oy) {
      for (std::int64_t ox = 0; ox < ow; ++ox) {
        const std::int64_t y0 = oy * sh - pt, x0 = ox * sw - pl;
        out[(plane * oh + oy) * ow + ox] = reduce(px, h, w, y0, x0, kh, kw);
      }
    }
  }
  return Tensor::floats({n, c, oh, ow}, std::move(out));
}

}  // namespace

Tensor max_pool(const Tensor& x, const PoolParams& p) {
  return pool(x, p, "MaxPool",
              [](const float* px, std::int64_t h, std::int64_t w, std::int64_t y0, std::int64_t x0,
                 std::int64_t kh, std::int64_t kw) {
                float best = -std::numeric_limits<float>::infinity();
                for (std::int64_t y = std::max<std::int64_t>(y0, 0); y < std::min(y0 + kh, h); ++y) {
                  for (std::int64_t xx = std::max<std::int64_t>(x0, 0); xx < std::min(x0 + kw, w); ++xx) {
                    best = std::max(best, px[y * w + xx]);
                  }
                }
                return best;
              });
}

Tensor average_pool(const Tensor& x, const PoolParams& p) {
  const bool include_pad = p.count_include_pad;
  return pool(x, p, "AveragePool",
              [include_pad](const float* px, std::int64_t h, std::int64_t w, std::int64_t y0,
                            std::int64_t x0, std::int64_t kh, std::int64_t kw) {
                float sum = 0.0f;
                std::int64_t count = 0;
                for (std::int64_t y = std::max<std::int64_t>(y0, 0); y < std::min(y0 + kh, h); ++y) {
                  for (std::int64_t xx = std::max<std::int64_t>(x0, 0); xx < std::min(x0 + kw, w); ++xx) {
                    sum += px[y * w + xx];
                    ++count;
                  }
                }
                const std::int64_t denom = include_pad ? kh * kw : count;
                return denom > 0 ? sum / static_cast<float>(denom) : 0.0f;
              });
}

Tensor global_average_pool(const Tensor& x) {
  need_float(x, "GlobalAveragePool");
  if (x.rank() < 3) throw BackendError("GlobalAveragePool: rank must be >= 3");
  const std::size_t planes = static_cast<std::size_t>(x.shape[0] * x.shape[1]);
  const std::size_t area = x.numel() / std::max<std::size_t>(planes, 1);
  std::vector<float> out(planes);
  for (std::size_t k = 0; k < planes; ++k) {
    double sum = 0.0;
    for (std::size_t t = 0; t < area; ++t) sum += x.f[k * area + t];
    out[k] = static_cast<float>(sum / static_cast<double>(area));
  }
  Shape shape(x.rank(), 1);
  shape[0] = x.shape[0];
  shape[1] = x.shape[1];
  return Tensor::floats(std::move(shape), std::move(out));
}

Tensor global_max_pool(const Tensor& x) {
  need_float(x, "GlobalMaxPool");
  if (x.rank() < 3) throw BackendError("GlobalMaxPool: rank must be >= 3");
  const std::size_t planes = static_cast<std::size_t>(x.shape[0] * x.shape[1]);
  const std::size_t area = x.numel() / std::max<std::size_t>(planes, 1);
  std::vector<float> out(planes, -std::numeric_limits<float>::infinity());
  for (std::size_t k = 0; k < planes; ++k) {
    for (std::size_t t = 0; t < area; ++t) out[k] = std::max(out[k], x.f[k * area + t]);
  }
  Shape shape(x.rank(), 1);
  shape[0] = x.shape[0];
  shape[1] = x.shape[1];
  return Tensor::floats(std::move(shape), std::move(out));
}

Tensor flatten(const Tensor& x, std::int64_t axis) {
  axis = normalize_axis(axis, x.rank(), "Flatten", true);
  std::int64_t outer = 1, inner = 1;
  for (std::int64_t k = 0; k < static_cast<std::int64_t>(x.rank()); ++k) {
    (k < axis ? outer : inner) *= x.shape[k];
  }
  Tensor r = x;
  r.shape = {outer, inner};
  return r;
}

Tensor reshape(const Tensor& x, const std::vector<std::int64_t>& target, bool allow_zero) {
  Shape shape(target.size());
  std::int64_t known = 1;
  int infer = -1;
  for (std::size_t k = 0; k < target.size(); ++k) {
    std::int64_t d = target[k];
    if (d == 0 && !allow_zero) {
      if (k >= x.rank()) throw BackendError("Reshape: 0 refers past the input rank");
      d = x.shape[k];
    }
    if (d == -1) {
      if (infer >= 0) throw BackendError("Reshape: more than one -1");
      infer = static_cast<int>(k);
      shape[k] = 1;
      continue;
    }
    if (d < 0) throw BackendError("Reshape: negative dimension");
    shape[k] = d;
    known *= d;
  }
  const auto total = static_cast<std::int64_t>(x.numel());
  if (infer >= 0) {
    if (known == 0 || total % known != 0) throw BackendError("Reshape: cannot infer dimension");
    shape[infer] = total / known;
  }
  if (static_cast<std::int64_t>(element_count(shape)) != total) {
    throw BackendError("Reshape: " + shape_string(x.shape) + " to " + shape_string(shape));
  }
  Tensor r = x;
  r.shape = std::move(shape);
  return r;
}

Tensor transpose(const Tensor& x, std::vector<std::int64_t> perm) {
  need_float(x, "Transpose");
  const std::size_t r = x.rank();
  if (perm.empty()) {
    perm.resize(r);
    for (std::size_t k = 0; k < r; ++k) perm[k] = static_cast<std::int64_t>(r - 1 - k);
  }
  if (perm.size() != r) throw BackendError("Transpose: perm length mismatch");
  std::vector<bool> seen(r, false);
  Shape out(r);
  for (std::size_t k = 0; k < r; ++k) {
    const std::int64_t p = normalize_axis(perm[k], r, "Transpose");
    if (seen[p]) throw BackendError("Transpose: perm is not a permutation");
    seen[p] = true;
    perm[k] = p;
    out[k] = x.shape[p];
  }
  const Shape in_strides = strides_of(x.shape);
  Shape src_strides(r);
  for (std::size_t k = 0; k < r; ++k) src_strides[k] = in_strides[perm[k]];
  std::vector<float> data(x.numel());
  Shape idx(r, 0);
  std::int64_t src = 0;
  for (std::size_t k = 0; k < data.size(); ++k) {
    data[k] = x.f[src];
    for (std::size_t d = r; d-- > 0;) {
      src += src_strides[d];
      if (++idx[d] < out[d]) break;
      src -= src_strides[d] * out[d];
      idx[d] = 0;
    }
  }
  return Tensor::floats(std::move(out), std::move(data));
}

Tensor squeeze(const Tensor& x, std::vector<std::int64_t> axes) {
  std::vector<bool> drop(x.rank(), false);
  if (axes.empty()) {
    for (std::size_t k = 0; k < x.rank(); ++k) drop[k] = x.shape[k] == 1;
  } else {
    for (auto a : axes) {
      const auto k = normalize_axis(a, x.rank(), "Squeeze");
      if (x.shape[k] != 1) throw BackendError("Squeeze: axis " + std::to_string(a) + " is not 1");
      drop[k] = true;
    }
  }
  Tensor r = x;
  r.shape.clear();
  for (std::size_t k = 0; k < x.rank(); ++k) {
    if (!drop[k]) r.shape.push_back(x.shape[k]);
  }
  return r;
}

Tensor unsqueeze(const Tensor& x, std::vector<std::int64_t> axes) {
  const std::size_t out_rank = x.rank() + axes.size();
  std::vector<bool> inserted(out_rank, false);
  for (auto a : axes) {
    const auto k = normalize_axis(a, out_rank, "Unsqueeze");
    if (inserted[k]) throw BackendError("Unsqueeze: repeated axis");
    inserted[k] = true;
  }
  Tensor r = x;
  r.shape.clear();
  std::size_t src = 0;
  for (std::size_t k = 0; k < out_rank; ++k) r.shape.push_back(inserted[k] ? 1 : x.shape[src++]);
  return r;
}

Tensor concat(const std::vector<const Tensor*>& xs, std::int64_t axis) {
  if (xs.empty()) throw BackendError("Concat: no inputs");
  const Tensor& first = *xs.front();
  axis = normalize_axis(axis, first.rank(), "Concat");
  Shape out = first.shape;
  out[axis] = 0;
  for (const Tensor* t : xs) {
    need_float(*t, "Concat");
    if (t->rank() != first.rank()) throw BackendError("Concat: rank mismatch");
    for (std::size_t k = 0; k < first.rank(); ++k) {
      if (static_cast<std::int64_t>(k) != axis && t->shape[k] != first.shape[k]) {
        throw BackendError("Concat: shape mismatch off the concat axis");
      }
    }
    out[axis] += t->shape[axis];
  }
  std::int64_t outer = 1, inner = 1;
  for (std::int64_t k = 0; k < axis; ++k) outer *= first.shape[k];
  for (std::size_t k = axis + 1; k < first.rank(); ++k) inner *= first.shape[k];
  std::vector<float> data;
  data.reserve(element_count(out));
  for (std::int64_t o = 0; o < outer; ++o) {
    for (const Tensor* t : xs) {
      const std::int64_t chunk = t->shape[axis] * inner;
      data.insert(data.end(), t->f.begin() + o * chunk, t->f.begin() + (o + 1) * chunk);
    }
  }
  return Tensor::floats(std::move(out), std::move(data));
}

Tensor reduce_mean(const Tensor& x, std::vector<std::int64_t> axes, bool keepdims) {
  need_float(x, "ReduceMean");
  const std::size_t r = x.rank();
  std::vector<bool> reduced(r, axes.empty());
  for (auto a : axes) reduced[normalize_axis(a, r, "ReduceMean")] = true;
  Shape kept(r);
  std::int64_t count = 1;
  for (std::size_t k = 0; k < r; ++k) {
    kept[k] = reduced[k] ? 1 : x.shape[k];
    if (reduced[k]) count *= x.shape[k];
  }
  const Shape kept_strides = strides_of(kept);
  std::vector<double> acc(element_count(kept), 0.0);
  Shape idx(r, 0);
  for (std::size_t k = 0; k < x.f.size(); ++k) {
    std::int64_t dst = 0;
    for (std::size_t d = 0; d < r; ++d) {
      if (!reduced[d]) dst += idx[d] * kept_strides[d];
    }
    acc[dst] += x.f[k];
    for (std::size_t d = r; d-- > 0;) {
      if (++idx[d] < x.shape[d]) break;
      idx[d] = 0;
    }
  }
  std::vector<float> data(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) {
    data[k] = static_cast<float>(acc[k] / static_cast<double>(std::max<std::int64_t>(count, 1)));
  }
  Shape out;
  for (std::size_t k = 0; k < r; ++k) {
    if (!reduced[k]) out.push_back(x.shape[k]);
    else if (keepdims) out.push_back(1);
  }
  return Tensor::floats(std::move(out), std::move(data));
}

Tensor batch_norm(const Tensor& x, const Tensor& scale, const Tensor& bias, const Tensor& mean,
                  const Tensor& var, float epsilon) {
  need_float(x, "BatchNormalization");
  if (x.rank() < 2) throw BackendError("BatchNormalization: rank must be >= 2");
  const std::int64_t n = x.shape[0], c = x.shape[1];
  for (const Tensor* t : {&scale, &bias, &mean, &var}) {
    need_float(*t, "BatchNormalization");
    if (t->numel() != static_cast<std::size_t>(c)) {
      throw BackendError("BatchNormalization: parameter length does not match channels");
    }
  }
  const std::size_t area = x.numel() / static_cast<std::size_t>(std::max<std::int64_t>(n * c, 1));
  Tensor r = x;
  for (std::int64_t b = 0; b < n; ++b) {
    for (std::int64_t ch = 0; ch < c; ++ch) {
      const float g = scale.f[ch] / std::sqrt(var.f[ch] + epsilon);
      float* p = r.f.data() + (b * c + ch) * area;
      for (std::size_t t = 0; t < area; ++t) p[t] = (p[t] - mean.f[ch]) * g + bias.f[ch];
    }
  }
  return r;
}

namespace {

// Calls fn(offset, stride, length) for every 1-D lane along `axis`.
template <typename Fn>
void for_each_lane(const Shape& shape, std::int64_t axis, Fn fn) {
  std::int64_t outer = 1, inner = 1;
  for (std::int64_t k = 0; k < axis; ++k) outer *= shape[k];
  for (std::size_t k = axis + 1; k < shape.size(); ++k) inner *= shape[k];
  const std::int64_t len = shape[axis];
  for (std::int64_t o = 0; o < outer; ++o) {
    for (std::int64_t i = 0; i < inner; ++i) fn(o * len * inner + i, inner, len);
  }
}

}  // namespace

Tensor softmax(const Tensor& x, std::int64_t axis) {
  need_float(x, "Softmax");
  axis = normalize_axis(axis, x.rank(), "Softmax");
  Tensor r = x;
  for_each_lane(x.shape, axis, [&](std::int64_t off, std::int64_t stride, std::int64_t len) {
    float mx = -std::numeric_limits<float>::infinity();
    for (std::int64_t k = 0; k < len; ++k) mx = std::max(mx, r.f[off + k * stride]);
    float sum = 0.0f;
    for (std::int64_t k = 0; k < len; ++k) {
      float& v = r.f[off + k * stride];
      v = std::exp(v - mx);
      sum += v;
    }
    for (std::int64_t k = 0; k < len; ++k) r.f[off + k * stride] /= sum;
  });
  return r;
}

Tensor lp_normalize(const Tensor& x, std::int64_t axis, std::int64_t p) {
  need_float(x, "LpNormalization");
  if (p != 1 && p != 2) throw BackendError("LpNormalization: p must be 1 or 2");
  axis = normalize_axis(axis, x.rank(), "LpNormalization");
  Tensor r = x;
  for_each_lane(x.shape, axis, [&](std::int64_t off, std::int64_t stride, std::int64_t len) {
    double norm = 0.0;
    for (std::int64_t k = 0; k < len; ++k) {
      const double v = r.f[off + k * stride];
      norm += p == 1 ? std::abs(v) : v * v;
    }
    if (p == 2) norm = std::sqrt(norm);
    if (norm == 0.0) return;
    for (std::int64_t k = 0; k < len; ++k) {
      r.f[off + k * stride] = static_cast<float>(r.f[off + k * stride] / norm);
    }
  });
  return r;
}

}  // namespace ops
}  // namespace srfid::hlf
