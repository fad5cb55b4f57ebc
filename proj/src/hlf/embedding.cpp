#include "srfid/hlf/embedding.hpp"

#include <algorithm>
#include <cmath>

#include "srfid/common/error.hpp"
#include "srfid/hlf/onnx_graph.hpp"
#include "srfid/imgcore/resize.hpp"

namespace srfid::hlf {

EmbeddingBackend::EmbeddingBackend(EmbeddingModelSpec spec, std::unique_ptr<OnnxGraph> graph)
    : spec_(std::move(spec)), name_(model_name(spec_)), graph_(std::move(graph)) {}
EmbeddingBackend::EmbeddingBackend(EmbeddingBackend&&) noexcept = default;
EmbeddingBackend& EmbeddingBackend::operator=(EmbeddingBackend&&) noexcept = default;
EmbeddingBackend::~EmbeddingBackend() = default;

Tensor EmbeddingBackend::forward(const Tensor& input) const { return graph_->run(input); }

namespace {

std::string dims_string(const ValueInfo& v) {
  std::string s = "[";
  for (std::size_t k = 0; k < v.dims.size(); ++k) {
    if (k) s += ",";
    s += v.dims[k] ? std::to_string(*v.dims[k]) : "?";
  }
  return s + "]";
}

void check_boundary(const EmbeddingModelSpec& spec, const OnnxGraph& graph) {
  const ValueInfo& in = graph.input();
  const ValueInfo& out = graph.output();
  if (in.name != "image") throw ModelSpecError("graph input is named '" + in.name + "', expected 'image'");
  if (out.name != "embedding") {
    throw ModelSpecError("graph output is named '" + out.name + "', expected 'embedding'");
  }
  if (!in.dims.empty()) {
    if (in.dims.size() != 4) throw ModelSpecError("graph input must be N x 3 x H x W, got " + dims_string(in));
    if (in.dims[1] && *in.dims[1] != 3) throw ModelSpecError("graph input has " + dims_string(in) + ", expected 3 channels");
    if ((in.dims[2] && *in.dims[2] != spec.input_height) || (in.dims[3] && *in.dims[3] != spec.input_width)) {
      throw ModelSpecError("graph input " + dims_string(in) + " disagrees with input_size " +
                           std::to_string(spec.input_height) + "x" + std::to_string(spec.input_width));
    }
  }
  if (!out.dims.empty() && out.dims.size() != 2) {
    throw ModelSpecError("graph output must be N x D, got " + dims_string(out));
  }
}

img::LumaPlane crop_plane(const img::LumaPlane& p, int x0, int y0, int w, int h) {
  std::vector<double> data(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) data[static_cast<std::size_t>(y) * w + x] = p.at(x0 + x, y0 + y);
  }
  return img::LumaPlane(w, h, std::move(data));
}

img::LumaPlane fit_plane(const EmbeddingModelSpec& spec, const img::LumaPlane& p) {
  const int tw = spec.input_width, th = spec.input_height;
  if (p.width() == tw && p.height() == th) return p;
  if (spec.resize_policy == ResizePolicy::stretch) {
    return img::resize(p, tw, th, img::ResizeKernel::bicubic);
  }
  const double scale = std::max(static_cast<double>(tw) / p.width(), static_cast<double>(th) / p.height());
  const int rw = std::max(tw, static_cast<int>(std::lround(p.width() * scale)));
  const int rh = std::max(th, static_cast<int>(std::lround(p.height() * scale)));
  const img::LumaPlane resized =
      (rw == p.width() && rh == p.height()) ? p : img::resize(p, rw, rh, img::ResizeKernel::bicubic);
  return crop_plane(resized, (rw - tw) / 2, (rh - th) / 2, tw, th);
}

double raw_cosine(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw ArgumentError("embedding dimensions differ: " + std::to_string(a.values.size()) + " vs " +
                        std::to_string(b.values.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) {
    dot += a.values[k] * b.values[k];
    na += a.values[k] * a.values[k];
    nb += b.values[k] * b.values[k];
  }
  if (na == 0.0 || nb == 0.0) throw DegenerateEmbeddingError("cosine of a zero embedding");
  return dot / std::sqrt(na * nb);
}

}  // namespace

EmbeddingBackend load_backend(const EmbeddingModelSpec& spec) {
  spec.validate();
  std::error_code ec;
  if (!std::filesystem::is_regular_file(spec.model_path, ec)) {
    throw ModelLoadError("model file not found: " + spec.model_path.string());
  }
  auto graph = std::make_unique<OnnxGraph>(OnnxGraph::load(spec.model_path));
  check_boundary(spec, *graph);

  const auto& out_dims = graph->output().dims;
  const bool static_dim = out_dims.size() == 2 && out_dims[1].has_value();
  if (static_dim && *out_dims[1] != spec.embedding_dim) {
    throw ModelSpecError("graph embedding has " + std::to_string(*out_dims[1]) +
                         " entries, spec declares " + std::to_string(spec.embedding_dim));
  }
  EmbeddingBackend backend(spec, std::move(graph));
  if (!static_dim) {
    const Tensor probe = preprocess(spec, img::ImageBuffer::filled(spec.input_width, spec.input_height, 3, 128));
    const Tensor out = backend.forward(probe);
    if (out.numel() != static_cast<std::size_t>(spec.embedding_dim)) {
      throw ModelSpecError("probe embedding has " + std::to_string(out.numel()) +
                           " entries, spec declares " + std::to_string(spec.embedding_dim));
    }
  }
  return backend;
}

Tensor preprocess(const EmbeddingModelSpec& spec, const img::ImageBuffer& image) {
  const auto planes = img::split_channels(img::to_rgb(image));
  const std::size_t area = static_cast<std::size_t>(spec.input_width) * spec.input_height;
  std::vector<float> data(3 * area);
  for (int c = 0; c < 3; ++c) {
    const img::LumaPlane fitted = fit_plane(spec, planes[c]);
    const auto src = fitted.data();
    for (std::size_t k = 0; k < area; ++k) {
      data[c * area + k] = static_cast<float>((src[k] / 255.0 - spec.mean[c]) / spec.std[c]);
    }
  }
  return Tensor::floats({1, 3, spec.input_height, spec.input_width}, std::move(data));
}

Embedding embed(const EmbeddingBackend& backend, const img::ImageBuffer& image) {
  const EmbeddingModelSpec& spec = backend.spec();
  const Tensor out = backend.forward(preprocess(spec, image));
  if (out.numel() != static_cast<std::size_t>(spec.embedding_dim)) {
    throw BackendError("model produced " + shape_string(out.shape) + ", expected [1," +
                       std::to_string(spec.embedding_dim) + "]");
  }
  Embedding e;
  e.values.assign(out.f.begin(), out.f.end());
  bool any_nonzero = false;
  for (double v : e.values) {
    if (!std::isfinite(v)) throw BackendError("model produced a non-finite embedding");
    any_nonzero = any_nonzero || v != 0.0;
  }
  if (!any_nonzero) throw DegenerateEmbeddingError("model produced an all-zero embedding");
  return e;
}

double cosine_similarity(const Embedding& a, const Embedding& b) {
  return std::clamp(raw_cosine(a, b), -1.0, 1.0);
}

double derive_change_score(double raw, bool fine_tuned) noexcept {
  if (fine_tuned) return std::clamp(raw, 0.0, 1.0);
  return std::clamp((1.0 - std::clamp(raw, -1.0, 1.0)) / 2.0, 0.0, 1.0);
}

double regressed_change_score(double raw_cosine) noexcept { return (1.0 - raw_cosine) / 2.0; }

HlfScore hlf_score(const EmbeddingBackend& backend, const img::ImageBuffer& gt,
                   const img::ImageBuffer& sr, const std::string& pair_id) {
  try {
    const Embedding eg = embed(backend, gt);
    const Embedding es = embed(backend, sr);
    const double raw = raw_cosine(eg, es);
    HlfScore s;
    s.pair_id = pair_id;
    s.cosine = std::clamp(raw, -1.0, 1.0);
    s.change_score = backend.spec().fine_tuned ? derive_change_score(regressed_change_score(raw), true)
                                               : derive_change_score(s.cosine, false);
    return s;
  } catch (const Error& e) {
    rethrow_with_context(e, "pair " + pair_id);
  }
}

Json to_json(const HlfScore& score, const std::string& model_name) {
  return Json{{"pair_id", score.pair_id},
              {"cosine", score.cosine},
              {"change_score", score.change_score},
              {"model_name", model_name}};
}

}  // namespace srfid::hlf
