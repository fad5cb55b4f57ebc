#include <doctest.h>

#include <cmath>
#include <fstream>

#include "srfid/common/error.hpp"
#include "srfid/common/jsonl.hpp"
#include "srfid/common/rng.hpp"
#include "srfid/hlf/embedding.hpp"
#include "srfid/hlf/onnx_graph.hpp"
#include "synthetic.hpp"
#include "tempdir.hpp"
#include "tensor_ops.hpp"

using namespace srfid;
using namespace srfid::hlf;
using srfid::img::ImageBuffer;

namespace {

const std::filesystem::path kDir = std::filesystem::path(SRFID_FIXTURE_DIR) / "hlf";

EmbeddingBackend backend_for(const std::string& sidecar) {
  return load_backend(load_model_spec(kDir / sidecar));
}

ImageBuffer solid_rgb(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  std::vector<std::uint8_t> data;
  for (int k = 0; k < w * h; ++k) data.insert(data.end(), {r, g, b});
  return ImageBuffer(w, h, 3, std::move(data));
}

}  // namespace

TEST_CASE("gap3: uniform gray 128 gives (128/255 - 0.5) / 0.5 per channel") {
  const auto backend = backend_for("gap3.spec.json");
  const Embedding e = embed(backend, ImageBuffer::filled(40, 24, 1, 128));
  REQUIRE(e.values.size() == 3);
  for (double v : e.values) CHECK(std::abs(v - 0.00392157) <= 1e-5);
  CHECK(backend.name() == "gap3");
}

TEST_CASE("gap3: two-colour pair cosine matches the hand-computed 3-vectors") {
  const auto backend = backend_for("gap3.spec.json");
  const auto gt = solid_rgb(32, 32, 128, 64, 200);
  const auto sr = solid_rgb(32, 32, 64, 128, 32);
  const HlfScore s = hlf_score(backend, gt, sr, "p1");
  CHECK(s.pair_id == "p1");
  CHECK(std::abs(s.cosine - -0.6321488649931554) <= 1e-5);
  CHECK(std::abs(s.change_score - 0.8160744324965776) <= 1e-5);
}

TEST_CASE("hlf_score: identical images give cosine 1 and change score 0") {
  const auto backend = backend_for("gap3.spec.json");
  const auto img = testing::natural_rgb(48, 40, 11);
  const HlfScore s = hlf_score(backend, img, img, "same");
  CHECK(s.cosine == 1.0);
  CHECK(s.change_score == 0.0);
  const auto e1 = embed(backend, img);
  const auto e2 = embed(backend, img);
  CHECK(e1.values == e2.values);
}

TEST_CASE("small_cnn: interpreter matches the independent numpy forward pass") {
  const auto backend = backend_for("small_cnn.spec.json");
  const Json expected = Json::parse(read_file(kDir / "small_cnn_expected.json"));
  std::vector<std::int64_t> shape = expected["input_shape"].get<std::vector<std::int64_t>>();
  std::vector<float> input = expected["input"].get<std::vector<float>>();
  const auto want = expected["output"].get<std::vector<double>>();
  const Tensor out = backend.forward(Tensor::floats(shape, input));
  CHECK(out.shape == std::vector<std::int64_t>{1, 5});
  REQUIRE(out.f.size() == want.size());
  for (std::size_t k = 0; k < want.size(); ++k) CHECK(std::abs(out.f[k] - want[k]) <= 1e-5);

  const auto e = embed(backend, testing::natural_rgb(20, 20, 4));
  CHECK(e.values.size() == 5);
}

TEST_CASE("cosine_similarity: closed forms, symmetry and scale invariance") {
  CHECK(cosine_similarity({{1, 2, 3}}, {{1, 2, 3}}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity({{1, 2, 3}}, {{-1, -2, -3}}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity({{1, 0}}, {{0, 1}}) == 0.0);
  CHECK_THROWS_AS(cosine_similarity({{0, 0}}, {{0, 1}}), DegenerateEmbeddingError);
  CHECK_THROWS_AS(cosine_similarity({{1, 0}}, {{0, 1, 2}}), ArgumentError);

  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Embedding a, b;
    for (int k = 0; k < 16; ++k) {
      a.values.push_back(rng.normal());
      b.values.push_back(rng.normal());
    }
    const double c = cosine_similarity(a, b);
    CHECK(c >= -1.0);
    CHECK(c <= 1.0);
    CHECK(c == cosine_similarity(b, a));
    const double alpha = rng.uniform(0.01, 100.0), beta = rng.uniform(0.01, 100.0);
    Embedding sa = a, sb = b;
    for (auto& v : sa.values) v *= alpha;
    for (auto& v : sb.values) v *= beta;
    CHECK(std::abs(cosine_similarity(sa, sb) - c) <= 1e-9);
  }
}

TEST_CASE("change score conventions") {
  CHECK(derive_change_score(1.0, false) == 0.0);
  CHECK(derive_change_score(-1.0, false) == 1.0);
  CHECK(derive_change_score(0.0, false) == 0.5);
  CHECK(derive_change_score(1.3, true) == 1.0);
  CHECK(derive_change_score(-0.2, true) == 0.0);
  CHECK(derive_change_score(0.37, true) == 0.37);

  const auto tuned = backend_for("gap3_finetuned.spec.json");
  CHECK(tuned.spec().fine_tuned);
  const auto img = testing::natural_rgb(32, 32, 5);
  CHECK(hlf_score(tuned, img, img, "x").change_score == 0.0);
  const auto s = hlf_score(tuned, solid_rgb(8, 8, 128, 64, 200), solid_rgb(8, 8, 64, 128, 32), "y");
  CHECK(std::abs(s.change_score - 0.8160744324965776) <= 1e-5);
}

TEST_CASE("load_backend: error paths") {
  auto spec = load_model_spec(kDir / "gap3.spec.json");
  spec.model_path = kDir / "does_not_exist.onnx";
  CHECK_THROWS_AS(load_backend(spec), ModelLoadError);

  testing::TempDir tmp;
  {
    std::ofstream f(tmp / "corrupt.onnx", std::ios::binary);
    f << "this is not a protobuf model \x01\x02\x03\xff\xff\xff";
  }
  spec.model_path = tmp / "corrupt.onnx";
  CHECK_THROWS_AS(load_backend(spec), ModelLoadError);

  CHECK_THROWS_AS(backend_for("gap3_wrong_dim.spec.json"), ModelSpecError);
  CHECK_THROWS_AS(backend_for("one_channel.spec.json"), ModelSpecError);
  CHECK_THROWS_AS(OnnxGraph::load(kDir / "unsupported_op.onnx"), ModelLoadError);
  CHECK_THROWS_AS(load_model_spec(tmp / "missing.spec.json"), ModelLoadError);

  auto dynamic = load_model_spec(kDir / "gap3_dynamic.spec.json");
  CHECK_NOTHROW(load_backend(dynamic));
  dynamic.embedding_dim = 4;
  CHECK_THROWS_AS(load_backend(dynamic), ModelSpecError);

  auto sized = load_model_spec(kDir / "small_cnn.spec.json");
  sized.input_width = 17;
  CHECK_THROWS_AS(load_backend(sized), ModelSpecError);
}

TEST_CASE("embed: inference failure, degenerate output, pair-tagged errors") {
  const auto bad = backend_for("bad_input.spec.json");
  const auto img = testing::natural_rgb(16, 16, 1);
  CHECK_THROWS_AS(embed(bad, img), BackendError);
  try {
    hlf_score(bad, img, img, "pair-42");
    FAIL("expected BackendError");
  } catch (const BackendError& e) {
    CHECK(std::string(e.what()).find("pair-42") != std::string::npos);
  }
  const auto zeros = backend_for("zeros.spec.json");
  CHECK_THROWS_AS(embed(zeros, img), DegenerateEmbeddingError);
  CHECK_THROWS_AS(hlf_score(zeros, img, img, "z"), DegenerateEmbeddingError);
}

TEST_CASE("preprocess: center crop keeps the middle, gray expands to three channels") {
  auto spec = load_model_spec(kDir / "gap3_crop.spec.json");
  CHECK(spec.resize_policy == ResizePolicy::center_crop_after_resize);
  std::vector<std::uint8_t> data(32 * 16);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) data[y * 32 + x] = x < 8 || x >= 24 ? 255 : 100;
  }
  const ImageBuffer wide(32, 16, 1, std::move(data));
  const Tensor t = preprocess(spec, wide);
  CHECK(t.shape == std::vector<std::int64_t>{1, 3, 16, 16});
  for (float v : t.f) CHECK(std::abs(v - 100.0 / 255.0) <= 1e-6);

  spec.resize_policy = ResizePolicy::stretch;
  const Tensor s = preprocess(spec, wide);
  double mean = 0.0;
  for (float v : s.f) mean += v;
  mean /= static_cast<double>(s.f.size());
  CHECK(mean > 100.0 / 255.0 + 0.05);
}

TEST_CASE("spec sidecar: round trip and validation") {
  const auto spec = load_model_spec(kDir / "small_cnn.spec.json");
  CHECK(spec.input_height == 16);
  CHECK(spec.embedding_dim == 5);
  CHECK(spec.mean[1] == 0.456);
  CHECK(spec.model_path == kDir / "small_cnn.onnx");
  const Json j = to_json(spec, kDir);
  CHECK(j["model_path"] == "small_cnn.onnx");
  const auto back = spec_from_json(j, kDir);
  CHECK(back.model_path == spec.model_path);
  CHECK(back.std == spec.std);
  CHECK(back.resize_policy == spec.resize_policy);

  Json bad = j;
  bad.erase("embedding_dim");
  CHECK_THROWS_AS(spec_from_json(bad, kDir), ModelSpecError);
  bad = j;
  bad["normalization"]["std"] = {0.2, 0.0, 0.2};
  CHECK_THROWS_AS(spec_from_json(bad, kDir), ModelSpecError);
  bad = j;
  bad["normalization"]["mean"] = {0.2, 0.2};
  CHECK_THROWS_AS(spec_from_json(bad, kDir), ModelSpecError);
  bad = j;
  bad["resize_policy"] = "letterbox";
  CHECK_THROWS_AS(spec_from_json(bad, kDir), ModelSpecError);
  bad = j;
  bad["input_size"] = "16x16";
  CHECK_THROWS_AS(spec_from_json(bad, kDir), ModelSpecError);
}

TEST_CASE("batch record format") {
  const Json j = to_json(HlfScore{"p9", 0.5, 0.25}, "gap3");
  CHECK(j.dump() == R"({"change_score":0.25,"cosine":0.5,"model_name":"gap3","pair_id":"p9"})");
}

TEST_CASE("tensor ops: hand-checked kernels") {
  const Tensor a = Tensor::floats({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor row = Tensor::floats({3}, {10, 20, 30});
  CHECK(ops::binary(ops::Binary::add, a, row).f == std::vector<float>{11, 22, 33, 14, 25, 36});
  const Tensor col = Tensor::floats({2, 1}, {2, 4});
  CHECK(ops::binary(ops::Binary::div, a, col).f == std::vector<float>{0.5f, 1, 1.5f, 1, 1.25f, 1.5f});
  CHECK_THROWS_AS(ops::binary(ops::Binary::add, a, Tensor::floats({2}, {1, 2})), BackendError);

  const Tensor t = ops::transpose(a, {});
  CHECK(t.shape == std::vector<std::int64_t>{3, 2});
  CHECK(t.f == std::vector<float>{1, 4, 2, 5, 3, 6});

  const Tensor g = ops::gemm(a, a, nullptr, 1.0f, 0.0f, true, false);  // a^T a
  CHECK(g.shape == std::vector<std::int64_t>{3, 3});
  CHECK(g.f == std::vector<float>{17, 22, 27, 22, 29, 36, 27, 36, 45});

  CHECK(ops::reshape(a, {-1}, false).shape == std::vector<std::int64_t>{6});
  CHECK(ops::reshape(a, {0, -1}, false).shape == std::vector<std::int64_t>{2, 3});
  CHECK_THROWS_AS(ops::reshape(a, {4, -1}, false), BackendError);

  // Depthwise 2x2 box filter over a 2-channel 3x3 input.
  std::vector<float> x(18);
  for (int k = 0; k < 18; ++k) x[k] = static_cast<float>(k);
  const Tensor w = Tensor::floats({2, 1, 2, 2}, {1, 1, 1, 1, 1, 0, 0, 1});
  ops::ConvParams p;
  p.group = 2;
  const Tensor c = ops::conv2d(Tensor::floats({1, 2, 3, 3}, x), w, nullptr, p);
  CHECK(c.shape == std::vector<std::int64_t>{1, 2, 2, 2});
  CHECK(c.f == std::vector<float>{8, 12, 20, 24, 22, 24, 28, 30});

  const Tensor m = ops::reduce_mean(Tensor::floats({1, 2, 3}, {0, 1, 2, 3, 4, 5}), {2}, false);
  CHECK(m.f == std::vector<float>{1, 4});
  const Tensor sm = ops::softmax(Tensor::floats({2}, {0, 0}), -1);
  CHECK(sm.f == std::vector<float>{0.5f, 0.5f});
  const Tensor n = ops::lp_normalize(Tensor::floats({1, 2}, {3, 4}), -1, 2);
  CHECK(n.f == std::vector<float>{0.6f, 0.8f});
}
