// Batch subcommands over image files: degrade, score, hlf.

#include <algorithm>
#include <fstream>
#include <optional>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "srfid/common/error.hpp"
#include "srfid/common/parallel.hpp"
#include "srfid/common/rng.hpp"
#include "srfid/degrade/pipeline.hpp"
#include "srfid/hlf/embedding.hpp"
#include "srfid/imgcore/codec.hpp"
#include "srfid/metrics/metrics.hpp"
#include "srfid/study/records.hpp"

namespace fs = std::filesystem;

namespace srfid::cli {
namespace {

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

// Manifest image paths are relative to --images-dir, else the manifest's directory.
fs::path image_root(const Globals& g, const std::string& images_dir, const fs::path& manifest) {
  return images_dir.empty() ? manifest.parent_path() : g.resolve(images_dir);
}

fs::path under(const fs::path& root, const std::string& p) {
  const fs::path path = p;
  return path.is_absolute() ? path : root / path;
}

}  // namespace

void register_degrade(CLI::App& app, const Globals& g, int& exit_code) {
  struct Opts {
    std::string gt_dir, out_dir, severity = "medium";
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("degrade", "Synthesize x4 LR images with seeded degradation recipes");
  cmd->add_option("--gt-dir", o->gt_dir, "Directory of GT images")->required();
  cmd->add_option("--out-dir", o->out_dir, "Output directory for LR images and recipes")->required();
  cmd->add_option("--severity", o->severity, "mild, medium or severe")
      ->check(CLI::IsMember({"mild", "medium", "severe"}));
  cmd->callback([o, &g, &exit_code] {
    const fs::path gt_dir = g.resolve(o->gt_dir);
    const fs::path out_dir = g.resolve(o->out_dir);
    const auto severity = degrade::parse_severity(o->severity);
    std::vector<fs::path> inputs;
    std::error_code ec;
    for (fs::directory_iterator it(gt_dir, ec), end; !ec && it != end; it.increment(ec))
      if (it->is_regular_file() && is_image_file(it->path())) inputs.push_back(it->path());
    if (ec) throw IoError("cannot read GT directory " + gt_dir.string() + ": " + ec.message());
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
      spdlog::warn("no PNG/JPEG images in {}", gt_dir.string());
      return;
    }
    fs::create_directories(out_dir);

    // Per-image seed depends on the file name only, so reruns and any
    // thread count produce identical files.
    std::vector<std::string> errors(inputs.size());
    parallel_for(inputs.size(), g.threads, [&](std::size_t i, unsigned) {
      const fs::path& in = inputs[i];
      try {
        const auto recipe = degrade::sample_recipe(mix_seed(g.seed, in.filename().string()), severity);
        const auto gt = degrade::prepare_gt(img::load_image(in));
        const auto lr = degrade::apply_degradation(gt, recipe);
        const std::string stem = in.stem().string();
        img::save_image(lr, out_dir / (stem + ".png"), img::ImageFormat::png());
        Json sidecar = degrade::to_json(recipe);
        sidecar["gt_file"] = in.filename().string();
        sidecar["severity"] = o->severity;
        write_file_atomic(out_dir / (stem + ".recipe.json"), sidecar.dump(2) + "\n");
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
    std::size_t failed = 0;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (errors[i].empty()) continue;
      ++failed;
      spdlog::error("{}: {}", inputs[i].filename().string(), errors[i]);
    }
    spdlog::info("degraded {} of {} images into {}", inputs.size() - failed, inputs.size(), out_dir.string());
    if (failed) exit_code = kExitPartial;
  });
}

void register_score(CLI::App& app, const Globals& g, int& exit_code) {
  struct Opts {
    std::string manifest, metrics = "psnr,ssim,vif", out, images_dir;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("score", "Full-reference metrics for every manifest pair");
  cmd->add_option("--manifest", o->manifest, "Pair manifest (JSON-lines)")->required();
  cmd->add_option("--metrics", o->metrics, "Comma separated: psnr,ssim,vif");
  cmd->add_option("--out", o->out, "Output metric records (JSON-lines)")->required();
  cmd->add_option("--images-dir", o->images_dir, "Root for relative image paths");
  cmd->callback([o, &g, &exit_code] {
    const auto kinds = metrics::parse_metric_list(o->metrics);
    const fs::path manifest = g.resolve(o->manifest);
    const auto pairs = study::load_manifest(manifest);
    const fs::path root = image_root(g, o->images_dir, manifest);

    std::vector<std::vector<Json>> slots(pairs.size());
    parallel_for(pairs.size(), g.threads, [&](std::size_t i, unsigned) {
      const auto& p = pairs[i];
      auto fail = [&](const std::string& metric, const std::string& msg) {
        slots[i].push_back(Json{{"pair_id", p.pair_id}, {"metric", metric}, {"error", msg}});
      };
      std::optional<img::LumaPlane> gt, sr;
      std::string load_error;
      try {
        gt = img::to_luma(img::load_image(under(root, p.gt_path)));
        sr = img::to_luma(img::load_image(under(root, p.sr_path)));
      } catch (const Error& e) {
        load_error = e.what();
      }
      for (auto kind : kinds) {
        const std::string name(metrics::to_string(kind));
        if (!load_error.empty()) {
          fail(name, load_error);
          continue;
        }
        try {
          const auto v = metrics::compute(kind, *gt, *sr);
          Json rec{{"pair_id", p.pair_id}, {"metric", name}, {"orientation", to_string(v.orientation)}};
          rec["value"] = v.infinite ? Json(nullptr) : Json(v.value);
          rec["infinite"] = v.infinite;
          slots[i].push_back(std::move(rec));
        } catch (const Error& e) {
          fail(name, e.what());
        }
      }
    });
    std::vector<Json> records;
    std::size_t failed = 0;
    for (auto& s : slots)
      for (auto& r : s) {
        if (r.contains("error")) {
          ++failed;
          spdlog::error("pair {} {}: {}", r["pair_id"].get<std::string>(), r["metric"].get<std::string>(),
                        r["error"].get<std::string>());
        }
        records.push_back(std::move(r));
      }
    write_jsonl(g.resolve(o->out), records);
    spdlog::info("wrote {} metric records ({} errors)", records.size(), failed);
    if (failed) exit_code = kExitPartial;
  });
}

void register_hlf(CLI::App& app, const Globals& g, int& exit_code) {
  struct Opts {
    std::string manifest, model, out, images_dir;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("hlf", "Embedding change scores for every manifest pair");
  cmd->add_option("--manifest", o->manifest, "Pair manifest (JSON-lines)")->required();
  cmd->add_option("--model", o->model, "Model spec sidecar (<model>.spec.json)")->required();
  cmd->add_option("--out", o->out, "Output HLF records (JSON-lines)")->required();
  cmd->add_option("--images-dir", o->images_dir, "Root for relative image paths");
  cmd->callback([o, &g, &exit_code] {
    const auto spec = hlf::load_model_spec(g.resolve(o->model));
    const fs::path manifest = g.resolve(o->manifest);
    const auto pairs = study::load_manifest(manifest);
    const fs::path root = image_root(g, o->images_dir, manifest);

    // One backend per worker; loading the first one validates the model
    // before any pair is touched.
    const unsigned workers =
        static_cast<unsigned>(std::min<std::size_t>(resolve_threads(g.threads), std::max<std::size_t>(pairs.size(), 1)));
    std::vector<hlf::EmbeddingBackend> backends;
    backends.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) backends.push_back(hlf::load_backend(spec));
    const std::string model_name = backends.front().name();

    std::vector<Json> records(pairs.size());
    parallel_for(pairs.size(), workers, [&](std::size_t i, unsigned w) {
      const auto& p = pairs[i];
      try {
        const auto gt = img::load_image(under(root, p.gt_path));
        const auto sr = img::load_image(under(root, p.sr_path));
        records[i] = hlf::to_json(hlf::hlf_score(backends[w], gt, sr, p.pair_id), model_name);
      } catch (const Error& e) {
        records[i] = Json{{"pair_id", p.pair_id}, {"model_name", model_name}, {"error", e.what()}};
      }
    });
    std::size_t failed = 0;
    for (const auto& r : records)
      if (r.contains("error")) {
        ++failed;
        spdlog::error("{}", r["error"].get<std::string>());
      }
    write_jsonl(g.resolve(o->out), records);
    spdlog::info("wrote {} HLF records with model {} ({} errors)", records.size(), model_name, failed);
    if (failed) exit_code = kExitPartial;
  });
}

}  // namespace srfid::cli
