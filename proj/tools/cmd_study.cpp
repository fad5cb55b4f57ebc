// Study and correlation subcommands: select, aggregate, split, correlate, report.

#include <iostream>

#include <spdlog/spdlog.h>

#include "cli.hpp"
#include "srfid/common/error.hpp"
#include "srfid/correlate/benchmark.hpp"
#include "srfid/correlate/series.hpp"
#include "srfid/study/aggregate.hpp"
#include "srfid/study/records.hpp"
#include "srfid/study/selection.hpp"
#include "srfid/study/split.hpp"

namespace fs = std::filesystem;

namespace srfid::cli {
namespace {

// Writes to `out` when given, else to stdout.
void emit(const Globals& g, const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_file_atomic(g.resolve(out), text);
  }
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const auto end = comma == std::string::npos ? list.size() : comma;
    if (end > start) out.push_back(list.substr(start, end - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

fs::path or_default(const Globals& g, const std::string& given, const char* name) {
  return given.empty() ? g.data_dir / name : g.resolve(given);
}

}  // namespace

void register_select(CLI::App& app, const Globals& g, int&) {
  struct Opts {
    std::string candidates, out;
    int total = 723;
    int bins = study::kDefaultBins;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("select", "Stratified selection of study pairs by embedding similarity");
  cmd->add_option("--candidates", o->candidates, "Candidate pairs with similarity (JSON-lines)")->required();
  cmd->add_option("--total", o->total, "Pairs to select");
  cmd->add_option("--bins", o->bins, "Equal-width similarity bins");
  cmd->add_option("--out", o->out, "Output manifest (JSON-lines)")->required();
  cmd->callback([o, &g] {
    const auto candidates = study::load_manifest(g.resolve(o->candidates));
    const auto selected = study::stratified_select(candidates, o->total, o->bins);
    study::save_manifest(g.resolve(o->out), selected);
    std::vector<int> per_bin(static_cast<std::size_t>(o->bins), 0);
    for (const auto& p : selected) ++per_bin[static_cast<std::size_t>(*p.bin)];
    std::string counts;
    for (int c : per_bin) counts += (counts.empty() ? "" : "/") + std::to_string(c);
    spdlog::info("selected {} of {} candidates, per bin {}", selected.size(), candidates.size(), counts);
  });
}

void register_aggregate(CLI::App& app, const Globals& g, int&) {
  struct Opts {
    std::string events, manifest, out, statuses_out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("aggregate", "Trap filtering and per-pair fidelity scores");
  cmd->add_option("--events", o->events, "Annotation events (default <data-dir>/events.jsonl)");
  cmd->add_option("--manifest", o->manifest, "Pair manifest (default <data-dir>/manifest.jsonl)");
  cmd->add_option("--out", o->out, "Output fidelity scores (JSON-lines)")->required();
  cmd->add_option("--statuses-out", o->statuses_out, "Optional annotator statuses (JSON-lines)");
  cmd->callback([o, &g] {
    const auto pairs = study::load_manifest(or_default(g, o->manifest, "manifest.jsonl"));
    const auto events = study::load_events(or_default(g, o->events, "events.jsonl"));
    const auto statuses = study::annotator_filter(pairs, events);
    const auto scores = study::aggregate_scores(pairs, events, statuses);
    study::save_scores(g.resolve(o->out), scores);
    if (!o->statuses_out.empty()) {
      std::vector<Json> lines;
      for (const auto& s : statuses) lines.push_back(study::to_json(s));
      write_jsonl(g.resolve(o->statuses_out), lines);
    }
    std::size_t excluded = 0, finals = 0;
    for (const auto& s : statuses) excluded += s.excluded ? 1 : 0;
    for (const auto& s : scores) finals += s.final ? 1 : 0;
    spdlog::info("{} annotators ({} excluded), {} scores ({} final)", statuses.size(), excluded, scores.size(),
                 finals);
  });
}

void register_split(CLI::App& app, const Globals& g, int&) {
  struct Opts {
    std::string scores, manifest, out;
    double fraction = study::kDefaultTrainFraction;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("split", "Per-model train/test split of final pairs");
  cmd->add_option("--scores", o->scores, "Fidelity scores (JSON-lines)")->required();
  cmd->add_option("--manifest", o->manifest, "Pair manifest (default <data-dir>/manifest.jsonl)");
  cmd->add_option("--fraction", o->fraction, "Train fraction");
  cmd->add_option("--out", o->out, "Output manifest with split assigned (default: rewrite --manifest)");
  cmd->callback([o, &g] {
    const fs::path manifest = or_default(g, o->manifest, "manifest.jsonl");
    const auto pairs = study::load_manifest(manifest);
    const auto scores = study::load_scores(g.resolve(o->scores));
    const auto result = study::split_dataset(pairs, scores, g.seed, o->fraction);
    study::save_manifest(o->out.empty() ? manifest : g.resolve(o->out), result);
    std::size_t train = 0, test = 0;
    for (const auto& p : result) {
      train += p.split == study::Split::train;
      test += p.split == study::Split::test;
    }
    spdlog::info("split {} pairs: {} train, {} test", train + test, train, test);
  });
}

void register_correlate(CLI::App& app, const Globals& g, int& exit_code) {
  struct Opts {
    std::string scores, manifest, series, split = "test", out;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("correlate", "SRCC/PLCC of scorer series against fidelity scores");
  cmd->add_option("--scores", o->scores, "Fidelity scores (JSON-lines)")->required();
  cmd->add_option("--manifest", o->manifest, "Manifest with split (default <data-dir>/manifest.jsonl)");
  cmd->add_option("--series", o->series, "Comma separated score files (metric, hlf or external)")->required();
  cmd->add_option("--split", o->split, "train, test or all")->check(CLI::IsMember({"train", "test", "all"}));
  cmd->add_option("--out", o->out, "Output report (JSON)");
  cmd->callback([o, &g, &exit_code] {
    const auto split = correlate::parse_dataset_split(o->split);
    const auto scores = study::load_scores(g.resolve(o->scores));
    std::vector<study::PairRecord> pairs;
    if (split != correlate::DatasetSplit::all || !o->manifest.empty())
      pairs = study::load_manifest(or_default(g, o->manifest, "manifest.jsonl"));
    std::vector<correlate::ScoreSeries> series;
    for (const auto& file : split_list(o->series)) {
      const fs::path path = g.resolve(file);
      try {
        for (auto& s : correlate::load_series_file(path)) series.push_back(std::move(s));
      } catch (const Error& e) {
        rethrow_with_context(e, path.string());
      }
    }
    if (series.empty()) throw ArgumentError("no score series in --series");
    const auto report = correlate::benchmark(scores, pairs, series, split, g.threads);
    if (!o->out.empty()) write_file_atomic(g.resolve(o->out), to_json(report).dump(2) + "\n");
    std::cout << correlate::format_table(report);
    for (const auto& row : report.rows)
      if (!row.error.empty()) {
        spdlog::warn("{}: {}", row.scorer_name, row.error);
        exit_code = kExitPartial;
      }
  });
}

void register_report(CLI::App& app, const Globals& g, int&) {
  struct Opts {
    std::string scores, manifest, out;
    int buckets = 10;
  };
  auto o = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand("report", "Per-model fidelity score histograms (JSON)");
  cmd->add_option("--scores", o->scores, "Fidelity scores (JSON-lines)")->required();
  cmd->add_option("--manifest", o->manifest, "Pair manifest (default <data-dir>/manifest.jsonl)");
  cmd->add_option("--buckets", o->buckets, "Histogram buckets over [0, 1]");
  cmd->add_option("--out", o->out, "Output file (default stdout)");
  cmd->callback([o, &g] {
    const auto pairs = study::load_manifest(or_default(g, o->manifest, "manifest.jsonl"));
    const auto scores = study::load_scores(g.resolve(o->scores));
    const auto report = study::distribution_report(scores, pairs, o->buckets);
    emit(g, o->out, to_json(report).dump(2) + "\n");
  });
}

}  // namespace srfid::cli
