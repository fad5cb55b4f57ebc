#include "srfid/correlate/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "srfid/common/error.hpp"
#include "srfid/common/parallel.hpp"
#include "srfid/common/timeutil.hpp"
#include "srfid/correlate/correlation.hpp"

namespace srfid::correlate {

const char* const kSignConvention =
    "higher_is_better scorers are negated before correlation; positive SRCC/PLCC means the scorer "
    "agrees with the fidelity-change score (higher = more change)";

std::string_view to_string(DatasetSplit split) noexcept {
  switch (split) {
    case DatasetSplit::train: return "train";
    case DatasetSplit::test: return "test";
    case DatasetSplit::all: return "all";
  }
  return "all";
}

DatasetSplit parse_dataset_split(std::string_view name) {
  if (name == "train") return DatasetSplit::train;
  if (name == "test") return DatasetSplit::test;
  if (name == "all") return DatasetSplit::all;
  throw ArgumentError("unknown split '" + std::string(name) + "'");
}

namespace {

ReportRow evaluate(const ScoreSeries& s, const std::vector<std::pair<std::string, double>>& truth) {
  ReportRow row;
  row.scorer_name = s.scorer_name;
  row.type = s.type;
  row.orientation = s.orientation;
  const double sign = s.orientation == Orientation::higher_is_better ? -1.0 : 1.0;
  std::vector<double> x, y, xf, yf;
  for (const auto& [id, fidelity] : truth) {
    auto it = s.entries.find(id);
    if (it == s.entries.end()) continue;
    const double v = sign * it->second;
    x.push_back(v);
    y.push_back(fidelity);
    if (std::isfinite(v)) {
      xf.push_back(v);
      yf.push_back(fidelity);
    }
  }
  row.n = static_cast<int>(x.size());
  row.n_plcc = static_cast<int>(xf.size());
  if (row.n < 3) {
    row.error = "insufficient overlap: " + std::to_string(row.n) + " common pairs";
    return row;
  }
  try {
    row.srcc = srcc(x, y);
  } catch (const Error& e) {
    row.error = std::string("srcc: ") + e.what();
  }
  if (row.n_plcc < 3) {
    if (row.error.empty()) row.error = "plcc: only " + std::to_string(row.n_plcc) + " finite pairs";
    return row;
  }
  try {
    row.plcc = plcc(xf, yf);
  } catch (const Error& e) {
    if (row.error.empty()) row.error = e.what();
  }
  return row;
}

}  // namespace

MetricReport benchmark(const std::vector<study::FidelityScore>& scores,
                       const std::vector<study::PairRecord>& pairs,
                       const std::vector<ScoreSeries>& series, DatasetSplit split, unsigned threads) {
  std::unordered_map<std::string, study::Split> split_of;
  for (const auto& p : pairs) split_of.emplace(p.pair_id, p.split);

  std::vector<std::pair<std::string, double>> truth;
  for (const auto& s : scores) {
    if (!s.final || !s.score) continue;
    if (split != DatasetSplit::all) {
      auto it = split_of.find(s.pair_id);
      const study::Split want = split == DatasetSplit::train ? study::Split::train : study::Split::test;
      if (it == split_of.end() || it->second != want) continue;
    }
    truth.emplace_back(s.pair_id, *s.score);
  }
  std::sort(truth.begin(), truth.end());

  MetricReport report;
  report.generated_at = report_timestamp();
  report.dataset_split = split;
  report.rows.resize(series.size());
  parallel_for(series.size(), threads, [&](std::size_t i, unsigned) { report.rows[i] = evaluate(series[i], truth); });
  return report;
}

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string fmt(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

}  // namespace

Json to_json(const MetricReport& report) {
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    Json row{{"scorer_name", r.scorer_name},
             {"srcc", opt(r.srcc)},
             {"plcc", opt(r.plcc)},
             {"n", r.n},
             {"n_plcc", r.n_plcc},
             {"type", std::string(to_string(r.type))},
             {"orientation", std::string(to_string(r.orientation))}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  return Json{{"rows", rows},
              {"generated_at", report.generated_at},
              {"dataset_split", std::string(to_string(report.dataset_split))},
              {"sign_convention", kSignConvention}};
}

std::string format_table(const MetricReport& report) {
  std::size_t name_w = std::string_view("Metric").size();
  for (const auto& r : report.rows) name_w = std::max(name_w, r.scorer_name.size());
  std::string out;
  std::vector<char> storage(name_w + 64);
  char* buf = storage.data();
  auto line = [&](const std::string& name, const std::string& a, const std::string& b, const std::string& t,
                  const std::string& tail) {
    std::snprintf(buf, storage.size(), "%-*s  %8s  %8s  %-4s", static_cast<int>(name_w), name.c_str(), a.c_str(),
                  b.c_str(), t.c_str());
    out += buf;
    out += tail;
    out += '\n';
  };
  line("Metric", "SRCC", "PLCC", "Type", "");
  for (const auto& r : report.rows) {
    line(r.scorer_name, fmt(r.srcc), fmt(r.plcc), std::string(to_string(r.type)),
         r.error.empty() ? "" : "  (" + r.error + ")");
  }
  out += "\nsplit: " + std::string(to_string(report.dataset_split)) + "  generated: " + report.generated_at + "\n";
  out += std::string("note: ") + kSignConvention + "\n";
  return out;
}

}  // namespace srfid::correlate
