#include "srfid/correlate/series.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "srfid/common/error.hpp"

namespace srfid::correlate {

std::string_view to_string(ScorerType type) noexcept {
  switch (type) {
    case ScorerType::FR: return "FR";
    case ScorerType::NR: return "NR";
    case ScorerType::HLF: return "HLF";
  }
  return "FR";
}

ScorerType parse_scorer_type(std::string_view name) {
  if (name == "FR") return ScorerType::FR;
  if (name == "NR") return ScorerType::NR;
  if (name == "HLF") return ScorerType::HLF;
  throw ArgumentError("unknown scorer type '" + std::string(name) + "'");
}

void ScoreSeries::add(const std::string& pair_id, double value) {
  if (!entries.emplace(pair_id, value).second) {
    throw ConflictError("duplicate pair_id '" + pair_id + "' in series " + scorer_name);
  }
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Reads {value, infinite}; a true `infinite` flag wins over the value.
double read_value(const Json& j, std::size_t line) {
  if (j.contains("infinite") && !j["infinite"].is_null()) {
    if (!j["infinite"].is_boolean()) throw ParseError(line, "field 'infinite' must be a boolean");
    if (j["infinite"].get<bool>()) {
      if (j.contains("value") && j["value"].is_number() && j["value"].get<double>() < 0) return -kInf;
      return kInf;
    }
  }
  const double v = require_number(j, "value", line);
  if (!std::isfinite(v)) throw ParseError(line, "value must be finite unless flagged infinite");
  return v;
}

template <typename Fn>
void each_record(const std::string& text, Fn fn) {
  parse_jsonl(text, [&](const Json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
    fn(j, line);
  });
}

}  // namespace

ScoreSeries parse_external_scores(const std::string& text) {
  ScoreSeries s;
  bool have_header = false;
  each_record(text, [&](const Json& j, std::size_t line) {
    if (!have_header) {
      if (!j.contains("scorer_name") || j.contains("pair_id")) {
        throw ParseError(line, "missing header line {scorer_name, orientation}");
      }
      s.scorer_name = require_string(j, "scorer_name", line);
      try {
        s.orientation = parse_orientation(require_string(j, "orientation", line));
        if (j.contains("type")) s.type = parse_scorer_type(require_string(j, "type", line));
      } catch (const ArgumentError& e) {
        throw ParseError(line, e.what());
      }
      have_header = true;
      return;
    }
    s.add(require_string(j, "pair_id", line), read_value(j, line));
  });
  if (!have_header) throw ParseError(1, "missing header line {scorer_name, orientation}");
  return s;
}

ScoreSeries import_external_scores(const std::filesystem::path& path) {
  return parse_external_scores(read_file(path));
}

std::vector<ScoreSeries> parse_metric_records(const std::string& text) {
  std::vector<ScoreSeries> out;
  std::map<std::string, std::size_t> index;
  each_record(text, [&](const Json& j, std::size_t line) {
    if (j.contains("error")) return;
    const std::string metric = require_string(j, "metric", line);
    auto it = index.find(metric);
    if (it == index.end()) {
      ScoreSeries s;
      s.scorer_name = metric;
      s.type = ScorerType::FR;
      try {
        s.orientation = parse_orientation(require_string(j, "orientation", line));
      } catch (const ArgumentError& e) {
        throw ParseError(line, e.what());
      }
      it = index.emplace(metric, out.size()).first;
      out.push_back(std::move(s));
    }
    out[it->second].add(require_string(j, "pair_id", line), read_value(j, line));
  });
  return out;
}

std::vector<ScoreSeries> parse_hlf_records(const std::string& text) {
  std::vector<ScoreSeries> out;
  std::map<std::string, std::size_t> index;
  each_record(text, [&](const Json& j, std::size_t line) {
    if (j.contains("error")) return;
    const std::string model = require_string(j, "model_name", line);
    auto it = index.find(model);
    if (it == index.end()) {
      ScoreSeries s;
      s.scorer_name = model;
      s.orientation = Orientation::lower_is_better;
      s.type = ScorerType::HLF;
      it = index.emplace(model, out.size()).first;
      out.push_back(std::move(s));
    }
    out[it->second].add(require_string(j, "pair_id", line), require_number(j, "change_score", line));
  });
  return out;
}

std::vector<ScoreSeries> load_series_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string first;
  std::size_t line_no = 0;
  while (std::getline(in, first)) {
    ++line_no;
    if (first.find_first_not_of(" \t\r") != std::string::npos) break;
    first.clear();
  }
  if (first.empty()) return {};
  Json j;
  try {
    j = Json::parse(first);
  } catch (const Json::parse_error& e) {
    throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
  }
  if (j.contains("scorer_name")) return {parse_external_scores(text)};
  if (j.contains("metric")) return parse_metric_records(text);
  if (j.contains("change_score")) return parse_hlf_records(text);
  throw ParseError(line_no, "unrecognised score file format in " + path.string());
}

}  // namespace srfid::correlate
