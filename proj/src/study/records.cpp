#include "srfid/study/records.hpp"

#include <cmath>
#include <unordered_set>

#include "srfid/common/error.hpp"

namespace srfid::study {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::train: return "train";
    case Split::test: return "test";
    case Split::unassigned: return "unassigned";
  }
  return "unassigned";
}

Split parse_split(std::string_view name) {
  if (name == "train") return Split::train;
  if (name == "test") return Split::test;
  if (name == "unassigned") return Split::unassigned;
  throw ArgumentError("unknown split '" + std::string(name) + "'");
}

void PairRecord::validate() const {
  if (pair_id.empty()) throw ArgumentError("pair_id is empty");
  if (is_trap != trap_expected.has_value()) {
    throw ArgumentError("pair " + pair_id + ": trap_expected must be set exactly when is_trap");
  }
  if (similarity && !(*similarity >= -1.0 && *similarity <= 1.0)) {
    throw ArgumentError("pair " + pair_id + ": similarity outside [-1, 1]");
  }
  if (bin && *bin < 0) throw ArgumentError("pair " + pair_id + ": negative bin");
}

bool exclusion_rule(int traps_seen, int traps_correct) noexcept {
  return traps_seen >= kTrapMinSeen &&
         static_cast<double>(traps_correct) < kTrapMinAccuracy * static_cast<double>(traps_seen);
}

namespace {

Json opt(const std::optional<std::string>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<std::string> opt_string(const Json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw ParseError(line, std::string("field '") + key + "' must be a string or null");
  return j[key].get<std::string>();
}

std::optional<double> opt_number(const Json& j, const char* key, std::size_t line) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw ParseError(line, std::string("field '") + key + "' must be a number or null");
  return j[key].get<double>();
}

void require_object(const Json& j, std::size_t line) {
  if (!j.is_object()) throw ParseError(line, "record must be a JSON object");
}

}  // namespace

Json to_json(const PairRecord& r) {
  Json j{{"pair_id", r.pair_id},
         {"gt_path", r.gt_path},
         {"sr_path", r.sr_path},
         {"model_name", r.model_name},
         {"recipe_ref", opt(r.recipe_ref)},
         {"similarity", r.similarity ? Json(*r.similarity) : Json(nullptr)},
         {"bin", r.bin ? Json(*r.bin) : Json(nullptr)},
         {"split", std::string(to_string(r.split))},
         {"is_trap", r.is_trap},
         {"trap_expected", r.trap_expected ? Json(*r.trap_expected ? "yes" : "no") : Json(nullptr)}};
  return j;
}

PairRecord pair_from_json(const Json& j, std::size_t line) {
  require_object(j, line);
  PairRecord r;
  r.pair_id = require_string(j, "pair_id", line);
  r.gt_path = require_string(j, "gt_path", line);
  r.sr_path = require_string(j, "sr_path", line);
  r.model_name = require_string(j, "model_name", line);
  r.recipe_ref = opt_string(j, "recipe_ref", line);
  r.similarity = opt_number(j, "similarity", line);
  if (auto b = opt_number(j, "bin", line)) {
    if (*b != std::floor(*b)) throw ParseError(line, "field 'bin' must be an integer");
    r.bin = static_cast<int>(*b);
  }
  if (auto s = opt_string(j, "split", line)) {
    try {
      r.split = parse_split(*s);
    } catch (const ArgumentError& e) {
      throw ParseError(line, e.what());
    }
  }
  if (j.contains("is_trap") && !j["is_trap"].is_null()) r.is_trap = require_bool(j, "is_trap", line);
  if (auto t = opt_string(j, "trap_expected", line)) {
    if (*t != "yes" && *t != "no") throw ParseError(line, "trap_expected must be \"yes\", \"no\" or null");
    r.trap_expected = *t == "yes";
  }
  try {
    r.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(line, e.what());
  }
  return r;
}

Json to_json(const AnnotationEvent& e) {
  return Json{{"event_id", e.event_id},       {"annotator_id", e.annotator_id},
              {"pair_id", e.pair_id},         {"answer", e.answer},
              {"presented_at", e.presented_at}, {"latency_ms", e.latency_ms}};
}

AnnotationEvent event_from_json(const Json& j, std::size_t line) {
  require_object(j, line);
  AnnotationEvent e;
  e.event_id = require_string(j, "event_id", line);
  e.annotator_id = require_string(j, "annotator_id", line);
  e.pair_id = require_string(j, "pair_id", line);
  e.answer = require_bool(j, "answer", line);
  e.presented_at = require_string(j, "presented_at", line);
  const double latency = require_number(j, "latency_ms", line);
  if (latency < 0 || latency != std::floor(latency)) {
    throw ParseError(line, "latency_ms must be a non-negative integer");
  }
  e.latency_ms = static_cast<std::int64_t>(latency);
  return e;
}

Json to_json(const FidelityScore& s) {
  return Json{{"pair_id", s.pair_id},
              {"n_valid", s.n_valid},
              {"score", s.score ? Json(*s.score) : Json(nullptr)},
              {"final", s.final}};
}

FidelityScore score_from_json(const Json& j, std::size_t line) {
  require_object(j, line);
  FidelityScore s;
  s.pair_id = require_string(j, "pair_id", line);
  const double n = require_number(j, "n_valid", line);
  if (n < 0 || n != std::floor(n)) throw ParseError(line, "n_valid must be a non-negative integer");
  s.n_valid = static_cast<int>(n);
  s.score = opt_number(j, "score", line);
  if (s.score && !(*s.score >= 0.0 && *s.score <= 1.0)) throw ParseError(line, "score outside [0, 1]");
  s.final = j.contains("final") ? require_bool(j, "final", line) : s.n_valid >= kMinFinalAnnotations;
  return s;
}

Json to_json(const AnnotatorStatus& s) {
  return Json{{"annotator_id", s.annotator_id},
              {"traps_seen", s.traps_seen},
              {"traps_correct", s.traps_correct},
              {"excluded", s.excluded}};
}

AnnotatorStatus status_from_json(const Json& j, std::size_t line) {
  require_object(j, line);
  AnnotatorStatus s;
  s.annotator_id = require_string(j, "annotator_id", line);
  s.traps_seen = static_cast<int>(require_number(j, "traps_seen", line));
  s.traps_correct = static_cast<int>(require_number(j, "traps_correct", line));
  s.excluded = require_bool(j, "excluded", line);
  return s;
}

std::vector<PairRecord> load_manifest(const std::filesystem::path& path) {
  std::vector<PairRecord> pairs;
  std::unordered_set<std::string> seen;
  read_jsonl(path, [&](const Json& j, std::size_t line) {
    PairRecord r = pair_from_json(j, line);
    if (!seen.insert(r.pair_id).second) throw ConflictError("duplicate pair_id '" + r.pair_id + "' at line " + std::to_string(line));
    pairs.push_back(std::move(r));
  });
  return pairs;
}

void save_manifest(const std::filesystem::path& path, const std::vector<PairRecord>& pairs) {
  std::vector<Json> rows;
  rows.reserve(pairs.size());
  for (const auto& p : pairs) rows.push_back(to_json(p));
  write_file_atomic(path, to_jsonl(rows));
}

std::vector<AnnotationEvent> load_events(const std::filesystem::path& path) {
  std::vector<AnnotationEvent> events;
  read_jsonl(path, [&](const Json& j, std::size_t line) { events.push_back(event_from_json(j, line)); });
  return events;
}

std::vector<FidelityScore> load_scores(const std::filesystem::path& path) {
  std::vector<FidelityScore> scores;
  std::unordered_set<std::string> seen;
  read_jsonl(path, [&](const Json& j, std::size_t line) {
    FidelityScore s = score_from_json(j, line);
    if (!seen.insert(s.pair_id).second) throw ConflictError("duplicate pair_id '" + s.pair_id + "' at line " + std::to_string(line));
    scores.push_back(std::move(s));
  });
  return scores;
}

void save_scores(const std::filesystem::path& path, const std::vector<FidelityScore>& scores) {
  std::vector<Json> rows;
  rows.reserve(scores.size());
  for (const auto& s : scores) rows.push_back(to_json(s));
  write_file_atomic(path, to_jsonl(rows));
}

}  // namespace srfid::study
