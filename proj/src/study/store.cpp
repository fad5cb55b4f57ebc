#include "srfid/study/store.hpp"

#include <unistd.h>

#include <algorithm>
#include <cstdio>

#include "srfid/common/error.hpp"
#include "srfid/common/timeutil.hpp"

namespace srfid::study {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Returns the complete lines of a log; a trailing partial line is cut off
// the file so later appends start on a fresh line.
std::string read_complete_lines(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return {};
  std::string text = read_file(path);
  const auto last_nl = text.find_last_of('\n');
  const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
  if (keep != text.size()) {
    text.resize(keep);
    if (::truncate(path.c_str(), static_cast<off_t>(keep)) != 0) {
      throw IoError("cannot truncate torn record in " + path.string());
    }
  }
  return text;
}

}  // namespace

StudyStore::StudyStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::unique_ptr<StudyStore> StudyStore::open(const std::filesystem::path& data_dir) {
  const auto manifest = data_dir / "manifest.jsonl";
  std::error_code ec;
  if (!std::filesystem::is_regular_file(manifest, ec)) {
    throw IoError("manifest not found: " + manifest.string());
  }
  std::unique_ptr<StudyStore> store(new StudyStore(data_dir));
  store->pairs_ = load_manifest(manifest);
  for (std::size_t k = 0; k < store->pairs_.size(); ++k) store->pair_index_.emplace(store->pairs_[k].pair_id, k);
  store->replay();
  store->annotator_log_ = std::make_unique<AppendLog>(data_dir / "annotators.jsonl");
  store->event_log_ = std::make_unique<AppendLog>(data_dir / "events.jsonl");
  return store;
}

std::unique_ptr<StudyStore> StudyStore::create(const std::filesystem::path& data_dir,
                                               const std::vector<PairRecord>& pairs) {
  std::filesystem::create_directories(data_dir);
  for (const auto& p : pairs) p.validate();
  save_manifest(data_dir / "manifest.jsonl", pairs);
  return open(data_dir);
}

void StudyStore::replay() {
  parse_jsonl(read_complete_lines(dir_ / "annotators.jsonl"), [&](const Json& j, std::size_t line) {
    const std::string id = require_string(j, "annotator_id", line);
    if (annotator_set_.insert(id).second) annotators_.push_back(id);
  });
  parse_jsonl(read_complete_lines(dir_ / "events.jsonl"), [&](const Json& j, std::size_t line) {
    AnnotationEvent e = event_from_json(j, line);
    // The event log is authoritative; an annotator missing from the
    // registration log (crash between the two appends) is implied.
    if (annotator_set_.insert(e.annotator_id).second) annotators_.push_back(e.annotator_id);
    if (!event_ids_.insert(e.event_id).second || answered_[e.annotator_id].count(e.pair_id)) {
      throw ConflictError("events.jsonl line " + std::to_string(line) + ": duplicate event");
    }
    apply(e);
  });
}

void StudyStore::apply(const AnnotationEvent& e) {
  event_ids_.insert(e.event_id);
  answered_[e.annotator_id].insert(e.pair_id);
  if (auto it = pair_index_.find(e.pair_id); it != pair_index_.end() && pairs_[it->second].is_trap) {
    AnnotatorStatus& s = trap_counters_[e.annotator_id];
    s.annotator_id = e.annotator_id;
    ++s.traps_seen;
    if (e.answer == *pairs_[it->second].trap_expected) ++s.traps_correct;
    s.excluded = exclusion_rule(s.traps_seen, s.traps_correct);
  }
  events_.push_back(e);
  // Keep generated ids ahead of anything already in the log.
  if (e.event_id.rfind("ev-", 0) == 0) {
    try {
      next_event_ = std::max<std::size_t>(next_event_, std::stoull(e.event_id.substr(3)) + 1);
    } catch (const std::exception&) {
    }
  }
  next_event_ = std::max(next_event_, events_.size() + 1);
}

std::pair<std::string, bool> StudyStore::register_annotator(const std::string& name) {
  const std::string id = trim(name);
  if (id.empty()) throw ArgumentError("annotator name is empty");
  std::lock_guard lock(mutex_);
  if (annotator_set_.count(id)) return {id, false};
  annotator_log_->append(Json{{"annotator_id", id}, {"registered_at", utc_now_iso8601()}});
  annotator_set_.insert(id);
  annotators_.push_back(id);
  return {id, true};
}

bool StudyStore::has_annotator(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  return annotator_set_.count(annotator_id) > 0;
}

AnnotationEvent StudyStore::record_annotation(AnnotationEvent event) {
  if (event.latency_ms < 0) throw ArgumentError("latency_ms must be non-negative");
  if (!pair_index_.count(event.pair_id)) throw NotFoundError("unknown pair '" + event.pair_id + "'");
  std::lock_guard lock(mutex_);
  if (!annotator_set_.count(event.annotator_id)) {
    throw NotFoundError("unknown annotator '" + event.annotator_id + "'");
  }
  if (auto it = answered_.find(event.annotator_id); it != answered_.end() && it->second.count(event.pair_id)) {
    throw ConflictError("annotator '" + event.annotator_id + "' already answered pair '" + event.pair_id + "'");
  }
  if (event.event_id.empty()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "ev-%08zu", next_event_);
    event.event_id = buf;
  }
  if (event_ids_.count(event.event_id)) throw ConflictError("duplicate event_id '" + event.event_id + "'");
  if (event.presented_at.empty()) event.presented_at = utc_now_iso8601();
  event_log_->append(to_json(event));
  apply(event);
  return event;
}

std::optional<PairRecord> StudyStore::find_pair(const std::string& pair_id) const {
  auto it = pair_index_.find(pair_id);
  if (it == pair_index_.end()) return std::nullopt;
  return pairs_[it->second];
}

std::unordered_set<std::string> StudyStore::answered_by(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  auto it = answered_.find(annotator_id);
  return it == answered_.end() ? std::unordered_set<std::string>{} : it->second;
}

std::unordered_map<std::string, int> StudyStore::valid_counts() const {
  std::lock_guard lock(mutex_);
  std::unordered_map<std::string, int> counts;
  for (const auto& p : pairs_) {
    if (!p.is_trap) counts[p.pair_id] = 0;
  }
  for (const auto& e : events_) {
    auto t = trap_counters_.find(e.annotator_id);
    if (t != trap_counters_.end() && t->second.excluded) continue;
    if (auto c = counts.find(e.pair_id); c != counts.end()) ++c->second;
  }
  return counts;
}

std::size_t StudyStore::event_count() const {
  std::lock_guard lock(mutex_);
  return events_.size();
}

AnnotatorStatus StudyStore::status(const std::string& annotator_id) const {
  std::lock_guard lock(mutex_);
  if (!annotator_set_.count(annotator_id)) throw NotFoundError("unknown annotator '" + annotator_id + "'");
  if (auto it = trap_counters_.find(annotator_id); it != trap_counters_.end()) return it->second;
  AnnotatorStatus s;
  s.annotator_id = annotator_id;
  return s;
}

StudySnapshot StudyStore::snapshot() const {
  std::lock_guard lock(mutex_);
  return StudySnapshot{pairs_, events_, annotators_};
}

}  // namespace srfid::study
