#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "srfid/common/jsonl.hpp"
#include "srfid/study/aggregate.hpp"
#include "srfid/study/records.hpp"

namespace srfid::study {

/// Durable study state rooted at a data directory:
///   manifest.jsonl    pair records (read-only here)
///   annotators.jsonl  append-only registrations
///   events.jsonl      append-only annotation log, the source of truth
/// Writes are serialized and fsync'ed before returning; readers get
/// consistent snapshots. Safe for concurrent use.
class StudyStore {
 public:
  /// Opens an existing directory and replays both logs. A torn final line
  /// (crash mid-append) is discarded and truncated away. Throws IoError if
  /// the manifest is missing.
  static std::unique_ptr<StudyStore> open(const std::filesystem::path& data_dir);
  /// Writes `pairs` as the manifest (replacing any existing one), then opens.
  static std::unique_ptr<StudyStore> create(const std::filesystem::path& data_dir,
                                            const std::vector<PairRecord>& pairs);

  const std::filesystem::path& data_dir() const noexcept { return dir_; }

  /// Registers a new annotator or resumes an existing one; the id is the
  /// trimmed name. Returns {id, created}. Throws ArgumentError on an empty name.
  std::pair<std::string, bool> register_annotator(const std::string& name);
  bool has_annotator(const std::string& annotator_id) const;

  /// Appends durably. An empty event_id or presented_at is filled in.
  /// Throws NotFoundError for an unknown pair or annotator, ConflictError
  /// for a duplicate (annotator, pair) or event_id, ArgumentError for a
  /// negative latency. Returns the stored event.
  AnnotationEvent record_annotation(AnnotationEvent event);

  std::optional<PairRecord> find_pair(const std::string& pair_id) const;
  const std::vector<PairRecord>& pairs() const noexcept { return pairs_; }
  std::unordered_set<std::string> answered_by(const std::string& annotator_id) const;
  /// Retained (non-excluded) answer count per non-trap pair.
  std::unordered_map<std::string, int> valid_counts() const;
  std::size_t event_count() const;
  AnnotatorStatus status(const std::string& annotator_id) const;

  StudySnapshot snapshot() const;

 private:
  explicit StudyStore(std::filesystem::path dir);
  void replay();
  void apply(const AnnotationEvent& e);

  std::filesystem::path dir_;
  std::vector<PairRecord> pairs_;
  std::unordered_map<std::string, std::size_t> pair_index_;

  mutable std::mutex mutex_;
  std::vector<std::string> annotators_;
  std::unordered_set<std::string> annotator_set_;
  std::vector<AnnotationEvent> events_;
  std::unordered_set<std::string> event_ids_;
  std::unordered_map<std::string, std::unordered_set<std::string>> answered_;
  std::unordered_map<std::string, AnnotatorStatus> trap_counters_;
  std::size_t next_event_ = 1;

  std::unique_ptr<AppendLog> annotator_log_;
  std::unique_ptr<AppendLog> event_log_;
};

}  // namespace srfid::study
