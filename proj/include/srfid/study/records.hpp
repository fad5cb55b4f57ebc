#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srfid/common/jsonl.hpp"

namespace srfid::study {

inline constexpr int kMinFinalAnnotations = 12;
inline constexpr int kTrapMinSeen = 5;
inline constexpr double kTrapMinAccuracy = 0.8;
inline constexpr int kDefaultBins = 5;

enum class Split { train, test, unassigned };

std::string_view to_string(Split split) noexcept;
/// Throws ArgumentError for an unknown name.
Split parse_split(std::string_view name);

struct PairRecord {
  std::string pair_id;
  std::string gt_path;
  std::string sr_path;
  std::string model_name;
  std::optional<std::string> recipe_ref;
  std::optional<double> similarity;  // in [-1, 1]
  std::optional<int> bin;            // in [0, bins)
  Split split = Split::unassigned;
  bool is_trap = false;
  std::optional<bool> trap_expected;  // true = "yes"; set iff is_trap

  /// Throws ArgumentError when an invariant is violated.
  void validate() const;
};

struct AnnotationEvent {
  std::string event_id;
  std::string annotator_id;
  std::string pair_id;
  bool answer = false;  // true = "yes, fidelity changed"
  std::string presented_at;
  std::int64_t latency_ms = 0;
};

struct FidelityScore {
  std::string pair_id;
  int n_valid = 0;
  std::optional<double> score;  // fraction of "yes"; null when n_valid == 0
  bool final = false;           // n_valid >= kMinFinalAnnotations
};

struct AnnotatorStatus {
  std::string annotator_id;
  int traps_seen = 0;
  int traps_correct = 0;
  bool excluded = false;
};

/// excluded = seen >= kTrapMinSeen and correct / seen < kTrapMinAccuracy.
bool exclusion_rule(int traps_seen, int traps_correct) noexcept;

Json to_json(const PairRecord& r);
Json to_json(const AnnotationEvent& e);
Json to_json(const FidelityScore& s);
Json to_json(const AnnotatorStatus& s);

// Parsers throw ParseError tagged with `line`.
PairRecord pair_from_json(const Json& j, std::size_t line = 0);
AnnotationEvent event_from_json(const Json& j, std::size_t line = 0);
FidelityScore score_from_json(const Json& j, std::size_t line = 0);
AnnotatorStatus status_from_json(const Json& j, std::size_t line = 0);

/// Duplicate pair_ids throw ConflictError.
std::vector<PairRecord> load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const std::vector<PairRecord>& pairs);
std::vector<AnnotationEvent> load_events(const std::filesystem::path& path);
/// Duplicate pair_ids throw ConflictError.
std::vector<FidelityScore> load_scores(const std::filesystem::path& path);
void save_scores(const std::filesystem::path& path, const std::vector<FidelityScore>& scores);

}  // namespace srfid::study
