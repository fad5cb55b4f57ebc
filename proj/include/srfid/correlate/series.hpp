#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "srfid/common/jsonl.hpp"
#include "srfid/common/orientation.hpp"

namespace srfid::correlate {

enum class ScorerType { FR, NR, HLF };

std::string_view to_string(ScorerType type) noexcept;
/// Throws ArgumentError for an unknown name.
ScorerType parse_scorer_type(std::string_view name);

/// One scorer's values keyed by pair_id. Infinite values (PSNR of identical
/// images) are stored as IEEE infinities.
struct ScoreSeries {
  std::string scorer_name;
  Orientation orientation = Orientation::lower_is_better;
  ScorerType type = ScorerType::FR;
  std::map<std::string, double> entries;

  /// Throws ConflictError naming the id if it is already present.
  void add(const std::string& pair_id, double value);
};

/// External score file: a header line {scorer_name, orientation[, type]}
/// followed by {pair_id, value[, infinite]} lines. Throws ParseError with
/// the line number on malformed input or a missing header and ConflictError
/// on a duplicate pair_id.
ScoreSeries import_external_scores(const std::filesystem::path& path);
ScoreSeries parse_external_scores(const std::string& text);

/// Metric records as written by the score command
/// ({pair_id, metric, orientation, value, infinite}); error records are
/// skipped. One series per metric, in first-seen order, type FR.
std::vector<ScoreSeries> parse_metric_records(const std::string& text);

/// HLF records ({pair_id, cosine, change_score, model_name}); one
/// lower_is_better series of change_score per model_name, type HLF.
std::vector<ScoreSeries> parse_hlf_records(const std::string& text);

/// Detects the format from the first record and dispatches. Throws
/// ParseError if the first record matches no known format.
std::vector<ScoreSeries> load_series_file(const std::filesystem::path& path);

}  // namespace srfid::correlate
