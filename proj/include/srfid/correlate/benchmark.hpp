#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "srfid/common/jsonl.hpp"
#include "srfid/correlate/series.hpp"
#include "srfid/study/records.hpp"

namespace srfid::correlate {

enum class DatasetSplit { train, test, all };

std::string_view to_string(DatasetSplit split) noexcept;
/// Throws ArgumentError for an unknown name.
DatasetSplit parse_dataset_split(std::string_view name);

struct ReportRow {
  std::string scorer_name;
  ScorerType type = ScorerType::FR;
  Orientation orientation = Orientation::lower_is_better;
  std::optional<double> srcc;
  std::optional<double> plcc;
  int n = 0;       // common pairs used for SRCC
  int n_plcc = 0;  // common pairs with finite scorer values
  std::string error;
};

struct MetricReport {
  std::vector<ReportRow> rows;
  std::string generated_at;
  DatasetSplit dataset_split = DatasetSplit::all;
};

/// Declared in every report: how scorer orientation is handled.
extern const char* const kSignConvention;

/// Correlates every series against the final fidelity scores on `split`.
/// Membership in train/test comes from `pairs`; `all` ignores it.
/// higher_is_better series are negated first. SRCC uses every common pair
/// (infinities rank at the extremes); PLCC drops pairs with an infinite
/// scorer value. Per-row failures (overlap < 3, constant series) are
/// recorded in ReportRow::error. Rows keep the order of `series`.
MetricReport benchmark(const std::vector<study::FidelityScore>& scores,
                       const std::vector<study::PairRecord>& pairs,
                       const std::vector<ScoreSeries>& series, DatasetSplit split,
                       unsigned threads = 1);

Json to_json(const MetricReport& report);
/// Aligned plain-text table: Metric, SRCC, PLCC, Type.
std::string format_table(const MetricReport& report);

}  // namespace srfid::correlate
