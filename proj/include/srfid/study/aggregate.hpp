#pragma once

#include <map>
#include <string>
#include <vector>

#include "srfid/common/jsonl.hpp"
#include "srfid/study/records.hpp"

namespace srfid::study {

/// Immutable view of the study state; all aggregations are pure functions of it.
struct StudySnapshot {
  std::vector<PairRecord> pairs;
  std::vector<AnnotationEvent> events;
  std::vector<std::string> annotators;  // registration order
};

/// One status per annotator (registered or seen in `events`), sorted by id.
/// Events on pairs missing from `pairs` are ignored.
std::vector<AnnotatorStatus> annotator_filter(const std::vector<PairRecord>& pairs,
                                              const std::vector<AnnotationEvent>& events,
                                              const std::vector<std::string>& registered = {});
std::vector<AnnotatorStatus> annotator_filter(const StudySnapshot& snap);

/// One score per non-trap pair in manifest order. Events from excluded
/// annotators are dropped.
std::vector<FidelityScore> aggregate_scores(const std::vector<PairRecord>& pairs,
                                            const std::vector<AnnotationEvent>& events,
                                            const std::vector<AnnotatorStatus>& statuses);
std::vector<FidelityScore> aggregate_scores(const StudySnapshot& snap);

struct DistributionReport {
  int n_buckets = 10;
  std::map<std::string, std::vector<int>> per_model;  // counts per bucket
  int skipped_null = 0;                               // scores without a value
};

/// Bucket k covers [k/n, (k+1)/n); 1.0 goes to the last bucket. Models come
/// from `pairs`; every model in `pairs` gets a histogram, possibly all zero.
/// Throws ArgumentError if n_buckets < 2.
DistributionReport distribution_report(const std::vector<FidelityScore>& scores,
                                       const std::vector<PairRecord>& pairs, int n_buckets);
Json to_json(const DistributionReport& report);

}  // namespace srfid::study
