#include "srfid/study/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "srfid/common/error.hpp"

namespace srfid::study {

std::vector<AnnotatorStatus> annotator_filter(const std::vector<PairRecord>& pairs,
                                              const std::vector<AnnotationEvent>& events,
                                              const std::vector<std::string>& registered) {
  std::unordered_map<std::string, const PairRecord*> by_id;
  for (const auto& p : pairs) by_id.emplace(p.pair_id, &p);

  std::map<std::string, AnnotatorStatus> statuses;
  for (const auto& id : registered) statuses[id].annotator_id = id;
  for (const auto& e : events) {
    AnnotatorStatus& s = statuses[e.annotator_id];
    s.annotator_id = e.annotator_id;
    auto it = by_id.find(e.pair_id);
    if (it == by_id.end() || !it->second->is_trap) continue;
    ++s.traps_seen;
    if (e.answer == *it->second->trap_expected) ++s.traps_correct;
  }
  std::vector<AnnotatorStatus> out;
  out.reserve(statuses.size());
  for (auto& [_, s] : statuses) {
    s.excluded = exclusion_rule(s.traps_seen, s.traps_correct);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<AnnotatorStatus> annotator_filter(const StudySnapshot& snap) {
  return annotator_filter(snap.pairs, snap.events, snap.annotators);
}

std::vector<FidelityScore> aggregate_scores(const std::vector<PairRecord>& pairs,
                                            const std::vector<AnnotationEvent>& events,
                                            const std::vector<AnnotatorStatus>& statuses) {
  std::unordered_set<std::string> excluded;
  for (const auto& s : statuses) {
    if (s.excluded) excluded.insert(s.annotator_id);
  }
  struct Tally {
    int yes = 0;
    int n = 0;
  };
  std::unordered_map<std::string, Tally> tallies;
  for (const auto& e : events) {
    if (excluded.count(e.annotator_id)) continue;
    Tally& t = tallies[e.pair_id];
    ++t.n;
    if (e.answer) ++t.yes;
  }
  std::vector<FidelityScore> out;
  for (const auto& p : pairs) {
    if (p.is_trap) continue;
    FidelityScore s;
    s.pair_id = p.pair_id;
    if (auto it = tallies.find(p.pair_id); it != tallies.end()) {
      s.n_valid = it->second.n;
      s.score = static_cast<double>(it->second.yes) / it->second.n;
    }
    s.final = s.n_valid >= kMinFinalAnnotations;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<FidelityScore> aggregate_scores(const StudySnapshot& snap) {
  return aggregate_scores(snap.pairs, snap.events, annotator_filter(snap));
}

DistributionReport distribution_report(const std::vector<FidelityScore>& scores,
                                       const std::vector<PairRecord>& pairs, int n_buckets) {
  if (n_buckets < 2) throw ArgumentError("n_buckets must be at least 2");
  DistributionReport r;
  r.n_buckets = n_buckets;
  std::unordered_map<std::string, std::string> model_of;
  for (const auto& p : pairs) {
    if (p.is_trap) continue;
    model_of.emplace(p.pair_id, p.model_name);
    r.per_model.try_emplace(p.model_name, std::vector<int>(n_buckets, 0));
  }
  for (const auto& s : scores) {
    if (!s.score) {
      ++r.skipped_null;
      continue;
    }
    auto it = model_of.find(s.pair_id);
    const std::string model = it == model_of.end() ? std::string("unknown") : it->second;
    auto& counts = r.per_model.try_emplace(model, std::vector<int>(n_buckets, 0)).first->second;
    const int k = std::clamp(static_cast<int>(std::floor(*s.score * n_buckets)), 0, n_buckets - 1);
    ++counts[k];
  }
  return r;
}

Json to_json(const DistributionReport& report) {
  Json edges = Json::array();
  for (int k = 0; k <= report.n_buckets; ++k) edges.push_back(static_cast<double>(k) / report.n_buckets);
  Json models = Json::object();
  for (const auto& [name, counts] : report.per_model) models[name] = counts;
  return Json{{"n_buckets", report.n_buckets},
              {"edges", edges},
              {"models", models},
              {"skipped_null", report.skipped_null}};
}

}  // namespace srfid::study
