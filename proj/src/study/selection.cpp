#include "srfid/study/selection.hpp"

#include <algorithm>
#include <cmath>

#include "srfid/common/error.hpp"

namespace srfid::study {

int similarity_bin(double similarity, double lo, double hi, int bins) noexcept {
  if (!(hi > lo)) return 0;
  const double width = (hi - lo) / bins;
  const int k = static_cast<int>(std::floor((similarity - lo) / width));
  return std::clamp(k, 0, bins - 1);
}

std::vector<int> bin_quotas(int total, int bins) {
  if (bins < 1) throw ArgumentError("bins must be at least 1");
  if (total < 0) throw ArgumentError("total must be non-negative");
  std::vector<int> q(bins, total / bins);
  for (int k = 0; k < total % bins; ++k) ++q[k];
  return q;
}

std::vector<PairRecord> stratified_select(const std::vector<PairRecord>& candidates, int total,
                                          int bins) {
  if (bins < 1) throw ArgumentError("bins must be at least 1");
  if (candidates.empty()) throw ArgumentError("no candidates");
  if (total < 0 || static_cast<std::size_t>(total) > candidates.size()) {
    throw ArgumentError("total " + std::to_string(total) + " exceeds the " +
                        std::to_string(candidates.size()) + " candidates");
  }
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& c : candidates) {
    if (!c.similarity) throw ArgumentError("candidate " + c.pair_id + " has no similarity");
    lo = first ? *c.similarity : std::min(lo, *c.similarity);
    hi = first ? *c.similarity : std::max(hi, *c.similarity);
    first = false;
  }

  std::vector<std::vector<PairRecord>> pool(bins);
  for (const auto& c : candidates) {
    PairRecord r = c;
    r.bin = similarity_bin(*c.similarity, lo, hi, bins);
    pool[*r.bin].push_back(std::move(r));
  }
  for (auto& b : pool) {
    std::sort(b.begin(), b.end(), [](const PairRecord& a, const PairRecord& c) { return a.pair_id < c.pair_id; });
  }

  const std::vector<int> quota = bin_quotas(total, bins);
  std::vector<std::size_t> taken(bins, 0);
  std::vector<int> deficit(bins, 0);
  for (int b = 0; b < bins; ++b) {
    taken[b] = std::min<std::size_t>(quota[b], pool[b].size());
    deficit[b] = quota[b] - static_cast<int>(taken[b]);
  }
  // Spill: each short bin borrows the next unselected candidates of its
  // nearest bins, lower index first at equal distance.
  for (int b = 0; b < bins; ++b) {
    for (int d = 1; deficit[b] > 0 && d < bins; ++d) {
      for (int n : {b - d, b + d}) {
        if (n < 0 || n >= bins) continue;
        while (deficit[b] > 0 && taken[n] < pool[n].size()) {
          ++taken[n];
          --deficit[b];
        }
      }
    }
  }

  std::vector<PairRecord> out;
  out.reserve(total);
  for (int b = 0; b < bins; ++b) {
    out.insert(out.end(), pool[b].begin(), pool[b].begin() + static_cast<std::ptrdiff_t>(taken[b]));
  }
  return out;
}

}  // namespace srfid::study
