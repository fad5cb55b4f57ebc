#pragma once

#include <cstdint>
#include <vector>

#include "srfid/study/records.hpp"

namespace srfid::study {

/// Equal-width bin of `similarity` over [lo, hi]; the top edge belongs to
/// the last bin and a degenerate range maps everything to bin 0.
int similarity_bin(double similarity, double lo, double hi, int bins) noexcept;

/// Per-bin quotas: total / bins each, the remainder going one apiece to the
/// lowest bins.
std::vector<int> bin_quotas(int total, int bins);

/// Selects `total` candidates evenly across `bins` equal-width similarity
/// bins. Within a bin candidates are taken by ascending pair_id; a bin that
/// cannot meet its quota borrows from the nearest bins (lower index first
/// on ties). Output carries `bin` and is ordered by (bin, pair_id).
/// Throws ArgumentError if bins < 1, candidates are empty or lack a
/// similarity, or total exceeds the candidate count.
std::vector<PairRecord> stratified_select(const std::vector<PairRecord>& candidates, int total,
                                          int bins = kDefaultBins);

}  // namespace srfid::study
