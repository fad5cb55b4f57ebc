#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "srfid/study/records.hpp"

namespace srfid::study {

inline constexpr double kDefaultTrainFraction = 0.8;

/// Half-up rounding with a small guard so products like 0.2 * 723 that land
/// a hair under .5 in binary still round up.
std::int64_t round_count(double x) noexcept;

/// Test-pair count per model: round((1 - train_fraction) * n_model), then the
/// residual against round((1 - train_fraction) * N) is applied to the largest
/// model (ties by name).
std::map<std::string, int> test_quotas(const std::map<std::string, int>& model_sizes,
                                       double train_fraction);

/// Assigns split=train/test to every non-trap pair; traps stay unassigned.
/// Within each model, pairs sorted by pair_id are shuffled with a generator
/// seeded from (seed, model_name) and the first quota go to test.
/// Throws StateError if a non-trap pair lacks a final score and
/// ArgumentError if train_fraction is outside (0, 1).
std::vector<PairRecord> split_dataset(const std::vector<PairRecord>& pairs,
                                      const std::vector<FidelityScore>& scores, std::uint64_t seed,
                                      double train_fraction = kDefaultTrainFraction);

}  // namespace srfid::study
