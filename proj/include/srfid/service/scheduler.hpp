#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "srfid/study/records.hpp"

namespace srfid::service {

/// Session queue. Unanswered non-trap pairs are shuffled with the session
/// seed, then stably sorted by ascending retained-answer count so coverage
/// evens out. With trap_rate r > 0 the queue is cut into blocks of
/// round(1/r) pairs and one unanswered trap (drawn without replacement) is
/// inserted at a seeded random position inside each block.
std::vector<std::string> build_queue(const std::vector<study::PairRecord>& pairs,
                                     const std::unordered_set<std::string>& answered,
                                     const std::unordered_map<std::string, int>& valid_counts,
                                     double trap_rate, std::uint64_t session_seed);

}  // namespace srfid::service
