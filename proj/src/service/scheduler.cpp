#include "srfid/service/scheduler.hpp"

#include <algorithm>
#include <cmath>

#include "srfid/common/rng.hpp"

namespace srfid::service {

std::vector<std::string> build_queue(const std::vector<study::PairRecord>& pairs,
                                     const std::unordered_set<std::string>& answered,
                                     const std::unordered_map<std::string, int>& valid_counts,
                                     double trap_rate, std::uint64_t session_seed) {
  std::vector<std::string> regular, traps;
  for (const auto& p : pairs) {
    if (answered.count(p.pair_id)) continue;
    (p.is_trap ? traps : regular).push_back(p.pair_id);
  }
  std::sort(regular.begin(), regular.end());
  std::sort(traps.begin(), traps.end());

  Rng order_rng(mix_seed(session_seed, "order"));
  order_rng.shuffle(std::span<std::string>(regular));
  auto count = [&](const std::string& id) {
    auto it = valid_counts.find(id);
    return it == valid_counts.end() ? 0 : it->second;
  };
  std::stable_sort(regular.begin(), regular.end(),
                   [&](const std::string& a, const std::string& b) { return count(a) < count(b); });

  if (!(trap_rate > 0.0) || traps.empty() || regular.empty()) return regular;

  Rng trap_rng(mix_seed(session_seed, "traps"));
  trap_rng.shuffle(std::span<std::string>(traps));
  const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(1.0 / trap_rate)));
  std::vector<std::string> out;
  out.reserve(regular.size() + traps.size());
  std::size_t next_trap = 0;
  for (std::size_t start = 0; start < regular.size(); start += block) {
    const std::size_t len = std::min(block, regular.size() - start);
    const std::size_t at = next_trap < traps.size() ? static_cast<std::size_t>(trap_rng.below(len + 1)) : len + 1;
    for (std::size_t k = 0; k <= len; ++k) {
      if (k == at) out.push_back(traps[next_trap++]);
      if (k < len) out.push_back(regular[start + k]);
    }
  }
  return out;
}

}  // namespace srfid::service
