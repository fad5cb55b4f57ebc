#include "srfid/study/split.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "srfid/common/error.hpp"
#include "srfid/common/rng.hpp"

namespace srfid::study {

std::int64_t round_count(double x) noexcept { return static_cast<std::int64_t>(std::floor(x + 0.5 + 1e-9)); }

std::map<std::string, int> test_quotas(const std::map<std::string, int>& model_sizes,
                                       double train_fraction) {
  const double test_fraction = 1.0 - train_fraction;
  int n = 0;
  std::map<std::string, int> q;
  for (const auto& [model, size] : model_sizes) {
    n += size;
    q[model] = static_cast<int>(round_count(test_fraction * size));
  }
  int residual = static_cast<int>(round_count(test_fraction * n));
  for (const auto& [_, t] : q) residual -= t;

  // Largest models absorb the residual first; clamping to [0, size] can push
  // what is left on to the next largest.
  std::vector<std::pair<std::string, int>> order(model_sizes.begin(), model_sizes.end());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [model, size] : order) {
    if (residual == 0) break;
    int& t = q[model];
    const int adjusted = std::clamp(t + residual, 0, size);
    residual -= adjusted - t;
    t = adjusted;
  }
  return q;
}

std::vector<PairRecord> split_dataset(const std::vector<PairRecord>& pairs,
                                      const std::vector<FidelityScore>& scores, std::uint64_t seed,
                                      double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ArgumentError("train_fraction must be in (0, 1)");
  std::unordered_map<std::string, const FidelityScore*> by_id;
  for (const auto& s : scores) by_id.emplace(s.pair_id, &s);

  std::map<std::string, std::vector<std::string>> by_model;
  for (const auto& p : pairs) {
    if (p.is_trap) continue;
    auto it = by_id.find(p.pair_id);
    if (it == by_id.end() || !it->second->final || !it->second->score) {
      throw StateError("pair " + p.pair_id + " has no final score");
    }
    by_model[p.model_name].push_back(p.pair_id);
  }
  std::map<std::string, int> sizes;
  for (const auto& [model, ids] : by_model) sizes[model] = static_cast<int>(ids.size());
  const auto quotas = test_quotas(sizes, train_fraction);

  std::unordered_map<std::string, Split> assignment;
  for (auto& [model, ids] : by_model) {
    std::sort(ids.begin(), ids.end());
    Rng rng(mix_seed(seed, model));
    rng.shuffle(std::span<std::string>(ids));
    const int t = quotas.at(model);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      assignment[ids[k]] = static_cast<int>(k) < t ? Split::test : Split::train;
    }
  }
  std::vector<PairRecord> out = pairs;
  for (auto& p : out) {
    p.split = p.is_trap ? Split::unassigned : assignment.at(p.pair_id);
  }
  return out;
}

}  // namespace srfid::study
