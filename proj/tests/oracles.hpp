#pragma once

// Independent reference implementations used by property tests and the
// acceptance runner. They share no code with the library beyond its types.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "knowledge/knowledge.hpp"
#include "stategraph/graph.hpp"

namespace wpt {

/// Shortest simple path by exhaustive enumeration: every simple path with
/// k nodes is enumerated in lexicographic order for k = 1, 2, ...; the first
/// one ending at the target wins. nullopt when unreachable.
inline std::optional<std::vector<int>> brute_force_path(const std::map<int, std::set<int>>& adjacency, int home,
                                                        int target) {
  std::set<int> nodes{home, target};
  for (const auto& [a, outs] : adjacency) {
    nodes.insert(a);
    nodes.insert(outs.begin(), outs.end());
  }
  std::vector<int> path{home};
  std::set<int> on_path{home};
  std::function<bool(std::size_t)> extend = [&](std::size_t want) -> bool {
    if (path.size() == want) return path.back() == target;
    auto it = adjacency.find(path.back());
    if (it == adjacency.end()) return false;
    for (int next : it->second) {
      if (on_path.count(next)) continue;
      path.push_back(next);
      on_path.insert(next);
      if (extend(want)) return true;
      on_path.erase(next);
      path.pop_back();
    }
    return false;
  };
  for (std::size_t k = 1; k <= nodes.size(); ++k)
    if (extend(k)) return path;
  return std::nullopt;
}

/// Percent in hundredths, rounded half up, from floating-point division.
inline long long oracle_hundredths(long long covered, long long total) {
  return static_cast<long long>(std::floor(static_cast<double>(covered) * 10000.0 / static_cast<double>(total) + 0.5));
}

/// Full sort by (percent, path), then truncation.
inline std::vector<webprobe::knowledge::CoverageEntry> oracle_select(std::vector<webprobe::knowledge::CoverageEntry> v,
                                                                     std::size_t cap) {
  std::stable_sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
    auto pa = oracle_hundredths(a.covered_lines, a.total_lines);
    auto pb = oracle_hundredths(b.covered_lines, b.total_lines);
    if (pa != pb) return pa < pb;
    return a.file < b.file;
  });
  if (v.size() > cap) v.resize(cap);
  return v;
}

}  // namespace wpt
