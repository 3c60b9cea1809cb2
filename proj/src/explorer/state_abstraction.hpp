#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include "env/types.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::explorer {

using stategraph::Fingerprint;
using stategraph::StateId;

/// Multiset of root-to-element paths built from tag names and the sorted
/// names of stable attributes. Text content and attribute values are
/// ignored, as are the volatile attributes value/selected/checked/style.
Fingerprint fingerprint(std::string_view html);

/// Multiset Jaccard: sum of min counts over sum of max counts. Symmetric,
/// 1.0 iff the multisets are equal (two empty fingerprints count as equal).
double similarity(const Fingerprint& a, const Fingerprint& b);

struct Abstraction {
  StateId id = 0;
  bool is_new = false;
};

/// Maps observations onto the graph's state registry. A new state is
/// allocated when no registered fingerprint reaches the threshold;
/// otherwise the most similar one (lowest id on ties) is returned.
class StateAbstractor {
 public:
  StateAbstractor(stategraph::StateTransitionGraph& graph, double threshold = 0.95)
      : graph_(&graph), threshold_(threshold) {}

  Abstraction abstract(const env::PageObservation& obs, std::int64_t step = 0);
  /// Registry lookup only; never allocates.
  std::optional<StateId> match(const Fingerprint& fp) const;

  const std::map<StateId, std::vector<std::uint8_t>>& screenshots() const { return screenshots_; }
  void set_screenshot(StateId id, std::vector<std::uint8_t> png) { screenshots_[id] = std::move(png); }
  stategraph::StateTransitionGraph& graph() { return *graph_; }
  double threshold() const { return threshold_; }

 private:
  stategraph::StateTransitionGraph* graph_;
  double threshold_;
  std::map<StateId, std::vector<std::uint8_t>> screenshots_;
};

}  // namespace webprobe::explorer
