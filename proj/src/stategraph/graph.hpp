#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "env/types.hpp"

namespace webprobe::stategraph {

using StateId = int;
inline constexpr StateId kHomeState = 0;

/// Multiset of root-to-element tag paths; see explorer::fingerprint.
using Fingerprint = std::map<std::string, int>;

struct StateRecord {
  StateId id = 0;
  Fingerprint fingerprint;
  std::string exemplar_html;  // path of the stored page, empty when not persisted
  std::string exemplar_png;
  std::int64_t first_seen_step = 0;
  std::string url;
};

struct TransitionEdge {
  StateId src = 0;
  StateId dst = 0;
  env::GuiAction action;
  std::int64_t recorded_at_step = 0;

  friend bool operator==(const TransitionEdge&, const TransitionEdge&) = default;
};

struct KeyPathStep {
  StateId src;
  TransitionEdge edge;
  StateId dst;
};

/// Contiguous home-to-target path; empty when the target is home.
struct KeyPath {
  std::vector<KeyPathStep> steps;

  std::size_t length() const { return steps.size(); }
};

enum class RecordOutcome { self_loop, created, replaced };

/// Abstract states plus at most one (the most recent) action per ordered
/// state pair. Self-loops are never stored.
class StateTransitionGraph {
 public:
  /// Assigns the next id (0 for the first state, which is home).
  StateId add_state(StateRecord record);
  bool contains(StateId id) const { return id >= 0 && static_cast<std::size_t>(id) < states_.size(); }
  const StateRecord& state(StateId id) const;
  StateRecord& mutable_state(StateId id);
  const std::vector<StateRecord>& states() const { return states_; }
  std::size_t state_count() const { return states_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  /// Throws Error{unknown_state} when either endpoint is unregistered.
  RecordOutcome record_transition(StateId src, const env::GuiAction& action, StateId dst, std::int64_t step);

  const TransitionEdge* edge(StateId src, StateId dst) const;
  /// Stored edges ordered by (src, dst).
  std::vector<TransitionEdge> edges() const;

  /// Edges in BFS discovery order from `home` (FIFO queue, neighbours by
  /// ascending id), then edges unreachable from home ordered by (src, dst).
  std::vector<TransitionEdge> list_transitions(StateId home = kHomeState) const;

  /// Fewest-edge path; ties resolved by the lexicographically smallest
  /// sequence of visited ids. Throws Error{unreachable_target} or
  /// Error{unknown_state}.
  KeyPath shortest_path(StateId home, StateId target) const;

  nlohmann::json to_json() const;
  static StateTransitionGraph from_json(const nlohmann::json& j);

 private:
  void require(StateId id) const;

  std::vector<StateRecord> states_;
  std::map<std::pair<StateId, StateId>, TransitionEdge> edges_;
};

}  // namespace webprobe::stategraph
