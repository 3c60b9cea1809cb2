#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <utility>

#include "explorer/actions.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::explorer {

using stategraph::StateId;

struct PolicyConfig {
  double epsilon = 0.2;
  double alpha = 0.5;
  double gamma = 0.6;
  double initial_value = 2.5;
};

/// Action-value estimates keyed by (state, action signature). Absent entries
/// read as the optimistic initial value, which drives untried actions first.
class ValueTable {
 public:
  explicit ValueTable(double initial_value = 2.5) : initial_(initial_value) {}

  double get(StateId state, std::uint64_t signature) const;
  void set(StateId state, std::uint64_t signature, double value);
  /// Max over the candidates' values; 0 when there are none (terminal).
  double max_value(StateId state, std::span<const ActionCandidate> candidates) const;
  std::size_t size() const { return entries_.size(); }
  double initial_value() const { return initial_; }
  const std::map<std::pair<StateId, std::uint64_t>, double>& entries() const { return entries_; }

 private:
  double initial_;
  std::map<std::pair<StateId, std::uint64_t>, double> entries_;
};

/// ε-greedy: uniform with probability ε, otherwise the highest value with
/// ties going to the lowest signature. Throws Error{no_candidates}.
const ActionCandidate& choose_action(StateId state, std::span<const ActionCandidate> candidates,
                                     const ValueTable& values, double epsilon, std::mt19937_64& rng);

/// 1.0 for a never-seen state, else 1/(1 + prior visits).
double novelty_reward(bool new_state, int prior_visits);

/// Q(s,a) += α·(r + γ·next_max − Q(s,a)).
void td_update(ValueTable& values, StateId state, std::uint64_t signature, double reward,
               double next_max, double alpha, double gamma);

}  // namespace webprobe::explorer
