#include "explorer/policy.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace webprobe::explorer {

double ValueTable::get(StateId state, std::uint64_t signature) const {
  auto it = entries_.find({state, signature});
  return it == entries_.end() ? initial_ : it->second;
}

void ValueTable::set(StateId state, std::uint64_t signature, double value) {
  entries_[{state, signature}] = value;
}

double ValueTable::max_value(StateId state, std::span<const ActionCandidate> candidates) const {
  if (candidates.empty()) return 0.0;
  double best = get(state, candidates.front().signature);
  for (const auto& c : candidates.subspan(1)) best = std::max(best, get(state, c.signature));
  return best;
}

const ActionCandidate& choose_action(StateId state, std::span<const ActionCandidate> candidates,
                                     const ValueTable& values, double epsilon, std::mt19937_64& rng) {
  if (candidates.empty()) throw Error(ErrorCode::no_candidates, "no candidate actions");
  if (candidates.size() == 1) return candidates.front();
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (coin(rng) < epsilon) {
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(rng)];
  }
  const ActionCandidate* best = &candidates.front();
  double best_value = values.get(state, best->signature);
  for (const auto& c : candidates.subspan(1)) {
    double v = values.get(state, c.signature);
    if (v > best_value || (v == best_value && c.signature < best->signature)) {
      best = &c;
      best_value = v;
    }
  }
  return *best;
}

double novelty_reward(bool new_state, int prior_visits) {
  if (new_state) return 1.0;
  return 1.0 / (1.0 + std::max(0, prior_visits));
}

void td_update(ValueTable& values, StateId state, std::uint64_t signature, double reward,
               double next_max, double alpha, double gamma) {
  double q = values.get(state, signature);
  values.set(state, signature, q + alpha * (reward + gamma * next_max - q));
}

}  // namespace webprobe::explorer
