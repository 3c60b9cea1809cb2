#include "stategraph/graph.hpp"

#include <algorithm>
#include <deque>

#include "common/error.hpp"

namespace webprobe::stategraph {

using nlohmann::json;

void StateTransitionGraph::require(StateId id) const {
  if (!contains(id)) throw Error(ErrorCode::unknown_state, "unknown state " + std::to_string(id));
}

StateId StateTransitionGraph::add_state(StateRecord record) {
  record.id = static_cast<StateId>(states_.size());
  states_.push_back(std::move(record));
  return states_.back().id;
}

const StateRecord& StateTransitionGraph::state(StateId id) const {
  require(id);
  return states_[static_cast<std::size_t>(id)];
}

StateRecord& StateTransitionGraph::mutable_state(StateId id) {
  require(id);
  return states_[static_cast<std::size_t>(id)];
}

RecordOutcome StateTransitionGraph::record_transition(StateId src, const env::GuiAction& action, StateId dst,
                                                      std::int64_t step) {
  require(src);
  require(dst);
  if (src == dst) return RecordOutcome::self_loop;
  auto [it, inserted] = edges_.insert_or_assign({src, dst}, TransitionEdge{src, dst, action, step});
  return inserted ? RecordOutcome::created : RecordOutcome::replaced;
}

const TransitionEdge* StateTransitionGraph::edge(StateId src, StateId dst) const {
  auto it = edges_.find({src, dst});
  return it == edges_.end() ? nullptr : &it->second;
}

std::vector<TransitionEdge> StateTransitionGraph::edges() const {
  std::vector<TransitionEdge> out;
  out.reserve(edges_.size());
  for (const auto& [key, e] : edges_) out.push_back(e);
  return out;
}

std::vector<TransitionEdge> StateTransitionGraph::list_transitions(StateId home) const {
  require(home);
  std::vector<TransitionEdge> out;
  out.reserve(edges_.size());
  std::vector<bool> visited(states_.size(), false);
  std::deque<StateId> queue{home};
  visited[static_cast<std::size_t>(home)] = true;
  std::vector<bool> emitted_src(states_.size(), false);
  while (!queue.empty()) {
    StateId s = queue.front();
    queue.pop_front();
    emitted_src[static_cast<std::size_t>(s)] = true;
    // edges_ is keyed (src, dst), so this range is ordered by ascending dst.
    for (auto it = edges_.lower_bound({s, 0}); it != edges_.end() && it->first.first == s; ++it) {
      out.push_back(it->second);
      auto d = static_cast<std::size_t>(it->first.second);
      if (!visited[d]) {
        visited[d] = true;
        queue.push_back(it->first.second);
      }
    }
  }
  for (const auto& [key, e] : edges_)
    if (!emitted_src[static_cast<std::size_t>(key.first)]) out.push_back(e);
  return out;
}

KeyPath StateTransitionGraph::shortest_path(StateId home, StateId target) const {
  require(home);
  require(target);
  KeyPath path;
  if (home == target) return path;

  // Parents fixed at first discovery; with FIFO order and ascending
  // neighbours this yields the lexicographically smallest shortest path.
  std::vector<StateId> parent(states_.size(), -1);
  std::vector<bool> visited(states_.size(), false);
  std::deque<StateId> queue{home};
  visited[static_cast<std::size_t>(home)] = true;
  while (!queue.empty() && !visited[static_cast<std::size_t>(target)]) {
    StateId s = queue.front();
    queue.pop_front();
    for (auto it = edges_.lower_bound({s, 0}); it != edges_.end() && it->first.first == s; ++it) {
      auto d = static_cast<std::size_t>(it->first.second);
      if (visited[d]) continue;
      visited[d] = true;
      parent[d] = s;
      queue.push_back(it->first.second);
    }
  }
  if (!visited[static_cast<std::size_t>(target)])
    throw Error(ErrorCode::unreachable_target,
                "state " + std::to_string(target) + " unreachable from " + std::to_string(home));
  for (StateId cur = target; cur != home; cur = parent[static_cast<std::size_t>(cur)]) {
    StateId p = parent[static_cast<std::size_t>(cur)];
    path.steps.push_back({p, edges_.at({p, cur}), cur});
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

json StateTransitionGraph::to_json() const {
  json states = json::array();
  for (const auto& s : states_) {
    states.push_back({{"id", s.id},
                      {"fingerprint", s.fingerprint},
                      {"exemplar_html", s.exemplar_html},
                      {"exemplar_png", s.exemplar_png},
                      {"first_seen_step", s.first_seen_step},
                      {"url", s.url}});
  }
  json edges = json::array();
  for (const auto& [key, e] : edges_) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"action", e.action}, {"recorded_at_step", e.recorded_at_step}});
  }
  return {{"states", states}, {"edges", edges}};
}

StateTransitionGraph StateTransitionGraph::from_json(const json& j) {
  StateTransitionGraph g;
  try {
    for (const auto& s : j.at("states")) {
      StateRecord r;
      r.fingerprint = s.at("fingerprint").get<Fingerprint>();
      r.exemplar_html = s.value("exemplar_html", "");
      r.exemplar_png = s.value("exemplar_png", "");
      r.first_seen_step = s.value("first_seen_step", std::int64_t{0});
      r.url = s.value("url", "");
      StateId expected = s.at("id").get<StateId>();
      if (g.add_state(std::move(r)) != expected)
        throw Error(ErrorCode::malformed_definition, "graph states must be listed in id order");
    }
    for (const auto& e : j.at("edges")) {
      g.record_transition(e.at("src").get<StateId>(), e.at("action").get<env::GuiAction>(),
                          e.at("dst").get<StateId>(), e.value("recorded_at_step", std::int64_t{0}));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_definition, std::string("graph: ") + e.what());
  }
  return g;
}

}  // namespace webprobe::stategraph
