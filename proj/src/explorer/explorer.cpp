#include "explorer/explorer.hpp"

#include <algorithm>
#include <fstream>

#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace webprobe::explorer {

using nlohmann::json;

void to_json(json& j, const TraceRecord& r) {
  j = json{{"step", r.step},           {"episode", r.episode},
           {"pre_state", r.pre_state}, {"action", r.action},
           {"post_state", r.post_state}, {"observation_ref", r.observation_ref},
           {"captured_at", r.captured_at}};
  if (r.task) j["task"] = *r.task;
}

void from_json(const json& j, TraceRecord& r) {
  r.step = j.at("step").get<std::int64_t>();
  r.episode = j.value("episode", 0);
  r.pre_state = j.at("pre_state").get<StateId>();
  r.action = j.at("action").get<env::GuiAction>();
  r.post_state = j.at("post_state").get<StateId>();
  r.observation_ref = j.value("observation_ref", "");
  r.captured_at = j.value("captured_at", std::int64_t{0});
  if (j.contains("task")) r.task = j.at("task").get<int>();
}

ArtifactStore::ArtifactStore(std::filesystem::path run_dir) : run_dir_(std::move(run_dir)) {
  std::filesystem::create_directories(run_dir_ / "trace");
  std::filesystem::create_directories(run_dir_ / "pages");
  files::write_text(run_dir_ / "trace" / "trace.jsonl", "");
}

std::string ArtifactStore::save_page(std::int64_t step, const env::PageObservation& obs, std::string_view tag) {
  std::string ref = "pages/" + std::to_string(step) + std::string(tag);
  files::write_text(run_dir_ / (ref + ".html"), obs.html);
  if (!obs.screenshot.empty()) files::write_bytes(run_dir_ / (ref + ".png"), obs.screenshot);
  return ref;
}

void ArtifactStore::append_trace(const TraceRecord& record) {
  std::ofstream out(run_dir_ / "trace" / "trace.jsonl", std::ios::app);
  if (!out) throw Error(ErrorCode::io_error, "cannot append to trace");
  out << json(record).dump() << '\n';
}

std::vector<TraceRecord> load_trace(const std::filesystem::path& trace_file) {
  std::vector<TraceRecord> out;
  for (const auto& line : text::split_lines(files::read_text(trace_file))) {
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line).get<TraceRecord>());
    } catch (const json::exception& e) {
      throw Error(ErrorCode::missing_artifacts, std::string("corrupt trace line: ") + e.what());
    }
  }
  return out;
}

std::string InputPool::value_for(const ActionCandidate& candidate, std::mt19937_64& rng) {
  if (candidate.action.kind == env::ActionKind::select) {
    if (candidate.options.empty()) return {};
    auto n = counters_[candidate.action.target_xpath]++;
    return candidate.options[n % candidate.options.size()];
  }
  if (!candidate.field_key.empty()) {
    if (auto v = env::lookup(app_specific_, candidate.field_key)) return *v;
  }
  auto key = candidate.field_key.empty() ? candidate.action.target_xpath : candidate.field_key;
  auto n = counters_[key]++;
  switch (n % 3) {
    case 0: {
      static constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyz";
      static constexpr std::string_view alnum = "abcdefghijklmnopqrstuvwxyz0123456789";
      std::uniform_int_distribution<std::size_t> first(0, letters.size() - 1);
      std::uniform_int_distribution<std::size_t> rest(0, alnum.size() - 1);
      std::string token(1, letters[first(rng)]);
      for (int i = 0; i < 7; ++i) token += alnum[rest(rng)];
      return token;
    }
    case 1:
      return "1";
    default:
      return "tester@example.com";
  }
}

Explorer::Explorer(ExplorerConfig config, std::vector<env::AppSpecificEntry> app_specific)
    : config_(config),
      values_(config.policy.initial_value),
      inputs_(std::move(app_specific)),
      rng_(config.seed) {}

env::PageObservation Explorer::notify(env::PageObservation obs) {
  if (on_observation_) on_observation_(obs);
  return obs;
}

void Explorer::note_state(StateAbstractor& abstractor, const Abstraction& a, const std::string& ref) {
  ++visits_[a.id];
  if (a.is_new && !ref.empty()) {
    auto& rec = abstractor.graph().mutable_state(a.id);
    rec.exemplar_html = ref + ".html";
    rec.exemplar_png = ref + ".png";
  }
}

ExplorationResult Explorer::explore(env::Environment& env, StateAbstractor& abstractor,
                                    ExploreBudget budget, ArtifactStore* store) {
  ExplorationResult result;
  auto obs = notify(env.reset());
  std::int64_t step = 0;
  auto home = abstractor.abstract(obs, step);
  note_state(abstractor, home, store ? store->save_page(step, obs) : "");

  auto outer_deadline = env.deadline();
  if (budget.duration_ms) {
    auto mine = env.clock().now_ms() + std::max<std::int64_t>(0, *budget.duration_ms);
    env.set_deadline(outer_deadline ? std::min(*outer_deadline, mine) : mine);
  }
  auto out_of_budget = [&] {
    if (budget.max_actions && static_cast<std::int64_t>(result.trace.size()) >= *budget.max_actions)
      return true;
    return env.deadline() && env.clock().now_ms() >= *env.deadline();
  };

  StateId current = home.id;
  auto candidates = extract_actions(obs.html);
  int in_episode = 0;
  int failed_resets = 0;
  int dead_ends = 0;

  // Starts a new episode; false when the phase should stop.
  auto restart = [&]() -> bool {
    while (!out_of_budget()) {
      try {
        obs = notify(env.reset());
      } catch (const Error& e) {
        if (e.code() == ErrorCode::budget_exhausted) return false;
        ++result.environment_errors;
        spdlog::warn("exploration reset failed: {}", e.what());
        if (++failed_resets >= 3) return false;
        continue;
      }
      failed_resets = 0;
      auto a = abstractor.abstract(obs, step);
      note_state(abstractor, a, a.is_new && store ? store->save_page(step, obs, "-reset") : "");
      current = a.id;
      candidates = extract_actions(obs.html);
      in_episode = 0;
      ++result.episodes;
      return true;
    }
    return false;
  };

  result.episodes = 1;
  while (!out_of_budget()) {
    if (in_episode >= config_.episode_length) {
      if (!restart()) break;
      continue;
    }
    if (candidates.empty()) {
      if (++dead_ends > 3 || !restart()) break;
      continue;
    }
    dead_ends = 0;

    const auto& chosen = choose_action(current, candidates, values_, config_.policy.epsilon, rng_);
    env::GuiAction action = chosen.action;
    if (action.kind == env::ActionKind::input || action.kind == env::ActionKind::select)
      action.value = inputs_.value_for(chosen, rng_);
    auto signature = chosen.signature;

    env::PageObservation next;
    try {
      next = notify(env.perform(action));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::budget_exhausted) break;
      ++result.environment_errors;
      spdlog::debug("exploration action failed: {}", e.what());
      td_update(values_, current, signature, 0.0, 0.0, config_.policy.alpha, config_.policy.gamma);
      if (!restart()) break;
      continue;
    }

    ++step;
    auto ref = store ? store->save_page(step, next) : std::string();
    auto post = abstractor.abstract(next, step);
    int prior = visits_[post.id];
    note_state(abstractor, post, ref);
    auto next_candidates = extract_actions(next.html);
    double reward = novelty_reward(post.is_new, prior);
    td_update(values_, current, signature, reward, values_.max_value(post.id, next_candidates),
              config_.policy.alpha, config_.policy.gamma);
    abstractor.graph().record_transition(current, action, post.id, step);

    TraceRecord rec{step, result.episodes - 1, current, action, post.id, ref, next.captured_at, std::nullopt};
    if (store) store->append_trace(rec);
    result.trace.push_back(std::move(rec));

    current = post.id;
    obs = std::move(next);
    candidates = std::move(next_candidates);
    ++in_episode;
  }

  env.set_deadline(outer_deadline);
  return result;
}

}  // namespace webprobe::explorer
