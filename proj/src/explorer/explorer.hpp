#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "env/environment.hpp"
#include "explorer/actions.hpp"
#include "explorer/policy.hpp"
#include "explorer/state_abstraction.hpp"

namespace webprobe::explorer {

struct ExplorerConfig {
  PolicyConfig policy;
  double similarity_threshold = 0.95;
  int episode_length = 50;
  std::uint64_t seed = 0;
};

/// Either bound may be absent; exploration stops at whichever comes first.
struct ExploreBudget {
  std::optional<std::int64_t> duration_ms;
  std::optional<std::int64_t> max_actions;
};

struct TraceRecord {
  std::int64_t step = 0;
  int episode = 0;
  StateId pre_state = 0;
  env::GuiAction action;
  StateId post_state = 0;
  std::string observation_ref;
  std::int64_t captured_at = 0;
  std::optional<int> task;  // set for steps taken while executing a testing task
};

void to_json(nlohmann::json& j, const TraceRecord& r);
void from_json(const nlohmann::json& j, TraceRecord& r);

/// Writes trace/trace.jsonl and pages/<step>.html|.png under a run directory.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path run_dir);

  /// Returns the run-relative reference "pages/<step><tag>".
  std::string save_page(std::int64_t step, const env::PageObservation& obs, std::string_view tag = {});
  void append_trace(const TraceRecord& record);
  const std::filesystem::path& run_dir() const { return run_dir_; }

 private:
  std::filesystem::path run_dir_;
};

std::vector<TraceRecord> load_trace(const std::filesystem::path& trace_file);

/// Values typed into form fields: app-specific knowledge when the field name
/// matches a key, otherwise a per-field cycle through a random token, "1"
/// and an e-mail address. Selects cycle through their options.
class InputPool {
 public:
  explicit InputPool(std::vector<env::AppSpecificEntry> app_specific = {})
      : app_specific_(std::move(app_specific)) {}

  std::string value_for(const ActionCandidate& candidate, std::mt19937_64& rng);

 private:
  std::vector<env::AppSpecificEntry> app_specific_;
  std::map<std::string, std::uint64_t> counters_;
};

struct ExplorationResult {
  std::vector<TraceRecord> trace;
  int episodes = 0;
  int environment_errors = 0;
};

class Explorer {
 public:
  Explorer(ExplorerConfig config, std::vector<env::AppSpecificEntry> app_specific = {});

  /// Called with every observation the loop receives, resets included.
  void on_observation(std::function<void(const env::PageObservation&)> callback) {
    on_observation_ = std::move(callback);
  }

  /// Resets the environment, registers the home state if the graph is empty
  /// and runs episodes until the budget is spent. Only the initial reset may
  /// throw; later environment errors end the episode.
  ExplorationResult explore(env::Environment& env, StateAbstractor& abstractor, ExploreBudget budget,
                            ArtifactStore* store = nullptr);

  const ValueTable& values() const { return values_; }

 private:
  env::PageObservation notify(env::PageObservation obs);
  void note_state(StateAbstractor& abstractor, const Abstraction& a,
                  const std::string& ref);

  ExplorerConfig config_;
  ValueTable values_;
  InputPool inputs_;
  std::mt19937_64 rng_;
  std::map<StateId, int> visits_;
  std::function<void(const env::PageObservation&)> on_observation_;
};

}  // namespace webprobe::explorer
