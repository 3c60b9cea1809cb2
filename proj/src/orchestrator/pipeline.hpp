#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agents/backend.hpp"
#include "agents/locator.hpp"
#include "agents/prompts.hpp"
#include "env/environment.hpp"
#include "explorer/explorer.hpp"
#include "knowledge/knowledge.hpp"
#include "orchestrator/config.hpp"
#include "orchestrator/report.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::orchestrator {

/// Sim fixture or WebDriver session, per the config. Throws on setup errors.
std::unique_ptr<env::Environment> make_environment(const RunConfig& config);
/// Scripted or remote chat backend, per the config.
std::shared_ptr<agents::ChatBackend> make_chat_backend(const RunConfig& config);

struct PipelineParts {
  std::unique_ptr<env::Environment> env;
  std::shared_ptr<agents::ChatBackend> chat;  // may be null in rl_only mode
  std::unique_ptr<agents::Actor> actor;       // defaults to the text actor
};

/// Builds all parts from the config. The chat backend is only created for
/// modes that use agents.
PipelineParts make_parts(const RunConfig& config);

/// Drives the three phases over one environment session: exploration,
/// knowledge-base construction and rounds of agent-driven task execution.
class Pipeline {
 public:
  Pipeline(RunConfig config, PipelineParts parts, std::optional<std::filesystem::path> run_dir = std::nullopt);

  /// Runs the configured mode to completion and writes the run directory.
  /// Only a failure to reach the application at start propagates.
  RunReport run();
  /// Phase 1 alone with the exploration budget.
  RunReport explore_only();

  /// One testing task from a fresh session at home. Public for tests.
  TaskOutcome execute_task(knowledge::TestingTask& task);

  const stategraph::StateTransitionGraph& graph() const { return graph_; }
  const knowledge::KnowledgeBase& kb() const { return kb_; }
  const std::string& kb_text() const { return kb_text_; }
  const agents::InstrumentedBackend* agent_log() const { return chat_.get(); }
  env::Environment& environment() { return *env_; }
  const std::vector<env::ConsoleEntry>& console() const { return console_; }

 private:
  void start_clock();
  std::int64_t now() const;
  void observe(const env::PageObservation& obs);
  std::optional<std::vector<knowledge::CoverageEntry>> current_coverage();
  void sample_coverage(bool force);
  void sample_graph();
  void register_home();
  void phase_explore(explorer::ExploreBudget budget);
  void phase_build_kb();
  void phase_tasks();
  std::string describe(stategraph::StateId id);
  agents::AgentOptions agent_options() const;
  RunReport finish();

  RunConfig config_;
  std::unique_ptr<env::Environment> env_;
  std::shared_ptr<agents::InstrumentedBackend> chat_;
  std::unique_ptr<agents::Actor> actor_;
  std::optional<std::filesystem::path> run_dir_;
  std::unique_ptr<explorer::ArtifactStore> store_;

  stategraph::StateTransitionGraph graph_;
  explorer::StateAbstractor abstractor_;
  knowledge::KnowledgeBase kb_;
  std::string kb_text_;
  RunReport report_;
  std::vector<env::ConsoleEntry> console_;
  std::vector<std::string> task_ledger_;  // normalized descriptions of every generated task

  std::int64_t start_ms_ = 0;
  std::int64_t deadline_ms_ = 0;
  std::int64_t step_ = 0;
  int episode_ = 0;
  bool budget_spent_ = false;
  std::int64_t last_covered_ = -1;
  int* task_fault_counter_ = nullptr;
};

RunReport run_pipeline(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir);
RunReport run_exploration(const RunConfig& config, const std::optional<std::filesystem::path>& run_dir);

/// Offline knowledge-base construction from a run directory: the persisted
/// graph, trace and coverage, with descriptions taken from a stored kb.json,
/// else produced by a scripted Summarizer when `config` names one, else
/// placeholders. Never touches the application or the network. Writes
/// kb.txt and kb.json and returns the rendered text. Throws
/// Error{missing_artifacts}.
std::string build_kb(const std::filesystem::path& run_dir, const RunConfig* config, bool include_coverage);

}  // namespace webprobe::orchestrator
