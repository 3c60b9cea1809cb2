#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "knowledge/knowledge.hpp"
#include "orchestrator/faults.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::orchestrator {

struct TaskOutcome {
  int task_id = 0;
  std::string description;
  int origin_round = 0;
  knowledge::TaskStatus status = knowledge::TaskStatus::failed;
  int steps_taken = 0;
  int new_states = 0;
  int new_edges = 0;
  int faults_observed = 0;
  stategraph::StateId key_state = stategraph::kHomeState;
  std::int64_t started_at = 0;
  std::int64_t finished_at = 0;
};

struct CoverageSample {
  std::int64_t t_ms = 0;  // since run start
  std::int64_t covered_lines = 0;
  std::int64_t total_lines = 0;
  std::int64_t percent_hundredths = 0;
};

struct GraphSample {
  std::int64_t t_ms = 0;
  std::size_t states = 0;
  std::size_t edges = 0;
};

struct RunReport {
  std::string mode;
  std::uint64_t seed = 0;
  bool virtual_time = true;
  std::int64_t exploration_ms = 0;
  std::int64_t kb_construction_ms = 0;  // excluded from the total budget
  std::int64_t elapsed_ms = 0;
  int exploration_actions = 0;
  int rounds = 0;
  std::size_t agent_requests = 0;
  std::size_t console_errors = 0;
  std::vector<CoverageSample> coverage_timeline;
  std::vector<GraphSample> graph_timeline;
  std::vector<TaskOutcome> tasks;
  std::vector<FaultRecord> faults;
  std::vector<std::string> covered_functionalities;  // simulated backend only
};

nlohmann::json to_json(const RunReport& report);
RunReport report_from_json(const nlohmann::json& j);

/// Human-readable summary: run facts, coverage timeline, task outcomes and
/// faults per category.
std::string render_report_text(const RunReport& report);

}  // namespace webprobe::orchestrator
