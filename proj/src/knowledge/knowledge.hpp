#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "env/environment.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::knowledge {

using stategraph::StateId;

inline constexpr std::size_t kDefaultCoverageCap = 50;

struct CoverageEntry {
  std::string file;
  std::int64_t covered_lines = 0;
  std::int64_t total_lines = 0;
  std::int64_t percent_hundredths = 0;  // 100·covered/total, half-up to 2 decimals

  double percent() const { return static_cast<double>(percent_hundredths) / 100.0; }
  friend bool operator==(const CoverageEntry&, const CoverageEntry&) = default;
};

CoverageEntry make_coverage_entry(std::string file, std::int64_t covered, std::int64_t total);
/// "15.03", "100.00", "0.00".
std::string format_percent(std::int64_t hundredths);

/// LCOV tracefile or per-file JSON summary ({"<path>": {"lines": {"total",
/// "covered"}}}, "total" key ignored). One entry per file with at least one
/// instrumented line, in report order. Throws Error{malformed_report}.
std::vector<CoverageEntry> ingest_coverage(std::string_view report);
std::vector<CoverageEntry> ingest_coverage_file(const std::filesystem::path& path);

/// The `cap` lowest entries, ascending by percent, ties by path.
std::vector<CoverageEntry> select_low_coverage(std::vector<CoverageEntry> entries,
                                               std::size_t cap = kDefaultCoverageCap);

enum class TaskStatus { pending, succeeded, failed, aborted };
std::string_view to_string(TaskStatus status) noexcept;
TaskStatus parse_task_status(std::string_view name);

struct TestingTask {
  int id = 0;
  std::string description;
  TaskStatus status = TaskStatus::pending;
  int origin_round = 0;
  friend bool operator==(const TestingTask&, const TestingTask&) = default;
};

struct KnowledgeBase {
  std::map<StateId, std::string> descriptions;
  std::vector<stategraph::TransitionEdge> transitions;
  std::vector<CoverageEntry> coverage;  // already ranked and capped
  std::vector<env::AppSpecificEntry> app_specific;
  std::vector<TestingTask> tasks;
  bool coverage_enabled = true;
};

std::string placeholder_description(StateId id);
/// "State {id}: {text}"; a placeholder is printed as is.
std::string render_description(StateId id, const std::string& text);

/// "Start from State 0; Performed action: click; ..." (one transition).
std::string render_transition(const stategraph::TransitionEdge& edge);
std::string render_coverage_line(const CoverageEntry& entry);
std::string render_app_specific(const std::vector<env::AppSpecificEntry>& entries);

/// Labeled sections Descriptions, Transitions, Coverage (omitted when
/// coverage is disabled) and App-Specific. Throws
/// Error{missing_description} when a transition endpoint has no description.
std::string render(const KnowledgeBase& kb);

/// Text for the Navigator: descriptions and transitions only.
std::string render_graph_sections(const KnowledgeBase& kb);

/// Describes states that have no description yet. Failures of `describe`
/// are logged and replaced by the placeholder. Returns the ids described.
std::vector<StateId> describe_missing(KnowledgeBase& kb, const stategraph::StateTransitionGraph& graph,
                                      const std::function<std::string(StateId)>& describe);

struct ExecutionFeedback {
  int task_id = 0;
  TaskStatus status = TaskStatus::pending;
  std::optional<std::vector<CoverageEntry>> refreshed_coverage;  // unranked
  std::size_t coverage_cap = kDefaultCoverageCap;
};

/// Folds a finished task back in: descriptions for new states, the graph's
/// current transition listing, the task status and refreshed coverage.
void update_from_execution(KnowledgeBase& kb, const stategraph::StateTransitionGraph& graph,
                           const std::function<std::string(StateId)>& describe,
                           const ExecutionFeedback& feedback);

nlohmann::json to_json(const KnowledgeBase& kb);
KnowledgeBase kb_from_json(const nlohmann::json& j);

}  // namespace webprobe::knowledge
