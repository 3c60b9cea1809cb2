#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agents/backend.hpp"
#include "env/types.hpp"
#include "explorer/actions.hpp"
#include "stategraph/graph.hpp"

namespace webprobe::agents {

using stategraph::StateId;

inline constexpr std::string_view kAnswerDelimiter = "FINAL ANSWER:";
inline constexpr std::size_t kDefaultMaxTasks = 5;

struct AgentOptions {
  double temperature = 0.0;
  int max_output = 1024;
};

/// Text after the last delimiter line, or nullopt when there is none.
std::optional<std::string> final_answer(std::string_view response);

// Summarizer

ChatRequest summarizer_request(std::span<const std::uint8_t> screenshot, const AgentOptions& options = {});
/// Final answer collapsed to one paragraph. Throws Error{empty_answer}.
std::string parse_summary(std::string_view response);
std::string summarize_state(ChatBackend& backend, std::span<const std::uint8_t> screenshot,
                            const AgentOptions& options = {});

// Reviser

ChatRequest reviser_request(const std::string& kb_text, std::size_t max_tasks = kDefaultMaxTasks,
                            const AgentOptions& options = {});
/// Numbered lines of the final answer, at most `cap`; empty with a warning
/// when there are none.
std::vector<std::string> parse_tasks(std::string_view response, std::size_t cap = kDefaultMaxTasks);
std::vector<std::string> revise_tasks(ChatBackend& backend, const std::string& kb_text,
                                      std::size_t max_tasks = kDefaultMaxTasks, const AgentOptions& options = {});

// Navigator

ChatRequest navigator_request(const std::string& task, const std::string& graph_text,
                              const AgentOptions& options = {});
/// First "State N" of the final answer; home (0) with a warning when absent
/// or not registered.
StateId parse_navigation(std::string_view response, const std::function<bool(StateId)>& registered);
StateId navigate_select(ChatBackend& backend, const std::string& task, const std::string& graph_text,
                        const std::function<bool(StateId)>& registered, const AgentOptions& options = {});

// Executor planner

enum class Decision { act, done, abort };
std::string_view to_string(Decision decision) noexcept;

struct PlannedAction {
  Decision decision = Decision::abort;
  env::ActionKind kind = env::ActionKind::click;
  std::optional<std::string> value;
  std::string element_description;
  std::string rationale;
  friend bool operator==(const PlannedAction&, const PlannedAction&) = default;
};

struct HistoryEntry {
  PlannedAction plan;
  std::string outcome;  // "ok", or why the step failed
};

struct PlannerInput {
  std::string task;
  std::optional<std::string> key_path;  // nullopt drops the section entirely
  std::string gui_info;
  std::vector<std::uint8_t> screenshot;
  std::vector<HistoryEntry> history;
};

/// Description lines of the states on the path interleaved with transition
/// lines, home first.
std::string render_key_path(const stategraph::KeyPath& path, StateId home,
                            const std::map<StateId, std::string>& descriptions);
/// One line per interactable element.
std::string gui_digest(const std::vector<explorer::ActionCandidate>& candidates);
std::string render_history(const std::vector<HistoryEntry>& history);

/// Role-play (system), then action space, key path, GUI information, task
/// with history, guideline, and the screenshot last.
ChatRequest planner_request(const PlannerInput& input, const AgentOptions& options = {});
/// Total: anything outside the grammar becomes abort("unparseable plan").
PlannedAction parse_plan(std::string_view response);
PlannedAction plan_step(ChatBackend& backend, const PlannerInput& input, const AgentOptions& options = {});

}  // namespace webprobe::agents
