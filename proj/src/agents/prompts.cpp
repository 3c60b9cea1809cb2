#include "agents/prompts.hpp"

#include <regex>

#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/png.hpp"
#include "common/text.hpp"
#include "knowledge/knowledge.hpp"

namespace webprobe::agents {
namespace {

constexpr std::string_view kAnswerInstruction = "End your reply with a line \"FINAL ANSWER:\" followed by ";

ChatRequest base_request(Role role, std::string system, const AgentOptions& options) {
  ChatRequest r;
  r.role = role;
  r.system = std::move(system);
  r.temperature = options.temperature;
  r.max_output = options.max_output;
  return r;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

PlannedAction unparseable() {
  PlannedAction p;
  p.decision = Decision::abort;
  p.rationale = "unparseable plan";
  return p;
}

std::optional<PlannedAction> parse_plan_line(const std::string& line) {
  auto u = upper(line);
  if (u == "DONE" || u.rfind("DONE ", 0) == 0 || u.rfind("DONE.", 0) == 0 || u.rfind("DONE:", 0) == 0) {
    PlannedAction p;
    p.decision = Decision::done;
    auto colon = line.find(':');
    if (colon != std::string::npos) p.rationale = text::trim(line.substr(colon + 1));
    return p;
  }
  if (u == "ABORT" || u.rfind("ABORT:", 0) == 0 || u.rfind("ABORT ", 0) == 0) {
    PlannedAction p;
    p.decision = Decision::abort;
    auto colon = line.find(':');
    p.rationale = colon == std::string::npos ? "" : text::trim(line.substr(colon + 1));
    return p;
  }
  if (u.rfind("ACTION:", 0) != 0) return std::nullopt;

  std::map<std::string, std::string> fields;
  std::size_t start = 0;
  while (start <= line.size()) {
    auto bar = line.find('|', start);
    auto field = line.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
    auto colon = field.find(':');
    if (colon != std::string::npos) fields[upper(text::trim(field.substr(0, colon)))] = text::trim(field.substr(colon + 1));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  auto kind_name = text::to_lower(fields["ACTION"]);
  if (kind_name == "done") return parse_plan_line("DONE");
  if (kind_name == "abort") return parse_plan_line("ABORT: " + fields["RATIONALE"]);

  PlannedAction p;
  p.decision = Decision::act;
  try {
    p.kind = env::parse_action_kind(kind_name);
  } catch (const Error&) {
    return std::nullopt;
  }
  p.rationale = fields.count("RATIONALE") ? fields["RATIONALE"] : "";
  p.element_description = fields.count("ELEMENT") ? fields["ELEMENT"] : "";
  if (p.kind == env::ActionKind::back) {
    if (p.element_description.empty()) p.element_description = "browser history";
    return p;
  }
  if (p.element_description.empty()) return std::nullopt;
  if (p.kind == env::ActionKind::input || p.kind == env::ActionKind::select) {
    if (!fields.count("VALUE")) return std::nullopt;
    p.value = fields["VALUE"];
  }
  return p;
}

}  // namespace

std::optional<std::string> final_answer(std::string_view response) {
  auto pos = response.rfind(kAnswerDelimiter);
  if (pos == std::string_view::npos) return std::nullopt;
  return text::trim(response.substr(pos + kAnswerDelimiter.size()));
}

ChatRequest summarizer_request(std::span<const std::uint8_t> screenshot, const AgentOptions& options) {
  auto r = base_request(Role::summarizer,
                        "You are an experienced web application tester. You write short, precise descriptions "
                        "of application pages so that other testers can tell similar pages apart.",
                        options);
  std::string instruction =
      "The screenshot shows one page of the application under test.\n"
      "Think step by step. First list the visible components and the status of each one "
      "(enabled or disabled, empty or filled in, selected or not). Then state what the page is for "
      "and what a user can do on it.\n"
      "The description must be a single paragraph, detailed enough to distinguish this page from "
      "similar ones, and free of repetition.\n";
  instruction += kAnswerInstruction;
  instruction += "the description.";
  r.parts.push_back(ContentPart::of_text(std::move(instruction)));
  r.parts.push_back(ContentPart::of_image({screenshot.begin(), screenshot.end()}));
  return r;
}

std::string parse_summary(std::string_view response) {
  auto answer = final_answer(response);
  if (!answer) spdlog::warn("summarizer reply has no answer delimiter; using the whole reply");
  auto text = text::collapse_whitespace(answer ? *answer : response);
  if (text.empty()) throw Error(ErrorCode::empty_answer, "summarizer returned an empty description");
  return text;
}

std::string summarize_state(ChatBackend& backend, std::span<const std::uint8_t> screenshot,
                            const AgentOptions& options) {
  if (!png::is_png(screenshot)) throw Error(ErrorCode::invalid_argument, "screenshot is not a PNG image");
  return parse_summary(complete_with_retry(backend, summarizer_request(screenshot, options)));
}

ChatRequest reviser_request(const std::string& kb_text, std::size_t max_tasks, const AgentOptions& options) {
  auto r = base_request(Role::reviser,
                        "You are an experienced web application tester who designs functional test tasks.",
                        options);
  std::string prompt =
      "An automated explorer has tested the application and its findings are summarized in the "
      "knowledge base below: descriptions of the states it reached, the transitions between them, "
      "the source files with the lowest line coverage (when available) and application-specific "
      "facts such as credentials.\n\n"
      "[Knowledge base]\n" +
      kb_text +
      "[End of knowledge base]\n\n"
      "Think step by step. Summarize what each part of the knowledge base tells you. Then infer "
      "complex functionalities the explorer most likely did not exercise; poorly covered files point "
      "to untested code. Propose at most " +
      std::to_string(max_tasks) +
      " testing tasks. Each task is one imperative sentence a tester can carry out through the GUI, "
      "including any concrete input values it needs.\n";
  prompt += kAnswerInstruction;
  prompt += "the tasks as a numbered list, one task per line.";
  r.parts.push_back(ContentPart::of_text(std::move(prompt)));
  return r;
}

std::vector<std::string> parse_tasks(std::string_view response, std::size_t cap) {
  static const std::regex numbered(R"(^\s*(\d+)\s*[.):]\s*(.+)$)");
  auto answer = final_answer(response);
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(answer ? *answer : std::string())) {
    std::smatch m;
    if (!std::regex_match(line, m, numbered)) continue;
    auto task = text::trim(m[2].str());
    if (task.empty()) continue;
    if (out.size() == cap) break;
    out.push_back(std::move(task));
  }
  if (out.empty()) spdlog::warn("reviser reply contains no numbered tasks; skipping the round");
  return out;
}

std::vector<std::string> revise_tasks(ChatBackend& backend, const std::string& kb_text, std::size_t max_tasks,
                                      const AgentOptions& options) {
  return parse_tasks(complete_with_retry(backend, reviser_request(kb_text, max_tasks, options)), max_tasks);
}

ChatRequest navigator_request(const std::string& task, const std::string& graph_text, const AgentOptions& options) {
  auto r = base_request(Role::navigator,
                        "You are an experienced web application tester who knows how the application's pages "
                        "are connected.",
                        options);
  std::string prompt = "Task: " + task +
                       "\n\nThe states of the application and the actions that lead from one to another:\n\n" +
                       graph_text +
                       "\nThink step by step about the pages a tester passes through while carrying out the "
                       "task, and pick the one state that is most critical to it.\n";
  prompt += kAnswerInstruction;
  prompt += "\"State <id>\".";
  r.parts.push_back(ContentPart::of_text(std::move(prompt)));
  return r;
}

StateId parse_navigation(std::string_view response, const std::function<bool(StateId)>& registered) {
  static const std::regex state_ref(R"(State\s+(\d+))");
  auto answer = final_answer(response);
  std::string payload = answer ? *answer : std::string(response);
  std::smatch m;
  if (!std::regex_search(payload, m, state_ref)) {
    spdlog::warn("navigator reply names no state; using the home state");
    return stategraph::kHomeState;
  }
  StateId id = -1;
  try {
    id = std::stoi(m[1].str());
  } catch (const std::exception&) {
  }
  if (id < 0 || !registered(id)) {
    spdlog::warn("navigator selected unknown State {}; using the home state", m[1].str());
    return stategraph::kHomeState;
  }
  return id;
}

StateId navigate_select(ChatBackend& backend, const std::string& task, const std::string& graph_text,
                        const std::function<bool(StateId)>& registered, const AgentOptions& options) {
  return parse_navigation(complete_with_retry(backend, navigator_request(task, graph_text, options)), registered);
}

std::string_view to_string(Decision decision) noexcept {
  switch (decision) {
    case Decision::act: return "act";
    case Decision::done: return "done";
    case Decision::abort: return "abort";
  }
  return "abort";
}

std::string render_key_path(const stategraph::KeyPath& path, StateId home,
                            const std::map<StateId, std::string>& descriptions) {
  auto describe = [&](StateId id) {
    auto it = descriptions.find(id);
    return knowledge::render_description(id, it == descriptions.end() ? knowledge::placeholder_description(id)
                                                                        : it->second) +
           "\n";
  };
  std::string out = describe(home);
  for (const auto& step : path.steps) {
    out += knowledge::render_transition(step.edge) + "\n";
    out += describe(step.dst);
  }
  return out;
}

std::string gui_digest(const std::vector<explorer::ActionCandidate>& candidates) {
  std::string out;
  int i = 1;
  for (const auto& c : candidates) {
    out += std::to_string(i++) + ". " + std::string(env::to_string(c.action.kind));
    if (!c.action.target_text.empty()) out += " \"" + c.action.target_text + "\"";
    if (!c.field_key.empty()) out += " field \"" + c.field_key + "\"";
    if (!c.options.empty()) {
      out += " options [";
      for (std::size_t k = 0; k < c.options.size(); ++k) out += (k ? ", " : "") + c.options[k];
      out += "]";
    }
    out += "\n";
  }
  return out.empty() ? "(no interactable elements)\n" : out;
}

std::string render_history(const std::vector<HistoryEntry>& history) {
  std::string out = "Previous actions (" + std::to_string(history.size()) + "):\n";
  if (history.empty()) return out + "(none)\n";
  int i = 1;
  for (const auto& h : history) {
    out += std::to_string(i++) + ". " + std::string(env::to_string(h.plan.kind));
    if (h.plan.value) out += " VALUE \"" + *h.plan.value + "\"";
    out += " on \"" + h.plan.element_description + "\" -> " + h.outcome + "\n";
  }
  return out;
}

ChatRequest planner_request(const PlannerInput& input, const AgentOptions& options) {
  auto r = base_request(Role::planner,
                        "You are a meticulous tester who carries out a testing task on a web application by "
                        "operating its GUI one action at a time.",
                        options);
  r.parts.push_back(ContentPart::of_text(
      "Action space:\n"
      "- click: click an element\n"
      "- input: type VALUE into a text field\n"
      "- select: choose the option VALUE in a drop-down list\n"
      "- scroll: scroll an element into view\n"
      "- back: return to the previous page\n"
      "- done: the task has been completed\n"
      "- abort: the task cannot be completed"));
  if (input.key_path) {
    r.parts.push_back(ContentPart::of_text(
        "Key path (the shortest known route from the home state to the state most relevant to the task):\n" +
        *input.key_path));
  }
  r.parts.push_back(ContentPart::of_text("GUI information (interactable elements on the current page):\n" +
                                         input.gui_info));
  r.parts.push_back(ContentPart::of_text("Task: " + input.task + "\n" + render_history(input.history)));
  std::string guideline =
      "Guideline:\n"
      "Think step by step. Describe the current page, compare it with the key path and the task, check "
      "what the previous actions achieved, and decide whether the task is complete. Otherwise choose the "
      "single next action and describe its target element by visible text or label.\n";
  guideline += kAnswerInstruction;
  guideline +=
      "exactly one line in one of these forms:\n"
      "ACTION: <click|input|select|scroll|back> | VALUE: <text> | ELEMENT: <element description> | "
      "RATIONALE: <reason>\n"
      "DONE\n"
      "ABORT: <reason>";
  r.parts.push_back(ContentPart::of_text(std::move(guideline)));
  r.parts.push_back(ContentPart::of_image(input.screenshot));
  return r;
}

PlannedAction parse_plan(std::string_view response) {
  auto answer = final_answer(response);
  for (const auto& raw : text::split_lines(answer ? *answer : std::string(response))) {
    auto line = text::trim(raw);
    if (line.empty()) continue;
    if (auto p = parse_plan_line(line)) return *p;
  }
  return unparseable();
}

PlannedAction plan_step(ChatBackend& backend, const PlannerInput& input, const AgentOptions& options) {
  return parse_plan(complete_with_retry(backend, planner_request(input, options)));
}

}  // namespace webprobe::agents
