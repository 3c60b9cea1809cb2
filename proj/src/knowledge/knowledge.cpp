#include "knowledge/knowledge.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace webprobe::knowledge {
namespace {

using nlohmann::json;

std::int64_t parse_count(std::string_view field, std::string_view line) {
  auto s = text::trim(field);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw Error(ErrorCode::malformed_report, "bad number in coverage line: " + std::string(line));
  return v;
}

struct LcovFile {
  std::string path;
  std::set<std::int64_t> instrumented;
  std::set<std::int64_t> hit;
  std::optional<std::int64_t> lf;
  std::optional<std::int64_t> lh;
};

void flush(LcovFile& f, std::vector<CoverageEntry>& out) {
  if (f.path.empty()) return;
  std::int64_t total = f.lf.value_or(static_cast<std::int64_t>(f.instrumented.size()));
  std::int64_t covered = f.lh.value_or(static_cast<std::int64_t>(f.hit.size()));
  if (covered > total) throw Error(ErrorCode::malformed_report, "LH exceeds LF for " + f.path);
  if (total > 0) out.push_back(make_coverage_entry(f.path, covered, total));
  f = LcovFile{};
}

std::vector<CoverageEntry> ingest_lcov(std::string_view report) {
  std::vector<CoverageEntry> out;
  LcovFile cur;
  for (const auto& raw : text::split_lines(report)) {
    auto line = text::trim(raw);
    if (line.empty()) continue;
    if (line == "end_of_record") {
      flush(cur, out);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    auto tag = std::string_view(line).substr(0, colon);
    auto rest = std::string_view(line).substr(colon + 1);
    if (tag == "SF") {
      flush(cur, out);
      cur.path = std::string(rest);
    } else if (tag == "DA") {
      auto comma = rest.find(',');
      if (comma == std::string_view::npos)
        throw Error(ErrorCode::malformed_report, "bad DA line: " + line);
      auto lineno = parse_count(rest.substr(0, comma), line);
      auto hits_field = rest.substr(comma + 1);
      if (auto c2 = hits_field.find(','); c2 != std::string_view::npos) hits_field = hits_field.substr(0, c2);
      auto hits = parse_count(hits_field, line);
      cur.instrumented.insert(lineno);
      if (hits > 0) cur.hit.insert(lineno);
    } else if (tag == "LF") {
      cur.lf = parse_count(rest, line);
    } else if (tag == "LH") {
      cur.lh = parse_count(rest, line);
    }
  }
  flush(cur, out);
  return out;
}

std::vector<CoverageEntry> ingest_summary(std::string_view report) {
  json j;
  try {
    j = json::parse(report);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_report, std::string("coverage summary is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::malformed_report, "coverage summary must be an object");
  std::vector<CoverageEntry> out;
  for (const auto& [path, v] : j.items()) {
    if (path == "total") continue;
    if (!v.is_object() || !v.contains("lines") || !v["lines"].is_object())
      throw Error(ErrorCode::malformed_report, "missing line counts for " + path);
    const auto& lines = v["lines"];
    auto total = lines.value("total", json()).is_number_integer() ? lines["total"].get<std::int64_t>() : -1;
    auto covered = lines.value("covered", json()).is_number_integer() ? lines["covered"].get<std::int64_t>() : -1;
    if (total < 0 || covered < 0 || covered > total)
      throw Error(ErrorCode::malformed_report, "bad line counts for " + path);
    if (total > 0) out.push_back(make_coverage_entry(path, covered, total));
  }
  return out;
}

}  // namespace

CoverageEntry make_coverage_entry(std::string file, std::int64_t covered, std::int64_t total) {
  if (total <= 0 || covered < 0 || covered > total)
    throw Error(ErrorCode::malformed_report, "invalid line counts for " + file);
  CoverageEntry e;
  e.file = std::move(file);
  e.covered_lines = covered;
  e.total_lines = total;
  e.percent_hundredths = (covered * 20000 + total) / (2 * total);
  return e;
}

std::string format_percent(std::int64_t hundredths) {
  auto frac = hundredths % 100;
  return std::to_string(hundredths / 100) + (frac < 10 ? ".0" : ".") + std::to_string(frac);
}

std::vector<CoverageEntry> ingest_coverage(std::string_view report) {
  auto first = report.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && report[first] == '{') return ingest_summary(report);
  return ingest_lcov(report);
}

std::vector<CoverageEntry> ingest_coverage_file(const std::filesystem::path& path) {
  return ingest_coverage(files::read_text(path));
}

std::vector<CoverageEntry> select_low_coverage(std::vector<CoverageEntry> entries, std::size_t cap) {
  auto less = [](const CoverageEntry& a, const CoverageEntry& b) {
    if (a.percent_hundredths != b.percent_hundredths) return a.percent_hundredths < b.percent_hundredths;
    return a.file < b.file;
  };
  auto n = std::min(cap, entries.size());
  std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(n), entries.end(), less);
  entries.resize(n);
  return entries;
}

std::string_view to_string(TaskStatus status) noexcept {
  switch (status) {
    case TaskStatus::pending: return "pending";
    case TaskStatus::succeeded: return "succeeded";
    case TaskStatus::failed: return "failed";
    case TaskStatus::aborted: return "aborted";
  }
  return "pending";
}

TaskStatus parse_task_status(std::string_view name) {
  for (auto s : {TaskStatus::pending, TaskStatus::succeeded, TaskStatus::failed, TaskStatus::aborted})
    if (to_string(s) == name) return s;
  throw Error(ErrorCode::invalid_argument, "unknown task status: " + std::string(name));
}

std::string placeholder_description(StateId id) {
  return "State " + std::to_string(id) + ": description unavailable";
}

std::string render_description(StateId id, const std::string& text) {
  if (text == placeholder_description(id)) return text;
  return "State " + std::to_string(id) + ": " + text;
}

std::string render_transition(const stategraph::TransitionEdge& edge) {
  std::string out = "Start from State " + std::to_string(edge.src);
  out += "; Performed action: ";
  out += env::to_string(edge.action.kind);
  out += "; Action value: " + edge.action.value.value_or("");
  out += "; Performed on element with XPath: " + edge.action.target_xpath;
  out += ", and with text: \"" + edge.action.target_text + "\"";
  out += "; Lead to State " + std::to_string(edge.dst);
  return out;
}

std::string render_coverage_line(const CoverageEntry& entry) {
  return "File Name: " + entry.file + ", Coverage: " + format_percent(entry.percent_hundredths) + "%";
}

std::string render_app_specific(const std::vector<env::AppSpecificEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += "; ";
    out += e.key + ": " + e.value;
  }
  return out;
}

namespace {

void require_descriptions(const KnowledgeBase& kb) {
  for (const auto& e : kb.transitions) {
    for (auto id : {e.src, e.dst}) {
      if (!kb.descriptions.contains(id))
        throw Error(ErrorCode::missing_description, "no description for State " + std::to_string(id));
    }
  }
}

void append_graph_sections(const KnowledgeBase& kb, std::string& out) {
  out += "Descriptions:\n";
  for (const auto& [id, text] : kb.descriptions) out += render_description(id, text) + "\n";
  out += "\nTransitions:\n";
  for (const auto& e : kb.transitions) out += render_transition(e) + "\n";
}

}  // namespace

std::string render(const KnowledgeBase& kb) {
  require_descriptions(kb);
  std::string out;
  append_graph_sections(kb, out);
  if (kb.coverage_enabled) {
    out += "\nCoverage:\n";
    for (const auto& c : kb.coverage) out += render_coverage_line(c) + "\n";
  }
  out += "\nApp-Specific:\n";
  if (!kb.app_specific.empty()) out += render_app_specific(kb.app_specific) + "\n";
  return out;
}

std::string render_graph_sections(const KnowledgeBase& kb) {
  require_descriptions(kb);
  std::string out;
  append_graph_sections(kb, out);
  return out;
}

std::vector<StateId> describe_missing(KnowledgeBase& kb, const stategraph::StateTransitionGraph& graph,
                                      const std::function<std::string(StateId)>& describe) {
  std::vector<StateId> described;
  for (const auto& s : graph.states()) {
    if (kb.descriptions.contains(s.id)) continue;
    std::string text;
    try {
      text = describe ? text::trim(describe(s.id)) : std::string();
    } catch (const std::exception& e) {
      spdlog::warn("describing State {} failed: {}", s.id, e.what());
    }
    if (text.empty()) text = placeholder_description(s.id);
    kb.descriptions[s.id] = std::move(text);
    described.push_back(s.id);
  }
  return described;
}

void update_from_execution(KnowledgeBase& kb, const stategraph::StateTransitionGraph& graph,
                           const std::function<std::string(StateId)>& describe,
                           const ExecutionFeedback& feedback) {
  describe_missing(kb, graph, describe);
  kb.transitions = graph.list_transitions();
  for (auto& t : kb.tasks)
    if (t.id == feedback.task_id) t.status = feedback.status;
  if (feedback.refreshed_coverage)
    kb.coverage = select_low_coverage(*feedback.refreshed_coverage, feedback.coverage_cap);
}

nlohmann::json to_json(const KnowledgeBase& kb) {
  json descriptions = json::array();
  for (const auto& [id, text] : kb.descriptions) descriptions.push_back({{"state", id}, {"text", text}});
  json transitions = json::array();
  for (const auto& e : kb.transitions)
    transitions.push_back({{"src", e.src}, {"dst", e.dst}, {"action", e.action}, {"recorded_at_step", e.recorded_at_step}});
  json coverage = json::array();
  for (const auto& c : kb.coverage)
    coverage.push_back({{"file", c.file}, {"covered_lines", c.covered_lines}, {"total_lines", c.total_lines},
                        {"percent", format_percent(c.percent_hundredths)}});
  json app = json::array();
  for (const auto& a : kb.app_specific) app.push_back({{"key", a.key}, {"value", a.value}});
  json tasks = json::array();
  for (const auto& t : kb.tasks)
    tasks.push_back({{"id", t.id}, {"description", t.description}, {"status", to_string(t.status)},
                     {"origin_round", t.origin_round}});
  return json{{"descriptions", descriptions}, {"transitions", transitions}, {"coverage", coverage},
              {"coverage_enabled", kb.coverage_enabled}, {"app_specific", app}, {"tasks", tasks}};
}

KnowledgeBase kb_from_json(const nlohmann::json& j) {
  KnowledgeBase kb;
  try {
    for (const auto& d : j.at("descriptions")) kb.descriptions[d.at("state").get<StateId>()] = d.at("text").get<std::string>();
    for (const auto& e : j.at("transitions")) {
      stategraph::TransitionEdge edge;
      edge.src = e.at("src").get<StateId>();
      edge.dst = e.at("dst").get<StateId>();
      edge.action = e.at("action").get<env::GuiAction>();
      edge.recorded_at_step = e.value("recorded_at_step", std::int64_t{0});
      kb.transitions.push_back(std::move(edge));
    }
    for (const auto& c : j.at("coverage"))
      kb.coverage.push_back(make_coverage_entry(c.at("file").get<std::string>(), c.at("covered_lines").get<std::int64_t>(),
                                                c.at("total_lines").get<std::int64_t>()));
    kb.coverage_enabled = j.value("coverage_enabled", true);
    for (const auto& a : j.at("app_specific"))
      kb.app_specific.push_back({a.at("key").get<std::string>(), a.at("value").get<std::string>()});
    for (const auto& t : j.at("tasks"))
      kb.tasks.push_back({t.at("id").get<int>(), t.at("description").get<std::string>(),
                          parse_task_status(t.at("status").get<std::string>()), t.value("origin_round", 0)});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_definition, std::string("malformed knowledge base: ") + e.what());
  }
  return kb;
}

}  // namespace webprobe::knowledge
