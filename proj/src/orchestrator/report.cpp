#include "orchestrator/report.hpp"

#include <array>
#include <cstdio>

#include "common/error.hpp"

namespace webprobe::orchestrator {

using nlohmann::json;

json to_json(const RunReport& r) {
  json timeline = json::array();
  for (const auto& s : r.coverage_timeline)
    timeline.push_back({{"t_ms", s.t_ms},
                        {"covered_lines", s.covered_lines},
                        {"total_lines", s.total_lines},
                        {"percent", knowledge::format_percent(s.percent_hundredths)}});
  json graph = json::array();
  for (const auto& g : r.graph_timeline) graph.push_back({{"t_ms", g.t_ms}, {"states", g.states}, {"edges", g.edges}});
  json tasks = json::array();
  for (const auto& t : r.tasks)
    tasks.push_back({{"id", t.task_id},
                     {"description", t.description},
                     {"origin_round", t.origin_round},
                     {"status", knowledge::to_string(t.status)},
                     {"steps_taken", t.steps_taken},
                     {"new_states", t.new_states},
                     {"new_edges", t.new_edges},
                     {"faults_observed", t.faults_observed},
                     {"key_state", t.key_state},
                     {"started_at", t.started_at},
                     {"finished_at", t.finished_at}});
  json counts = json::object();
  for (auto c : {FaultCategory::network, FaultCategory::javascript, FaultCategory::csp, FaultCategory::other})
    counts[std::string(to_string(c))] = 0;
  for (const auto& f : r.faults) counts[std::string(to_string(f.category))] = counts[std::string(to_string(f.category))].get<int>() + 1;
  return json{{"mode", r.mode},
              {"seed", r.seed},
              {"virtual_time", r.virtual_time},
              {"exploration_ms", r.exploration_ms},
              {"kb_construction_ms", r.kb_construction_ms},
              {"elapsed_ms", r.elapsed_ms},
              {"exploration_actions", r.exploration_actions},
              {"rounds", r.rounds},
              {"agent_requests", r.agent_requests},
              {"console_errors", r.console_errors},
              {"coverage_timeline", timeline},
              {"graph_timeline", graph},
              {"tasks", tasks},
              {"faults", r.faults},
              {"fault_counts", counts},
              {"covered_functionalities", r.covered_functionalities}};
}

RunReport report_from_json(const json& j) {
  RunReport r;
  try {
    r.mode = j.at("mode").get<std::string>();
    r.seed = j.value("seed", std::uint64_t{0});
    r.virtual_time = j.value("virtual_time", true);
    r.exploration_ms = j.value("exploration_ms", std::int64_t{0});
    r.kb_construction_ms = j.value("kb_construction_ms", std::int64_t{0});
    r.elapsed_ms = j.value("elapsed_ms", std::int64_t{0});
    r.exploration_actions = j.value("exploration_actions", 0);
    r.rounds = j.value("rounds", 0);
    r.agent_requests = j.value("agent_requests", std::size_t{0});
    r.console_errors = j.value("console_errors", std::size_t{0});
    for (const auto& s : j.at("coverage_timeline")) {
      CoverageSample c;
      c.t_ms = s.at("t_ms").get<std::int64_t>();
      c.covered_lines = s.at("covered_lines").get<std::int64_t>();
      c.total_lines = s.at("total_lines").get<std::int64_t>();
      c.percent_hundredths = c.total_lines > 0 ? knowledge::make_coverage_entry("", c.covered_lines, c.total_lines).percent_hundredths : 0;
      r.coverage_timeline.push_back(c);
    }
    for (const auto& g : j.value("graph_timeline", json::array()))
      r.graph_timeline.push_back({g.at("t_ms").get<std::int64_t>(), g.at("states").get<std::size_t>(), g.at("edges").get<std::size_t>()});
    for (const auto& t : j.at("tasks")) {
      TaskOutcome o;
      o.task_id = t.at("id").get<int>();
      o.description = t.at("description").get<std::string>();
      o.origin_round = t.value("origin_round", 0);
      o.status = knowledge::parse_task_status(t.at("status").get<std::string>());
      o.steps_taken = t.value("steps_taken", 0);
      o.new_states = t.value("new_states", 0);
      o.new_edges = t.value("new_edges", 0);
      o.faults_observed = t.value("faults_observed", 0);
      o.key_state = t.value("key_state", 0);
      o.started_at = t.value("started_at", std::int64_t{0});
      o.finished_at = t.value("finished_at", std::int64_t{0});
      r.tasks.push_back(std::move(o));
    }
    r.faults = j.at("faults").get<std::vector<FaultRecord>>();
    r.covered_functionalities = j.value("covered_functionalities", std::vector<std::string>{});
  } catch (const std::exception& e) {
    throw Error(ErrorCode::missing_report, std::string("report.json is malformed: ") + e.what());
  }
  return r;
}

namespace {

std::string mmss(std::int64_t ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld", static_cast<long long>(ms / 60000),
                static_cast<long long>((ms / 1000) % 60));
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

std::string render_report_text(const RunReport& r) {
  std::string out;
  out += "Run summary\n";
  out += "  mode:                " + r.mode + "\n";
  out += "  seed:                " + std::to_string(r.seed) + "\n";
  out += "  elapsed:             " + mmss(r.elapsed_ms) + (r.virtual_time ? " (virtual)" : "") + "\n";
  out += "  exploration:         " + mmss(r.exploration_ms) + ", " + std::to_string(r.exploration_actions) + " actions\n";
  out += "  kb construction:     " + mmss(r.kb_construction_ms) + "\n";
  out += "  task rounds:         " + std::to_string(r.rounds) + "\n";
  out += "  agent requests:      " + std::to_string(r.agent_requests) + "\n";
  if (!r.graph_timeline.empty())
    out += "  states / edges:      " + std::to_string(r.graph_timeline.back().states) + " / " +
           std::to_string(r.graph_timeline.back().edges) + "\n";

  out += "\nCoverage timeline\n";
  if (r.coverage_timeline.empty()) out += "  (no coverage reports)\n";
  else out += "  time    covered/total   percent\n";
  for (const auto& s : r.coverage_timeline)
    out += "  " + pad(mmss(s.t_ms), 8) + pad(std::to_string(s.covered_lines) + "/" + std::to_string(s.total_lines), 16) +
           knowledge::format_percent(s.percent_hundredths) + "%\n";

  out += "\nTasks\n";
  if (r.tasks.empty()) out += "  (none)\n";
  else out += "  id  round  status     steps  new states  new edges  description\n";
  for (const auto& t : r.tasks)
    out += "  " + pad(std::to_string(t.task_id), 4) + pad(std::to_string(t.origin_round), 7) +
           pad(std::string(knowledge::to_string(t.status)), 11) + pad(std::to_string(t.steps_taken), 7) +
           pad(std::to_string(t.new_states), 12) + pad(std::to_string(t.new_edges), 11) + t.description + "\n";

  out += "\nFaults\n";
  std::array<int, 4> count{};
  std::array<int, 4> occurrences{};
  for (const auto& f : r.faults) {
    ++count[static_cast<std::size_t>(f.category)];
    occurrences[static_cast<std::size_t>(f.category)] += f.occurrences;
  }
  out += "  category    faults  occurrences\n";
  int total = 0;
  int total_occ = 0;
  for (auto c : {FaultCategory::network, FaultCategory::javascript, FaultCategory::csp, FaultCategory::other}) {
    auto i = static_cast<std::size_t>(c);
    out += "  " + pad(std::string(to_string(c)), 12) + pad(std::to_string(count[i]), 8) + std::to_string(occurrences[i]) + "\n";
    total += count[i];
    total_occ += occurrences[i];
  }
  out += "  " + pad("total", 12) + pad(std::to_string(total), 8) + std::to_string(total_occ) + "\n";
  for (const auto& f : r.faults)
    out += "  [" + std::string(to_string(f.category)) + "] x" + std::to_string(f.occurrences) + " " + f.message +
           (f.source_url.empty() ? "" : " (" + f.source_url + ")") + "\n";
  return out;
}

}  // namespace webprobe::orchestrator
