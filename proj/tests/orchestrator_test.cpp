#include <gtest/gtest.h>

#include <cstdlib>

#include "common/error.hpp"
#include "common/files.hpp"
#include "orchestrator/config.hpp"
#include "orchestrator/faults.hpp"
#include "orchestrator/pipeline.hpp"
#include "orchestrator/report.hpp"
#include "scenarios.hpp"
#include "support.hpp"

using namespace webprobe;
using namespace webprobe::orchestrator;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

env::ConsoleEntry error_entry(std::string message, std::string source = "", std::int64_t at = 0) {
  env::ConsoleEntry e;
  e.level = env::ConsoleLevel::error;
  e.message = std::move(message);
  e.source_url = std::move(source);
  e.captured_at = at;
  return e;
}

}  // namespace

TEST(ConfigTest, Defaults) {
  auto c = parse_config(json::object(), "/base");
  EXPECT_EQ(c.exploration_budget.duration_ms, 30 * kMinuteMs);
  EXPECT_FALSE(c.exploration_budget.max_actions);
  EXPECT_EQ(c.total_budget_ms, 60 * kMinuteMs);
  EXPECT_EQ(c.action_interval_ms, 2000);
  EXPECT_EQ(c.step_cap_per_task, 20);
  EXPECT_EQ(c.max_tasks_per_round, 5u);
  EXPECT_EQ(c.coverage_cap, 50u);
  EXPECT_EQ(c.mode, Mode::full);
  EXPECT_TRUE(c.include_coverage);
  EXPECT_DOUBLE_EQ(c.explorer.policy.epsilon, 0.2);
}

TEST(ConfigTest, PrecedenceMatrix) {
  // Each field either absent, set in the file, or set in both; the command
  // line wins, then the file, then the default.
  struct Field {
    const char* key;
    json file_value;
    std::function<void(ConfigOverrides&)> cli;
    std::function<std::string(const RunConfig&)> read;
    std::string default_value, file_expect, cli_expect;
  };
  std::vector<Field> fields{
      {"mode", "no_cr", [](ConfigOverrides& o) { o.mode = "llm_only"; },
       [](const RunConfig& c) { return std::string(to_string(c.mode)); }, "full", "no_cr", "llm_only"},
      {"seed", 11, [](ConfigOverrides& o) { o.seed = 99; }, [](const RunConfig& c) { return std::to_string(c.seed); },
       "0", "11", "99"},
      {"exploration_budget", "10m", [](ConfigOverrides& o) { o.exploration_budget = "200 actions"; },
       [](const RunConfig& c) {
         return c.exploration_budget.max_actions ? std::to_string(*c.exploration_budget.max_actions) + " actions"
                                                 : std::to_string(*c.exploration_budget.duration_ms) + " ms";
       },
       "1800000 ms", "600000 ms", "200 actions"},
      {"total_budget", "2h", [](ConfigOverrides& o) { o.total_budget = "90s"; },
       [](const RunConfig& c) { return std::to_string(c.total_budget_ms); }, "3600000", "7200000", "90000"},
  };
  for (std::size_t mask = 0; mask < 9; ++mask) {
    json doc = json::object();
    ConfigOverrides o;
    std::vector<int> level(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      level[i] = static_cast<int>((mask + i) % 3);
      if (level[i] >= 1) doc[fields[i].key] = fields[i].file_value;
      if (level[i] == 2) fields[i].cli(o);
    }
    auto c = parse_config(doc, "/base");
    apply_overrides(c, o);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& want = level[i] == 0 ? fields[i].default_value : level[i] == 1 ? fields[i].file_expect : fields[i].cli_expect;
      EXPECT_EQ(fields[i].read(c), want) << fields[i].key << " level " << level[i];
    }
  }
  for (bool file_on : {true, false}) {
    for (bool cli_off : {true, false}) {
      auto c = parse_config(json{{"coverage", {{"include", file_on}}}}, "/base");
      ConfigOverrides o;
      o.no_coverage = cli_off;
      apply_overrides(c, o);
      EXPECT_EQ(c.include_coverage, file_on && !cli_off);
    }
  }
}

TEST(ConfigTest, DurationsAndBudgets) {
  EXPECT_EQ(parse_duration_ms("30m"), 1800000);
  EXPECT_EQ(parse_duration_ms("1h"), 3600000);
  EXPECT_EQ(parse_duration_ms("90s"), 90000);
  EXPECT_EQ(parse_duration_ms("1500ms"), 1500);
  EXPECT_EQ(parse_duration_ms("2 min"), 120000);
  EXPECT_EQ(parse_duration_ms("45"), 45000);
  EXPECT_EQ(parse_duration_ms("1.5m"), 90000);
  EXPECT_EQ(code_of([] { parse_duration_ms("10 parsecs"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_duration_ms("soon"); }), ErrorCode::config_error);
  auto b = parse_budget("500 actions");
  EXPECT_EQ(b.max_actions, 500);
  EXPECT_FALSE(b.duration_ms);
  EXPECT_EQ(parse_budget("5m").duration_ms, 300000);
}

TEST(ConfigTest, EnvironmentInterpolation) {
  ::setenv("WEBPROBE_TEST_SECRET", "hunter2", 1);
  ::unsetenv("WEBPROBE_TEST_UNSET");
  auto out = interpolate_env(json{{"a", "pw=${WEBPROBE_TEST_SECRET}"},
                                  {"b", json::array({"${WEBPROBE_TEST_UNSET:-fallback}", 3})}});
  EXPECT_EQ(out["a"], "pw=hunter2");
  EXPECT_EQ(out["b"][0], "fallback");
  EXPECT_EQ(out["b"][1], 3);
  EXPECT_EQ(code_of([] { interpolate_env(json("${WEBPROBE_TEST_UNSET}")); }), ErrorCode::config_error);

  auto c = load_config(wpt::fixture("mini-erp", "config.json"));
  ASSERT_EQ(c.app_specific.size(), 3u);
  EXPECT_EQ(c.app_specific[2].value, std::getenv("MINI_ERP_PASSWORD") ? std::getenv("MINI_ERP_PASSWORD") : "secret");
  EXPECT_EQ(c.app.fixture, wpt::fixture("mini-erp"));
}

TEST(ConfigTest, MissingFileAndValidation) {
  EXPECT_NE(message_of([] { load_config("/nonexistent/webprobe.json"); }).find("config not found"), std::string::npos);
  auto c = load_config(wpt::fixture("mini-erp", "config.json"));
  EXPECT_NO_THROW(validate(c));
  auto bad = c;
  bad.exploration_budget = {2 * 60 * kMinuteMs, std::nullopt};
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::config_error);
  bad = c;
  bad.step_cap_per_task = 0;
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::config_error);
  bad = c;
  bad.app.backend = "telnet";
  EXPECT_EQ(code_of([&] { validate(bad); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config(json{{"mode", "everything"}}, "/"); }), ErrorCode::config_error);
  EXPECT_EQ(code_of([] { parse_config(json{{"login", {{"fields", {{"u", "Username"}}}}}}, "/"); }),
            ErrorCode::config_error);
}

TEST(FaultTest, CategoryExamples) {
  EXPECT_EQ(categorize("Access to fetch at 'http://a' from origin 'http://b' has been blocked by CORS policy"),
            FaultCategory::csp);
  EXPECT_EQ(categorize("Refused to load the script because it violates the following Content Security Policy directive"),
            FaultCategory::csp);
  EXPECT_EQ(categorize("GET http://x/api net::ERR_CONNECTION_REFUSED"), FaultCategory::network);
  EXPECT_EQ(categorize("Failed to load resource: the server responded with a status of 500 (Internal Server Error)"),
            FaultCategory::network);
  EXPECT_EQ(categorize("Uncaught TypeError: x is undefined"), FaultCategory::javascript);
  EXPECT_EQ(categorize("SyntaxError: Unexpected token <"), FaultCategory::javascript);
  EXPECT_EQ(categorize("Widget initialization failed"), FaultCategory::other);
}

TEST(FaultTest, DeduplicationKeepsFirstSeenOrder) {
  std::vector<env::ConsoleEntry> entries{error_entry("Uncaught  TypeError:\n a", "s1", 5), error_entry("other", "s1", 6),
                                         error_entry("Uncaught TypeError: a", "s1", 7), error_entry("Uncaught TypeError: a", "s2", 8)};
  env::ConsoleEntry warn = error_entry("Uncaught TypeError: a", "s1", 9);
  warn.level = env::ConsoleLevel::warning;
  entries.push_back(warn);
  auto faults = collect_faults(entries);
  ASSERT_EQ(faults.size(), 3u);
  EXPECT_EQ(faults[0].message, "Uncaught TypeError: a");
  EXPECT_EQ(faults[0].occurrences, 2);
  EXPECT_EQ(faults[0].first_seen, 5);
  EXPECT_EQ(faults[1].message, "other");
  EXPECT_EQ(faults[2].source_url, "s2");
  EXPECT_TRUE(collect_faults({}).empty());
}

TEST(FaultTest, HandLabeledNoisyConsole) { EXPECT_EQ(wpt::check_noisy_console(), ""); }

TEST(ReportTest, JsonRoundTripAndFaultTable) {
  RunReport r;
  r.mode = "full";
  r.seed = 7;
  r.elapsed_ms = 3600000;
  r.coverage_timeline = {{0, 18, 360, 500}, {60000, 100, 360, 2778}};
  r.graph_timeline = {{0, 1, 0}, {60000, 5, 8}};
  TaskOutcome t;
  t.task_id = 1;
  t.description = "Create a project.";
  t.status = knowledge::TaskStatus::succeeded;
  r.tasks = {t};
  r.faults = collect_faults({error_entry("net::ERR_FAILED", "a"), error_entry("net::ERR_FAILED", "a"),
                             error_entry("Uncaught TypeError: q", "b"), error_entry("blocked by CORS policy", "c"),
                             error_entry("odd", "d"), error_entry("odder", "d")});
  r.covered_functionalities = {"layout_render"};
  auto back = report_from_json(to_json(r));
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_EQ(back.faults, r.faults);

  auto text = render_report_text(r);
  EXPECT_NE(text.find("  network     1       2\n"), std::string::npos) << text;
  EXPECT_NE(text.find("  javascript  1       1\n"), std::string::npos);
  EXPECT_NE(text.find("  csp         1       1\n"), std::string::npos);
  EXPECT_NE(text.find("  other       2       2\n"), std::string::npos);
  EXPECT_NE(text.find("  total       5       6\n"), std::string::npos);
  EXPECT_NE(text.find("01:00   100/360         27.78%"), std::string::npos) << text;
}

TEST(PipelineTest, RlOnlyHasNoTasksAndNoAgentTraffic) {
  auto run = wpt::run_mode("rl_only", 7);
  EXPECT_TRUE(run.report.tasks.empty());
  EXPECT_TRUE(run.requests.empty());
  EXPECT_EQ(run.report.agent_requests, 0u);
  EXPECT_GT(run.report.graph_timeline.back().states, 1u);
  EXPECT_EQ(run.report.exploration_ms, 60 * kMinuteMs);
  EXPECT_TRUE(run.kb_text.empty());
}

TEST(PipelineTest, FullModeReachesTheGatedForms) {
  auto full = wpt::run_mode("full", 7);
  auto rl = wpt::run_mode("rl_only", 7);
  for (const auto& f : wpt::gated_functionalities()) {
    EXPECT_TRUE(wpt::covers(full.report, f)) << f;
    EXPECT_FALSE(wpt::covers(rl.report, f)) << f;
  }
  EXPECT_GT(full.covered_lines, rl.covered_lines);
  ASSERT_EQ(full.report.tasks.size(), 3u);
  for (const auto& t : full.report.tasks) EXPECT_EQ(t.status, knowledge::TaskStatus::succeeded) << t.description;
  EXPECT_LE(full.report.elapsed_ms, 60 * kMinuteMs);
  auto first_reviser = std::find_if(full.requests.begin(), full.requests.end(),
                                    [](const auto& r) { return r.role == agents::Role::reviser; });
  ASSERT_NE(first_reviser, full.requests.end());
  auto prompt = agents::request_text(*first_reviser);
  EXPECT_NE(prompt.find("File Name: /mini-erp/src/reports.js, Coverage: "), std::string::npos);
  EXPECT_EQ(prompt.find("File Name: /mini-erp/src/reports.js, Coverage: 100.00%"), std::string::npos);
}

TEST(PipelineTest, AblationsStayWithinTheirContracts) {
  auto full = wpt::run_mode("full", 3);
  auto no_stg = wpt::run_mode("no_stg", 3);
  auto no_cr = wpt::run_mode("no_cr", 3);
  std::size_t planner_requests = 0;
  for (const auto& r : no_stg.requests) {
    if (r.role != agents::Role::planner) continue;
    ++planner_requests;
    EXPECT_EQ(agents::request_text(r).find("Key path"), std::string::npos);
  }
  EXPECT_GT(planner_requests, 0u);
  EXPECT_EQ(no_stg.requests.end(), std::find_if(no_stg.requests.begin(), no_stg.requests.end(),
                                                [](const auto& r) { return r.role == agents::Role::navigator; }));
  EXPECT_EQ(no_cr.kb_text.find("File Name:"), std::string::npos);
  EXPECT_FALSE(no_cr.kb_text.empty());
  EXPECT_LE(no_stg.covered_lines, full.covered_lines);
  EXPECT_LE(no_cr.covered_lines, full.covered_lines);
}

TEST(PipelineTest, LlmOnlySkipsExploration) {
  auto run = wpt::run_mode("llm_only", 7);
  EXPECT_EQ(run.report.exploration_actions, 0);
  EXPECT_EQ(run.report.exploration_ms, 0);
  EXPECT_NE(run.kb_text.find("State 0: "), std::string::npos);
}

TEST(PipelineTest, RunDirectoryAndOfflineKnowledgeBase) {
  wpt::TempDir dir;
  auto run = wpt::run_mode("full", 5, dir.path());
  for (const auto* f : {"report.json", "report.txt", "kb.txt", "kb.json", "graph/graph.json", "trace/trace.jsonl",
                        "coverage.lcov", "pages/0.html"})
    EXPECT_TRUE(std::filesystem::exists(dir.path() / f)) << f;
  auto stored = files::read_text(dir.path() / "kb.txt");
  EXPECT_EQ(stored, run.kb_text);
  EXPECT_EQ(build_kb(dir.path(), nullptr, true), stored);
  auto without = build_kb(dir.path(), nullptr, false);
  EXPECT_EQ(without.find("File Name:"), std::string::npos);
  EXPECT_EQ(report_from_json(json::parse(files::read_text(dir.path() / "report.json"))).tasks.size(),
            run.report.tasks.size());

  wpt::TempDir empty;
  EXPECT_EQ(code_of([&] { build_kb(empty.path(), nullptr, true); }), ErrorCode::missing_artifacts);
}

TEST(PipelineTest, SameSeedSameArtifacts) {
  wpt::TempDir a, b;
  wpt::run_mode("full", 7, a.path());
  wpt::run_mode("full", 7, b.path());
  for (const auto* f : {"report.json", "kb.txt", "graph/graph.json", "trace/trace.jsonl"})
    EXPECT_EQ(files::read_text(a.path() / f), files::read_text(b.path() / f)) << f;
}

TEST(PipelineTest, NoisyConsoleFaultsReachTheReport) {
  auto cfg = load_config(wpt::fixture("noisy-console", "config.json"));
  Pipeline p(cfg, make_parts(cfg));
  auto report = p.run();
  std::size_t total = 0;
  for (const auto& f : report.faults) total += static_cast<std::size_t>(f.occurrences);
  EXPECT_EQ(total, report.console_errors);
  std::set<FaultCategory> seen;
  for (const auto& f : report.faults) seen.insert(f.category);
  EXPECT_EQ(seen.size(), 4u);
}
