// Acceptance gate: runs every criterion at its stated bound and prints one
// PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "common/files.hpp"
#include "env/webdriver_environment.hpp"
#include "golden_requests.hpp"
#include "knowledge/knowledge.hpp"
#include "oracles.hpp"
#include "properties.hpp"
#include "scenarios.hpp"
#include "stub_webdriver.hpp"
#include "support.hpp"

using namespace webprobe;

namespace {

struct Criterion {
  int number;
  const char* name;
  double limit_s;
  std::function<std::string()> check;
};

std::string table_one() {
  stategraph::TransitionEdge edge;
  edge.src = 0;
  edge.dst = 9;
  edge.action = {env::ActionKind::click, std::nullopt, "/html/body/div[2]/div[1]/div[1]/div[1]/div[3]/p[1]/a[1]",
                 "Login"};
  knowledge::KnowledgeBase kb;
  kb.descriptions = {{0, "Login page."}, {9, "Dashboard."}};
  kb.transitions = {edge};
  kb.coverage = {knowledge::make_coverage_entry("/gadael/schema/Right.js", 23, 153)};
  kb.app_specific = {{"Current application", "Gadael"}, {"Username", "secret@secret.com"}, {"Password", "secret"}};
  auto text = knowledge::render(kb);

  const std::vector<std::string> expected{
      "Start from State 0; Performed action: click; Action value: ; Performed on element with XPath: "
      "/html/body/div[2]/div[1]/div[1]/div[1]/div[3]/p[1]/a[1], and with text: \"Login\"; Lead to State 9",
      "File Name: /gadael/schema/Right.js, Coverage: 15.03%",
      "Current application: Gadael; Username: secret@secret.com; Password: secret",
  };
  if (knowledge::render_transition(edge) != expected[0]) return "transition line differs";
  if (knowledge::render_coverage_line(kb.coverage[0]) != expected[1]) return "coverage line differs";
  if (knowledge::render_app_specific(kb.app_specific) != expected[2]) return "app-specific line differs";
  for (const auto& line : expected)
    if (text.find("\n" + line + "\n") == std::string::npos) return "rendered KB lacks: " + line;
  return "";
}

std::string graph_suite() {
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    if (auto why = wpt::check_graph_instance(seed); !why.empty()) return why;
  return "";
}

std::string coverage_selection() {
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    if (auto why = wpt::check_selection_instance(seed); !why.empty()) return why;
  return "";
}

std::string rq2_direction() {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto full = wpt::run_mode("full", seed);
    auto rl = wpt::run_mode("rl_only", seed);
    auto tag = "seed " + std::to_string(seed) + ": ";
    if (full.covered_lines <= rl.covered_lines)
      return tag + "full " + std::to_string(full.covered_lines) + " lines vs rl_only " + std::to_string(rl.covered_lines);
    int rl_missing = 0;
    for (const auto& f : wpt::gated_functionalities()) {
      if (!wpt::covers(full.report, f)) return tag + f + " not covered in full mode";
      if (!wpt::covers(rl.report, f)) ++rl_missing;
    }
    if (rl_missing < 2) return tag + "rl_only covered too many gated functionalities";
  }
  return "";
}

std::string rq3_rq4_direction() {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    auto tag = "seed " + std::to_string(seed) + ": ";
    auto full = wpt::run_mode("full", seed);
    auto no_stg = wpt::run_mode("no_stg", seed);
    auto no_cr = wpt::run_mode("no_cr", seed);
    std::size_t planner = 0;
    for (const auto& r : no_stg.requests) {
      if (r.role != agents::Role::planner) continue;
      ++planner;
      if (agents::request_text(r).find("Key path") != std::string::npos) return tag + "no_stg prompt has a key path";
    }
    if (planner == 0) return tag + "no_stg issued no planner requests";
    if (no_cr.kb_text.empty()) return tag + "no_cr built no KB";
    if (no_cr.kb_text.find("File Name:") != std::string::npos) return tag + "no_cr KB has coverage lines";
    for (const auto& r : no_cr.requests)
      if (agents::request_text(r).find("File Name:") != std::string::npos) return tag + "no_cr prompt has coverage lines";
    if (no_stg.covered_lines > full.covered_lines) return tag + "no_stg exceeds full";
    if (no_cr.covered_lines > full.covered_lines) return tag + "no_cr exceeds full";
  }
  return "";
}

std::string determinism() {
  wpt::TempDir a, b;
  wpt::run_mode("full", 7, a.path());
  wpt::run_mode("full", 7, b.path());
  for (const auto* f : {"report.json", "kb.txt"}) {
    auto x = files::read_text(a.path() / f);
    if (x.empty()) return std::string(f) + " is empty";
    if (x != files::read_text(b.path() / f)) return std::string(f) + " differs";
  }
  return "";
}

std::string pacing() {
  auto clock = std::make_shared<SteadyClock>();
  auto log = std::make_shared<std::vector<wpt::StubTransport::Call>>();
  env::SessionOptions s;
  s.home_url = "http://stub.local/";
  env::WebDriverEnvironment driver(std::make_unique<wpt::StubTransport>(log, clock.get()), s, {}, clock);
  driver.navigate(s.home_url);
  for (int i = 0; i < 2; ++i) driver.perform({env::ActionKind::click, std::nullopt, "/html/body/a[1]", "Go"});
  driver.perform({env::ActionKind::input, std::string("abc"), "/html/body/input[1]", ""});
  driver.perform({env::ActionKind::click, std::nullopt, "/html/body/a[1]", "Go"});
  auto times = wpt::action_dispatch_times(*log);
  if (times.size() != 4) return "expected 4 dispatches, saw " + std::to_string(times.size());
  for (std::size_t i = 1; i < times.size(); ++i) {
    auto gap = times[i] - times[i - 1];
    if (gap < 2000 || gap > 2100) return "dispatch gap " + std::to_string(gap) + " ms";
  }
  return "";
}

std::string goldens() {
  for (const auto& c : wpt::golden_cases())
    if (auto why = wpt::check_golden(c); !why.empty()) return why;
  return wpt::check_planner_order(webprobe::agents::planner_request(wpt::golden_planner_input()));
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::off);
  const std::vector<Criterion> criteria{
      {1, "knowledge-base formats byte-exact", 1, table_one},
      {2, "graph semantics over 200 random traces", 10, graph_suite},
      {3, "low-coverage selection against sort oracle", 1, coverage_selection},
      {4, "full beats rl_only on mini-erp, 10 seeds", 60, rq2_direction},
      {5, "no_stg and no_cr ablations", 60, rq3_rq4_direction},
      {6, "noisy-console fault records", 1, [] { return wpt::check_noisy_console(); }},
      {7, "byte-identical reruns", 30, determinism},
      {8, "2000 ms action pacing over a stub driver", 15, pacing},
      {9, "agent request goldens and planner order", 1, goldens},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    std::string why;
    try {
      why = c.check();
    } catch (const std::exception& e) {
      why = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (why.empty() && secs >= c.limit_s) why = "took longer than " + std::to_string(static_cast<int>(c.limit_s)) + " s";
    std::printf("%s criterion %d: %s (%.2f s)%s%s\n", why.empty() ? "PASS" : "FAIL", c.number, c.name, secs,
                why.empty() ? "" : ": ", why.c_str());
    if (!why.empty()) ++failed;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
