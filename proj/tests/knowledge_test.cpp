#include <gtest/gtest.h>

#include <random>

#include "common/error.hpp"
#include "knowledge/knowledge.hpp"
#include "oracles.hpp"
#include "properties.hpp"

using namespace webprobe;
using namespace webprobe::knowledge;

namespace {

stategraph::TransitionEdge login_edge() {
  stategraph::TransitionEdge e;
  e.src = 0;
  e.dst = 9;
  e.action = {env::ActionKind::click, std::nullopt, "/html/body/div[2]/div[1]/div[1]/div[1]/div[3]/p[1]/a[1]", "Login"};
  return e;
}

KnowledgeBase small_kb() {
  KnowledgeBase kb;
  kb.descriptions = {{0, "The login page."}, {9, "The dashboard."}};
  kb.transitions = {login_edge()};
  kb.coverage = {make_coverage_entry("/gadael/schema/Right.js", 23, 153)};
  kb.app_specific = {{"Current application", "Gadael"}, {"Username", "secret@secret.com"}, {"Password", "secret"}};
  return kb;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(KnowledgeFormatTest, TransitionLine) {
  EXPECT_EQ(render_transition(login_edge()),
            "Start from State 0; Performed action: click; Action value: ; Performed on element with XPath: "
            "/html/body/div[2]/div[1]/div[1]/div[1]/div[3]/p[1]/a[1], and with text: \"Login\"; Lead to State 9");
}

TEST(KnowledgeFormatTest, InputTransitionCarriesItsValue) {
  stategraph::TransitionEdge e;
  e.src = 3;
  e.dst = 4;
  e.action = {env::ActionKind::input, std::string("APL"), "/html/body/form[1]/input[2]", ""};
  EXPECT_EQ(render_transition(e),
            "Start from State 3; Performed action: input; Action value: APL; Performed on element with XPath: "
            "/html/body/form[1]/input[2], and with text: \"\"; Lead to State 4");
}

TEST(KnowledgeFormatTest, CoverageLine) {
  auto e = make_coverage_entry("/gadael/schema/Right.js", 23, 153);
  EXPECT_EQ(e.percent_hundredths, 1503);
  EXPECT_EQ(render_coverage_line(e), "File Name: /gadael/schema/Right.js, Coverage: 15.03%");
}

TEST(KnowledgeFormatTest, AppSpecificLine) {
  EXPECT_EQ(render_app_specific(small_kb().app_specific),
            "Current application: Gadael; Username: secret@secret.com; Password: secret");
}

TEST(KnowledgeFormatTest, PercentFormatting) {
  EXPECT_EQ(format_percent(0), "0.00");
  EXPECT_EQ(format_percent(5), "0.05");
  EXPECT_EQ(format_percent(1503), "15.03");
  EXPECT_EQ(format_percent(10000), "100.00");
  EXPECT_EQ(make_coverage_entry("a", 1, 3).percent_hundredths, 3333);
  EXPECT_EQ(make_coverage_entry("a", 2, 3).percent_hundredths, 6667);
  // 1/8 = 12.5% exactly; 1/1600 = 0.0625% rounds half up to 0.06.
  EXPECT_EQ(make_coverage_entry("a", 1, 8).percent_hundredths, 1250);
  EXPECT_EQ(make_coverage_entry("a", 1, 1600).percent_hundredths, 6);
  EXPECT_EQ(make_coverage_entry("a", 1, 400).percent_hundredths, 25);
  EXPECT_EQ(make_coverage_entry("a", 1, 80000).percent_hundredths, 0);
  EXPECT_EQ(make_coverage_entry("a", 1, 20000).percent_hundredths, 1);
}

TEST(KnowledgeFormatTest, PercentMatchesFloatingOracle) {
  for (long long t = 1; t <= 400; ++t)
    for (long long c = 0; c <= t; ++c)
      ASSERT_EQ(make_coverage_entry("f", c, t).percent_hundredths, wpt::oracle_hundredths(c, t)) << c << "/" << t;
}

TEST(KnowledgeFormatTest, RenderLayout) {
  EXPECT_EQ(render(small_kb()),
            "Descriptions:\n"
            "State 0: The login page.\n"
            "State 9: The dashboard.\n"
            "\nTransitions:\n" +
                render_transition(login_edge()) +
                "\n"
                "\nCoverage:\n"
                "File Name: /gadael/schema/Right.js, Coverage: 15.03%\n"
                "\nApp-Specific:\n"
                "Current application: Gadael; Username: secret@secret.com; Password: secret\n");
}

TEST(KnowledgeFormatTest, DisabledCoverageDropsTheSection) {
  auto kb = small_kb();
  kb.coverage_enabled = false;
  auto text = render(kb);
  EXPECT_EQ(text.find("Coverage"), std::string::npos);
  EXPECT_EQ(text.find("File Name:"), std::string::npos);
  EXPECT_NE(text.find("App-Specific:"), std::string::npos);
  EXPECT_EQ(render_graph_sections(kb).find("App-Specific"), std::string::npos);
}

TEST(KnowledgeFormatTest, MissingDescriptionIsAnError) {
  auto kb = small_kb();
  kb.descriptions.erase(9);
  EXPECT_EQ(code_of([&] { render(kb); }), ErrorCode::missing_description);
}

TEST(CoverageIngestTest, Lcov) {
  auto entries = ingest_coverage(
      "TN:\nSF:/gadael/schema/Right.js\nDA:1,1\nDA:2,0\nLF:153\nLH:23\nend_of_record\n"
      "SF:/app/empty.js\nLF:0\nLH:0\nend_of_record\n"
      "SF:/app/b.js\nDA:1,4\nDA:2,0\nDA:3,0\nDA:4,1,abc\nend_of_record\n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[0], make_coverage_entry("/gadael/schema/Right.js", 23, 153));
  EXPECT_EQ(entries[1].file, "/app/b.js");
  EXPECT_EQ(entries[1].covered_lines, 2);
  EXPECT_EQ(entries[1].total_lines, 4);
  EXPECT_EQ(entries[1].percent_hundredths, 5000);
}

TEST(CoverageIngestTest, JsonSummary) {
  auto entries = ingest_coverage(R"({"total": {"lines": {"total": 9, "covered": 1}},
    "/a.js": {"lines": {"total": 153, "covered": 23}},
    "/none.js": {"lines": {"total": 0, "covered": 0}}})");
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(render_coverage_line(entries[0]), "File Name: /a.js, Coverage: 15.03%");
}

TEST(CoverageIngestTest, MalformedReports) {
  EXPECT_EQ(code_of([] { ingest_coverage("SF:/a.js\nDA:x,1\n"); }), ErrorCode::malformed_report);
  EXPECT_EQ(code_of([] { ingest_coverage("SF:/a.js\nLF:2\nLH:3\n"); }), ErrorCode::malformed_report);
  EXPECT_EQ(code_of([] { ingest_coverage("{ nope"); }), ErrorCode::malformed_report);
  EXPECT_EQ(code_of([] { ingest_coverage(R"({"/a.js": {"lines": {"total": 2, "covered": 3}}})"); }),
            ErrorCode::malformed_report);
  EXPECT_EQ(code_of([] { ingest_coverage(R"({"/a.js": 4})"); }), ErrorCode::malformed_report);
  EXPECT_TRUE(ingest_coverage("").empty());
}

TEST(CoverageSelectionTest, LowestFirstWithPathTiebreak) {
  std::vector<CoverageEntry> v{make_coverage_entry("/z.js", 1, 2), make_coverage_entry("/b.js", 0, 5),
                               make_coverage_entry("/a.js", 1, 2), make_coverage_entry("/c.js", 9, 10)};
  auto got = select_low_coverage(v, 3);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].file, "/b.js");
  EXPECT_EQ(got[1].file, "/a.js");
  EXPECT_EQ(got[2].file, "/z.js");
  EXPECT_TRUE(select_low_coverage({}, 50).empty());
  EXPECT_EQ(select_low_coverage(v).size(), 4u);
}

TEST(CoverageSelectionTest, RandomInstancesMatchSortOracle) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) EXPECT_EQ(wpt::check_selection_instance(seed), "");
}

TEST(KnowledgeUpdateTest, DescribeMissingFallsBackToPlaceholder) {
  stategraph::StateTransitionGraph g;
  for (int i = 0; i < 3; ++i) g.add_state({});
  KnowledgeBase kb;
  kb.descriptions[0] = "Known.";
  auto described = describe_missing(kb, g, [](StateId id) -> std::string {
    if (id == 2) throw Error(ErrorCode::backend_unavailable, "down");
    return "  Page " + std::to_string(id) + ".\n";
  });
  EXPECT_EQ(described, (std::vector<StateId>{1, 2}));
  EXPECT_EQ(kb.descriptions.at(0), "Known.");
  EXPECT_EQ(kb.descriptions.at(1), "Page 1.");
  EXPECT_EQ(kb.descriptions.at(2), placeholder_description(2));
}

TEST(KnowledgeUpdateTest, ExecutionFeedbackRefreshesEverything) {
  stategraph::StateTransitionGraph g;
  for (int i = 0; i < 2; ++i) g.add_state({});
  g.record_transition(0, login_edge().action, 1, 1);
  KnowledgeBase kb;
  kb.tasks = {{1, "Do a thing.", TaskStatus::pending, 1}, {2, "Other.", TaskStatus::pending, 1}};
  describe_missing(kb, g, [](StateId) { return std::string("x"); });
  kb.transitions = g.list_transitions(0);
  g.add_state({});
  g.record_transition(1, login_edge().action, 2, 2);

  ExecutionFeedback fb;
  fb.task_id = 2;
  fb.status = TaskStatus::succeeded;
  std::vector<CoverageEntry> cov;
  for (int i = 0; i < 60; ++i) cov.push_back(make_coverage_entry("/f" + std::to_string(100 + i) + ".js", i % 7, 10));
  fb.refreshed_coverage = cov;
  update_from_execution(kb, g, [](StateId) { return std::string("y"); }, fb);

  EXPECT_EQ(kb.descriptions.at(0), "x");
  EXPECT_EQ(kb.descriptions.at(1), "x");
  EXPECT_EQ(kb.descriptions.at(2), "y");
  EXPECT_EQ(kb.transitions.size(), 2u);
  EXPECT_EQ(kb.tasks[0].status, TaskStatus::pending);
  EXPECT_EQ(kb.tasks[1].status, TaskStatus::succeeded);
  EXPECT_EQ(kb.coverage, wpt::oracle_select(cov, 50));
}

TEST(KnowledgeJsonTest, RoundTrip) {
  auto kb = small_kb();
  kb.tasks = {{1, "Create a project.", TaskStatus::failed, 2}};
  kb.coverage_enabled = false;
  auto back = kb_from_json(to_json(kb));
  EXPECT_EQ(render(back), render(kb));
  EXPECT_EQ(back.tasks, kb.tasks);
  EXPECT_EQ(back.coverage, kb.coverage);
  EXPECT_EQ(to_json(back), to_json(kb));
  EXPECT_EQ(code_of([] { kb_from_json(nlohmann::json::object()); }), ErrorCode::malformed_definition);
}

TEST(KnowledgeFormatTest, PlaceholderLineIsNotDoubled) {
  KnowledgeBase kb;
  kb.descriptions = {{0, "Home."}, {4, placeholder_description(4)}};
  EXPECT_EQ(render_graph_sections(kb), "Descriptions:\nState 0: Home.\nState 4: description unavailable\n\nTransitions:\n");
}
