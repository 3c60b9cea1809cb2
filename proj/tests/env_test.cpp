#include <gtest/gtest.h>

#include "common/error.hpp"
#include "common/png.hpp"
#include "env/sim_environment.hpp"
#include "env/webdriver_environment.hpp"
#include "explorer/state_abstraction.hpp"
#include "html/dom.hpp"
#include "stub_webdriver.hpp"
#include "support.hpp"

using namespace webprobe;
using env::ActionKind;
using env::GuiAction;

namespace {

std::string xpath_for(const std::string& html, const std::string& id) {
  auto doc = html::Document::parse(html);
  const auto* node = doc.find_by_id(id);
  if (!node) throw std::runtime_error("no element " + id);
  return html::xpath_of(*node);
}

GuiAction click(const env::PageObservation& obs, const std::string& id) {
  return {ActionKind::click, std::nullopt, xpath_for(obs.html, id), ""};
}

GuiAction type(const env::PageObservation& obs, const std::string& id, const std::string& v) {
  return {ActionKind::input, v, xpath_for(obs.html, id), ""};
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

TEST(SimEnvironmentTest, ProtectedPageRedirectsToLogin) {
  auto app = wpt::load_app("mini-erp");
  env::SimEnvironment env(app, wpt::mini_erp_session(*app));
  auto obs = env.navigate("http://mini-erp.local/projects");
  EXPECT_EQ(obs.url, "http://mini-erp.local/login");
  EXPECT_EQ(env.current_page(), "login");
}

TEST(SimEnvironmentTest, ClickingLoginWithCredentialsReachesHome) {
  auto app = wpt::load_app("mini-erp");
  env::SimEnvironment env(app, wpt::mini_erp_session(*app));
  auto obs = env.navigate("http://mini-erp.local/login");
  obs = env.perform(type(obs, "username", "secret@secret.com"));
  obs = env.perform(type(obs, "password", "secret"));
  obs = env.perform(click(obs, "login_btn"));
  EXPECT_EQ(obs.url, "http://mini-erp.local/home");
  EXPECT_TRUE(env.logged_in());
}

TEST(SimEnvironmentTest, AbsentElementIsNotFound) {
  auto env = wpt::sim("mini-erp");
  env->navigate("http://mini-erp.local/login");
  EXPECT_EQ(code_of([&] { env->perform({ActionKind::click, std::nullopt, "/html/body/div[99]", ""}); }),
            ErrorCode::element_not_found);
}

TEST(SimEnvironmentTest, UnknownUrlTimesOut) {
  auto env = wpt::sim("mini-erp");
  EXPECT_EQ(code_of([&] { env->navigate("http://elsewhere.local/"); }), ErrorCode::navigation_timeout);
  EXPECT_EQ(code_of([&] { env->navigate("http://mini-erp.local/nope"); }), ErrorCode::navigation_timeout);
}

TEST(SimEnvironmentTest, LoginScriptWithTableOneCredentials) {
  auto app = wpt::load_app("mini-erp");
  env::SimEnvironment env(app, wpt::mini_erp_session(*app));
  env.navigate("http://mini-erp.local/login");
  auto obs = env.run_login_script();
  EXPECT_EQ(obs.url, "http://mini-erp.local/home");
}

TEST(SimEnvironmentTest, WrongPasswordIsRejected) {
  auto app = wpt::load_app("mini-erp");
  env::SimEnvironment env(app, wpt::mini_erp_session(*app, "not-the-password"));
  env.navigate("http://mini-erp.local/login");
  EXPECT_EQ(code_of([&] { env.run_login_script(); }), ErrorCode::login_rejected);
  // The rejection warning is not lost.
  auto obs = env.observe();
  ASSERT_FALSE(obs.console.empty());
  EXPECT_EQ(obs.console.back().level, env::ConsoleLevel::warning);
}

TEST(SimEnvironmentTest, LoginWithoutConfiguredFormFails) {
  auto env = wpt::sim("blog");
  EXPECT_EQ(code_of([&] { env->run_login_script(); }), ErrorCode::form_not_found);
}

TEST(SimEnvironmentTest, ResetAfterDeepNavigationReturnsToHomeState) {
  auto app = wpt::load_app("mini-erp");
  env::SimEnvironment env(app, wpt::mini_erp_session(*app));
  stategraph::StateTransitionGraph graph;
  explorer::StateAbstractor abstractor(graph);
  auto home = abstractor.abstract(env.reset());
  auto obs = env.perform(click(env.observe(), "nav_departments"));
  obs = env.perform(click(obs, "new_department"));
  obs = env.perform(type(obs, "dept_name", "X"));
  EXPECT_NE(abstractor.abstract(obs).id, home.id);
  auto again = abstractor.abstract(env.reset());
  EXPECT_EQ(again.id, home.id);
  EXPECT_FALSE(again.is_new);
}

TEST(SimEnvironmentTest, IdenticalSequencesGiveIdenticalObservations) {
  auto run = [] {
    auto app = wpt::load_app("mini-erp");
    env::SimEnvironment env(app, wpt::mini_erp_session(*app));
    std::vector<env::PageObservation> out;
    out.push_back(env.reset());
    out.push_back(env.perform(click(out.back(), "nav_reports")));
    out.push_back(env.perform({ActionKind::select, std::string("Q3"), xpath_for(out.back().html, "report_period"), ""}));
    out.push_back(env.perform(click(out.back(), "report_run")));
    out.push_back(env.perform({ActionKind::back, std::nullopt, "", ""}));
    return out;
  };
  auto a = run();
  auto b = run();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].html, b[i].html);
    EXPECT_EQ(a[i].url, b[i].url);
    EXPECT_EQ(a[i].console, b[i].console);
    EXPECT_EQ(a[i].screenshot, b[i].screenshot);
  }
  EXPECT_NE(a[2].html.find("selected"), std::string::npos);
}

TEST(SimEnvironmentTest, ConsoleEntriesAreDeliveredOnce) {
  auto env = wpt::sim("noisy-console");
  auto obs = env->navigate("http://noisy.local/dashboard");
  EXPECT_EQ(obs.console.size(), 5u);
  EXPECT_TRUE(env->observe().console.empty());
}

TEST(SimEnvironmentTest, DeadlineStopsNewOperations) {
  auto env = wpt::sim("blog");
  env->reset();
  env->set_deadline(env->clock().now_ms());
  EXPECT_EQ(code_of([&] { env->navigate("http://blog.local/about"); }), ErrorCode::budget_exhausted);
  EXPECT_EQ(code_of([&] { env->perform({ActionKind::back, std::nullopt, "", ""}); }), ErrorCode::budget_exhausted);
  env->set_deadline(std::nullopt);
  EXPECT_NO_THROW(env->navigate("http://blog.local/about"));
}

TEST(SimEnvironmentTest, EachOperationChargesTheActionInterval) {
  auto app = wpt::load_app("blog");
  env::SessionOptions s;
  s.home_url = env::SimEnvironment::home_url_of(*app);
  env::SimEnvironment env(app, s, env::SimOptions{1500});
  auto t0 = env.clock().now_ms();
  auto obs = env.navigate(s.home_url);
  env.perform(click(obs, "nav_about"));
  EXPECT_EQ(env.clock().now_ms() - t0, 3000);
}

TEST(SimEnvironmentTest, PlaceholderScreenshotNamesThePage) {
  auto env = wpt::sim("blog");
  auto obs = env->reset();
  auto img = png::decode(obs.screenshot);
  EXPECT_EQ(img.text.at("Page"), "home");
}

TEST(SimEnvironmentTest, InteractingWithTextIsRejected) {
  auto env = wpt::sim("blog");
  auto obs = env->reset();
  auto doc = html::Document::parse(obs.html);
  const html::Node* heading = nullptr;
  for (const auto* el : doc.elements())
    if (el->tag() == "h1") heading = el;
  ASSERT_NE(heading, nullptr);
  EXPECT_EQ(code_of([&] { env->perform({ActionKind::click, std::nullopt, html::xpath_of(*heading), ""}); }),
            ErrorCode::not_interactable);
}

TEST(WebDriverEnvironmentTest, ErrorMapping) {
  EXPECT_EQ(env::webdriver_error("no such element", "").code(), ErrorCode::element_not_found);
  EXPECT_EQ(env::webdriver_error("element click intercepted", "").code(), ErrorCode::not_interactable);
  EXPECT_EQ(env::webdriver_error("invalid session id", "").code(), ErrorCode::session_closed);
  EXPECT_EQ(env::webdriver_error("timeout", "").code(), ErrorCode::navigation_timeout);
  EXPECT_EQ(env::webdriver_error("unknown error", "net::ERR_NAME_NOT_RESOLVED").code(), ErrorCode::navigation_timeout);
}

TEST(WebDriverEnvironmentTest, PacesActionsOnTheSessionClock) {
  auto clock = std::make_shared<VirtualClock>();
  auto log = std::make_shared<std::vector<wpt::StubTransport::Call>>();
  env::SessionOptions s;
  s.home_url = "http://stub.local/";
  env::WebDriverEnvironment env(std::make_unique<wpt::StubTransport>(log, clock.get()), s, {}, clock);
  env.navigate(s.home_url);
  for (int i = 0; i < 3; ++i) env.perform({ActionKind::click, std::nullopt, "/html/body/a[1]", "Go"});
  env.perform({ActionKind::input, std::string("x"), "/html/body/input[1]", ""});
  auto times = wpt::action_dispatch_times(*log);
  ASSERT_EQ(times.size(), 4u);
  for (std::size_t i = 1; i < times.size(); ++i) EXPECT_EQ(times[i] - times[i - 1], 2000);
}

TEST(WebDriverEnvironmentTest, ConsoleHookEntriesReachTheObservation) {
  auto clock = std::make_shared<VirtualClock>();
  auto log = std::make_shared<std::vector<wpt::StubTransport::Call>>();
  auto transport = std::make_unique<wpt::StubTransport>(log, clock.get());
  auto* stub = transport.get();
  env::SessionOptions s;
  s.home_url = "http://stub.local/";
  env::WebDriverEnvironment env(std::move(transport), s, {}, clock);
  stub->pending_console = nlohmann::json::array(
      {{{"level", "error"}, {"message", "Uncaught TypeError: x is undefined"}, {"source", "http://stub.local/app.js"}}});
  auto obs = env.navigate(s.home_url);
  ASSERT_EQ(obs.console.size(), 1u);
  EXPECT_EQ(obs.console[0].level, env::ConsoleLevel::error);
  EXPECT_EQ(obs.console[0].source_url, "http://stub.local/app.js");
  EXPECT_EQ(env.session_id(), "stub-session");
  EXPECT_TRUE(png::is_png(obs.screenshot));
}
