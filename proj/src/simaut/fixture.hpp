#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "env/types.hpp"

namespace webprobe::simaut {

/// Values of the form controls on the current page, keyed by element id.
using FormState = std::map<std::string, std::string>;

struct Condition {
  std::string field;
  bool non_empty = false;
  std::optional<std::string> equals;
  std::optional<double> min;
  std::optional<double> max;
  std::optional<std::string> matches;  // ECMAScript regex, whole-value match
  std::vector<std::string> one_of;

  bool holds(const FormState& form) const;
};

/// Conjunction of conditions over form-field values.
struct Guard {
  std::vector<Condition> all;

  bool satisfied(const FormState& form) const;
};

struct ConsoleTemplate {
  env::ConsoleLevel level = env::ConsoleLevel::info;
  std::string message;
  std::string source;  // empty means the current page URL
};

struct Page {
  std::string id;
  std::string path;
  std::string title;
  bool requires_login = true;
  std::string html;  // template; "{{tick}}" is substituted at render time
  std::vector<std::string> covers;
  std::vector<ConsoleTemplate> console;
};

enum class SessionEffect { none, login, logout };

struct Transition {
  std::string from;  // page id, or "*" for any page containing the element
  std::string element;
  env::ActionKind kind = env::ActionKind::click;
  std::optional<Guard> guard;
  std::string to;
  std::vector<std::string> covers;
  std::vector<std::string> fail_covers;
  std::string fail_message;
  SessionEffect effect = SessionEffect::none;
  std::vector<ConsoleTemplate> console;
};

struct LineRange {
  std::string file;
  int first = 1;
  int last = 1;
};

struct FixtureApp {
  std::string name;
  std::string base_url;
  std::string home_page;
  std::string login_page;
  std::map<std::string, Page> pages;
  std::vector<Transition> transitions;
  std::map<std::string, int> files;  // path -> line count
  std::map<std::string, LineRange> functionalities;
  std::vector<std::string> always_on;

  const Page& page(const std::string& id) const;
  const Page* page_by_path(const std::string& path) const;
  std::string url_of(const Page& page) const { return base_url + page.path; }
};

/// Throws Error{malformed_definition} or Error{dangling_transition}.
FixtureApp parse_fixture(const nlohmann::json& definition);
FixtureApp load_fixture(const std::filesystem::path& path);

struct SimAction {
  env::ActionKind kind = env::ActionKind::click;
  std::string element_id;
  std::string value;
};

struct ApplyResult {
  std::string next_page;
  bool reloaded = false;  // a transition fired and the next page was (re)rendered
  FormState form;
  std::vector<env::ConsoleEntry> console;
  std::vector<std::string> covered;  // functionality ids
  SessionEffect effect = SessionEffect::none;
};

/// The fixture's pure transition function.
ApplyResult apply(const FixtureApp& app, const std::string& page, const SimAction& action,
                  const FormState& form);

/// Render-time effects of landing on a page (its covers and console entries).
void enter_page(const FixtureApp& app, const std::string& page, ApplyResult& result);

/// Serialized page markup with form values and the tick counter filled in.
std::string render(const FixtureApp& app, const std::string& page, const FormState& form,
                   std::int64_t tick);

/// Per-file line hit counters driven by functionality hits. Counters never
/// decrease; lines outside declared functionality ranges are never hit.
class SyntheticCoverage {
 public:
  explicit SyntheticCoverage(const FixtureApp& app);

  void hit(const std::string& functionality);
  std::string lcov() const;
  int covered_lines() const;
  int total_lines() const;
  bool is_covered(const std::string& functionality) const;

 private:
  const FixtureApp* app_;
  std::map<std::string, std::vector<std::uint32_t>> hits_;
};

}  // namespace webprobe::simaut
