#include "simaut/fixture.hpp"

#include <regex>
#include <set>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"
#include "html/dom.hpp"

namespace webprobe::simaut {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorCode::malformed_definition, "fixture: " + what);
}

[[noreturn]] void dangling(const std::string& what) {
  throw Error(ErrorCode::dangling_transition, "fixture: " + what);
}

std::optional<double> as_number(const std::string& s) {
  auto t = text::trim(s);
  if (t.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

std::vector<ConsoleTemplate> parse_console(const json& j) {
  std::vector<ConsoleTemplate> out;
  if (!j.is_array()) return out;
  for (const auto& e : j) {
    ConsoleTemplate t;
    t.level = env::parse_console_level(e.value("level", "info"));
    t.message = e.value("message", "");
    t.source = e.value("source", "");
    if (t.message.empty()) malformed("console entry without message");
    out.push_back(std::move(t));
  }
  return out;
}

Guard parse_guard(const json& j) {
  Guard g;
  for (const auto& c : j) {
    Condition cond;
    cond.field = c.at("field").get<std::string>();
    cond.non_empty = c.value("non_empty", false);
    if (c.contains("equals")) cond.equals = c["equals"].get<std::string>();
    if (c.contains("min")) cond.min = c["min"].get<double>();
    if (c.contains("max")) cond.max = c["max"].get<double>();
    if (c.contains("matches")) cond.matches = c["matches"].get<std::string>();
    if (c.contains("one_of")) cond.one_of = c["one_of"].get<std::vector<std::string>>();
    g.all.push_back(std::move(cond));
  }
  return g;
}

SessionEffect parse_effect(const std::string& s) {
  if (s.empty() || s == "none") return SessionEffect::none;
  if (s == "login") return SessionEffect::login;
  if (s == "logout") return SessionEffect::logout;
  malformed("unknown effect '" + s + "'");
}

std::vector<env::ConsoleEntry> instantiate(const FixtureApp& app, const Page& page,
                                           const std::vector<ConsoleTemplate>& templates) {
  std::vector<env::ConsoleEntry> out;
  for (const auto& t : templates)
    out.push_back({t.level, t.message, t.source.empty() ? app.url_of(page) : t.source, 0});
  return out;
}

const Transition* find_transition(const FixtureApp& app, const std::string& page,
                                  const std::string& element, env::ActionKind kind) {
  const Transition* wildcard = nullptr;
  for (const auto& t : app.transitions) {
    if (t.element != element || t.kind != kind) continue;
    if (t.from == page) return &t;
    if (t.from == "*" && !wildcard) wildcard = &t;
  }
  return wildcard;
}

bool is_form_control(const html::Node& n) {
  return n.tag() == "input" || n.tag() == "select" || n.tag() == "textarea";
}

}  // namespace

bool Condition::holds(const FormState& form) const {
  auto it = form.find(field);
  std::string value = it == form.end() ? std::string() : it->second;
  if (non_empty && text::trim(value).empty()) return false;
  if (equals && value != *equals) return false;
  if (min || max) {
    auto v = as_number(value);
    if (!v) return false;
    if (min && *v < *min) return false;
    if (max && *v > *max) return false;
  }
  if (matches && !std::regex_match(value, std::regex(*matches))) return false;
  if (!one_of.empty() && std::find(one_of.begin(), one_of.end(), value) == one_of.end()) return false;
  return true;
}

bool Guard::satisfied(const FormState& form) const {
  for (const auto& c : all)
    if (!c.holds(form)) return false;
  return true;
}

const Page& FixtureApp::page(const std::string& id) const {
  auto it = pages.find(id);
  if (it == pages.end()) throw Error(ErrorCode::not_found, "fixture page '" + id + "' not found");
  return it->second;
}

const Page* FixtureApp::page_by_path(const std::string& path) const {
  for (const auto& [id, p] : pages)
    if (p.path == path) return &p;
  return nullptr;
}

FixtureApp parse_fixture(const json& def) {
  if (!def.is_object()) malformed("definition must be an object");
  FixtureApp app;
  try {
    app.name = def.value("name", "fixture");
    app.base_url = def.at("base_url").get<std::string>();
    app.home_page = def.at("home").get<std::string>();
    app.login_page = def.value("login_page", "");

    std::map<std::string, std::string> layouts;
    if (def.contains("layouts"))
      for (const auto& [k, v] : def["layouts"].items()) layouts[k] = v.get<std::string>();

    if (!def.contains("pages") || !def["pages"].is_object() || def["pages"].empty())
      malformed("pages map is empty");
    std::set<std::string> paths;
    for (const auto& [id, p] : def["pages"].items()) {
      Page page;
      page.id = id;
      page.path = p.at("path").get<std::string>();
      page.title = p.value("title", id);
      page.requires_login = p.value("requires_login", true);
      if (p.contains("html")) {
        page.html = p["html"].get<std::string>();
      } else {
        auto layout = p.value("layout", "");
        auto lit = layouts.find(layout);
        if (lit == layouts.end()) malformed("page '" + id + "' uses unknown layout '" + layout + "'");
        page.html = text::replace_all(lit->second, "{{content}}", p.value("content", ""));
      }
      page.html = text::replace_all(page.html, "{{title}}", page.title);
      if (p.contains("covers")) page.covers = p["covers"].get<std::vector<std::string>>();
      if (p.contains("console")) page.console = parse_console(p["console"]);
      if (!paths.insert(page.path).second) malformed("duplicate page path " + page.path);
      app.pages.emplace(id, std::move(page));
    }

    if (def.contains("files"))
      for (const auto& [path, n] : def["files"].items()) app.files[path] = n.get<int>();
    if (def.contains("functionalities")) {
      for (const auto& [id, f] : def["functionalities"].items()) {
        LineRange r;
        r.file = f.at("file").get<std::string>();
        r.first = f.at("lines").at(0).get<int>();
        r.last = f.at("lines").at(1).get<int>();
        auto fit = app.files.find(r.file);
        if (fit == app.files.end()) malformed("functionality '" + id + "' names unknown file " + r.file);
        if (r.first < 1 || r.last < r.first || r.last > fit->second)
          malformed("functionality '" + id + "' line range outside file");
        app.functionalities[id] = r;
      }
    }
    if (def.contains("always_on")) app.always_on = def["always_on"].get<std::vector<std::string>>();

    if (def.contains("transitions")) {
      for (const auto& t : def["transitions"]) {
        Transition tr;
        tr.from = t.at("from").get<std::string>();
        tr.element = t.at("element").get<std::string>();
        tr.kind = env::parse_action_kind(t.value("action", "click"));
        tr.to = t.at("to").get<std::string>();
        if (t.contains("guard")) tr.guard = parse_guard(t["guard"]);
        if (t.contains("covers")) tr.covers = t["covers"].get<std::vector<std::string>>();
        if (t.contains("fail_covers")) tr.fail_covers = t["fail_covers"].get<std::vector<std::string>>();
        tr.fail_message = t.value("fail_message", "Validation failed: required fields are missing or invalid");
        tr.effect = parse_effect(t.value("effect", ""));
        if (t.contains("console")) tr.console = parse_console(t["console"]);
        app.transitions.push_back(std::move(tr));
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    malformed(e.what());
  }

  auto require_page = [&](const std::string& id, const std::string& role) {
    if (!app.pages.count(id)) dangling(role + " page '" + id + "' does not exist");
  };
  auto require_functionality = [&](const std::string& id) {
    if (!app.functionalities.count(id)) dangling("unknown functionality '" + id + "'");
  };
  require_page(app.home_page, "home");
  if (!app.login_page.empty()) require_page(app.login_page, "login");
  for (const auto& f : app.always_on) require_functionality(f);
  for (const auto& [id, p] : app.pages)
    for (const auto& f : p.covers) require_functionality(f);

  std::map<std::string, html::Document> docs;
  for (const auto& [id, p] : app.pages) docs.emplace(id, html::Document::parse(p.html));
  for (const auto& t : app.transitions) {
    require_page(t.to, "target");
    for (const auto& f : t.covers) require_functionality(f);
    for (const auto& f : t.fail_covers) require_functionality(f);
    if (t.from == "*") {
      bool anywhere = false;
      for (const auto& [id, d] : docs) anywhere = anywhere || d.find_by_id(t.element);
      if (!anywhere) dangling("element '" + t.element + "' exists on no page");
    } else {
      require_page(t.from, "source");
      if (!docs.at(t.from).find_by_id(t.element))
        dangling("element '" + t.element + "' missing from page '" + t.from + "'");
    }
  }
  return app;
}

FixtureApp load_fixture(const std::filesystem::path& path) {
  json def;
  try {
    def = json::parse(files::read_text(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_definition, path.string() + ": " + e.what());
  }
  return parse_fixture(def);
}

void enter_page(const FixtureApp& app, const std::string& page_id, ApplyResult& result) {
  const auto& page = app.page(page_id);
  result.covered.insert(result.covered.end(), page.covers.begin(), page.covers.end());
  auto entries = instantiate(app, page, page.console);
  result.console.insert(result.console.end(), entries.begin(), entries.end());
}

ApplyResult apply(const FixtureApp& app, const std::string& page_id, const SimAction& action,
                  const FormState& form) {
  const auto& page = app.page(page_id);
  ApplyResult r;
  r.next_page = page_id;
  r.form = form;

  auto doc = html::Document::parse(page.html);
  const auto* el = action.element_id.empty() ? nullptr : doc.find_by_id(action.element_id);
  if (!el) {
    r.console.push_back({env::ConsoleLevel::error, "element not interactable: " + action.element_id,
                         app.url_of(page), 0});
    return r;
  }

  if ((action.kind == env::ActionKind::input || action.kind == env::ActionKind::select) &&
      is_form_control(*el)) {
    r.form[action.element_id] = action.value;
  }

  const auto* t = find_transition(app, page_id, action.element_id, action.kind);
  if (!t) return r;

  if (t->guard && !t->guard->satisfied(r.form)) {
    r.console.push_back({env::ConsoleLevel::warning, t->fail_message, app.url_of(page), 0});
    r.covered = t->fail_covers;
    return r;
  }

  r.reloaded = true;
  r.next_page = t->to;
  r.form.clear();
  r.effect = t->effect;
  r.covered = t->covers;
  auto entries = instantiate(app, page, t->console);
  r.console.insert(r.console.end(), entries.begin(), entries.end());
  enter_page(app, t->to, r);
  return r;
}

std::string render(const FixtureApp& app, const std::string& page_id, const FormState& form,
                   std::int64_t tick) {
  const auto& page = app.page(page_id);
  auto doc = html::Document::parse(text::replace_all(page.html, "{{tick}}", std::to_string(tick)));
  for (const auto* el : doc.elements()) {
    if (el->tag() == "input") {
      const auto* type = el->attribute("type");
      if (type && (*type == "submit" || *type == "button")) continue;
      const auto* id = el->attribute("id");
      std::string value;
      if (id) {
        if (auto it = form.find(*id); it != form.end()) value = it->second;
      }
      doc.mutable_node(el)->set_attribute("value", value);
    } else if (el->tag() == "select") {
      const auto* id = el->attribute("id");
      auto it = id ? form.find(*id) : form.end();
      for (const auto* opt : el->element_children()) {
        if (opt->tag() != "option") continue;
        const auto* v = opt->attribute("value");
        std::string ov = v ? *v : html::text_content(*opt);
        auto* m = doc.mutable_node(opt);
        if (it != form.end() && ov == it->second) m->set_attribute("selected", "selected");
        else m->remove_attribute("selected");
      }
    }
  }
  return doc.serialize();
}

SyntheticCoverage::SyntheticCoverage(const FixtureApp& app) : app_(&app) {
  for (const auto& [path, n] : app.files) hits_[path].assign(static_cast<std::size_t>(n), 0);
  for (const auto& f : app.always_on) hit(f);
}

void SyntheticCoverage::hit(const std::string& functionality) {
  auto it = app_->functionalities.find(functionality);
  if (it == app_->functionalities.end()) return;
  auto& lines = hits_.at(it->second.file);
  for (int l = it->second.first; l <= it->second.last; ++l) ++lines[static_cast<std::size_t>(l - 1)];
}

bool SyntheticCoverage::is_covered(const std::string& functionality) const {
  auto it = app_->functionalities.find(functionality);
  if (it == app_->functionalities.end()) return false;
  const auto& lines = hits_.at(it->second.file);
  for (int l = it->second.first; l <= it->second.last; ++l)
    if (lines[static_cast<std::size_t>(l - 1)] == 0) return false;
  return true;
}

std::string SyntheticCoverage::lcov() const {
  std::string out;
  for (const auto& [path, lines] : hits_) {
    out += "TN:\nSF:" + path + "\n";
    int hit = 0;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      out += "DA:" + std::to_string(i + 1) + "," + std::to_string(lines[i]) + "\n";
      if (lines[i] > 0) ++hit;
    }
    out += "LF:" + std::to_string(lines.size()) + "\nLH:" + std::to_string(hit) + "\nend_of_record\n";
  }
  return out;
}

int SyntheticCoverage::covered_lines() const {
  int n = 0;
  for (const auto& [path, lines] : hits_)
    for (auto h : lines) n += h > 0;
  return n;
}

int SyntheticCoverage::total_lines() const {
  int n = 0;
  for (const auto& [path, lines] : hits_) n += static_cast<int>(lines.size());
  return n;
}

}  // namespace webprobe::simaut
