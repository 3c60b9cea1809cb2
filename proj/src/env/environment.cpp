#include "env/environment.hpp"

#include "common/error.hpp"
#include "html/dom.hpp"

namespace webprobe::env {
namespace {

void absorb_console(PageObservation& into, PageObservation& from) {
  for (auto& e : from.console) into.console.push_back(std::move(e));
  from.console.clear();
}

// Later observation wins, but console entries of every intermediate step
// are carried over.
PageObservation merge(PageObservation earlier, PageObservation later) {
  absorb_console(earlier, later);
  later.console = std::move(earlier.console);
  return later;
}

}  // namespace

void Environment::check_deadline() {
  if (deadline_ && clock().now_ms() >= *deadline_)
    throw Error(ErrorCode::budget_exhausted, "time budget exhausted");
}

PageObservation Environment::deliver(PageObservation obs) {
  if (!carried_console_.empty()) {
    obs.console.insert(obs.console.begin(), carried_console_.begin(), carried_console_.end());
    carried_console_.clear();
  }
  return obs;
}

PageObservation Environment::navigate(const std::string& url) {
  check_deadline();
  return deliver(do_navigate(url));
}

PageObservation Environment::perform(const GuiAction& action) {
  check_deadline();
  return deliver(do_perform(action));
}

PageObservation Environment::observe() { return deliver(do_observe()); }

std::string Environment::element_at(int, int) {
  throw Error(ErrorCode::not_found, "this backend cannot map coordinates to elements");
}

bool Environment::login_form_present(const std::string& html) const {
  if (!options_.login || options_.login->fields.empty()) return false;
  auto doc = html::Document::parse(html);
  for (const auto& [field, key] : options_.login->fields)
    if (!doc.find_by_id_or_name(field)) return false;
  return true;
}

PageObservation Environment::reset() {
  clear_session();
  auto obs = navigate(options_.home_url);
  if (login_form_present(obs.html)) {
    try {
      obs = merge(std::move(obs), run_login_script());
    } catch (...) {
      carry_console(obs);
      throw;
    }
  }
  return obs;
}

void Environment::carry_console(PageObservation& obs) {
  for (auto& e : obs.console) carried_console_.push_back(std::move(e));
  obs.console.clear();
}

PageObservation Environment::run_login_script() { return run_login_script(options_.credentials); }

PageObservation Environment::run_login_script(const std::vector<AppSpecificEntry>& credentials) {
  if (!options_.login) throw Error(ErrorCode::form_not_found, "no login form configured");
  const auto& login = *options_.login;

  auto obs = observe();
  auto doc = html::Document::parse(obs.html);
  std::vector<GuiAction> steps;
  auto fail = [&](ErrorCode code, const std::string& message) {
    carry_console(obs);
    throw Error(code, message);
  };
  for (const auto& [field, key] : login.fields) {
    const auto* node = doc.find_by_id_or_name(field);
    if (!node) fail(ErrorCode::form_not_found, "login field '" + field + "' not on page");
    auto value = lookup(credentials, key);
    if (!value) fail(ErrorCode::invalid_argument, "no app-specific entry for '" + key + "'");
    steps.push_back({ActionKind::input, *value, html::xpath_of(*node), ""});
  }
  const auto* submit = doc.find_by_id_or_name(login.submit);
  if (!submit) fail(ErrorCode::form_not_found, "login submit '" + login.submit + "' not on page");
  steps.push_back({ActionKind::click, std::nullopt, html::xpath_of(*submit), html::text_content(*submit)});

  try {
    for (const auto& step : steps) obs = merge(std::move(obs), perform(step));
  } catch (...) {
    carry_console(obs);
    throw;
  }
  if (login_form_present(obs.html)) {
    carry_console(obs);
    throw Error(ErrorCode::login_rejected, "login form still shown after submit");
  }
  return obs;
}

}  // namespace webprobe::env
