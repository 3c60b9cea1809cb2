#include "env/sim_environment.hpp"

#include "common/error.hpp"
#include "common/png.hpp"
#include "common/text.hpp"
#include "html/dom.hpp"

namespace webprobe::env {
namespace {

bool is_interactable(const html::Node& n) {
  const auto& t = n.tag();
  return t == "a" || t == "button" || t == "input" || t == "select" || t == "textarea" ||
         n.has_attribute("onclick") || n.has_attribute("role");
}

bool accepts_text(const html::Node& n) {
  if (n.tag() == "textarea") return true;
  if (n.tag() != "input") return false;
  const auto* type = n.attribute("type");
  return !type || (*type != "submit" && *type != "button" && *type != "checkbox" &&
                   *type != "radio" && *type != "hidden");
}

std::string strip_fragment(const std::string& url) {
  auto pos = url.find_first_of("?#");
  return pos == std::string::npos ? url : url.substr(0, pos);
}

// Placeholder screenshot: a small solid image whose colour is derived from
// the page markup's structural identity, annotated with the page title.
std::vector<std::uint8_t> placeholder_png(const simaut::FixtureApp& app, const std::string& page_id) {
  const auto& page = app.page(page_id);
  auto h = text::fnv1a64(page.html);
  png::Image img;
  img.width = 32;
  img.height = 20;
  img.rgb.resize(std::size_t{img.width} * img.height * 3);
  for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
    img.rgb[i] = static_cast<std::uint8_t>(h);
    img.rgb[i + 1] = static_cast<std::uint8_t>(h >> 8);
    img.rgb[i + 2] = static_cast<std::uint8_t>(h >> 16);
  }
  img.text["Title"] = page.title;
  img.text["Page"] = page.id;
  return png::encode(img);
}

}  // namespace

SimEnvironment::SimEnvironment(std::shared_ptr<const simaut::FixtureApp> app, SessionOptions session,
                               SimOptions options)
    : Environment(std::move(session)),
      app_(std::move(app)),
      sim_options_(options),
      coverage_(*app_),
      page_(app_->login_page.empty() ? app_->home_page : app_->login_page) {}

std::string SimEnvironment::home_url_of(const simaut::FixtureApp& app) {
  return app.url_of(app.page(app.home_page));
}

void SimEnvironment::clear_session() {
  logged_in_ = false;
  form_.clear();
  history_.clear();
  tick_ = 0;
}

void SimEnvironment::absorb(simaut::ApplyResult& result) {
  for (const auto& f : result.covered) coverage_.hit(f);
  for (auto& e : result.console) {
    e.captured_at = clock_.now_ms();
    console_buffer_.push_back(std::move(e));
  }
  result.console.clear();
}

void SimEnvironment::land(const std::string& page_id) {
  const auto& page = app_->page(page_id);
  std::string target = page_id;
  if (page.requires_login && !logged_in_ && !app_->login_page.empty()) target = app_->login_page;
  page_ = target;
  form_.clear();
  simaut::ApplyResult r;
  simaut::enter_page(*app_, target, r);
  absorb(r);
}

PageObservation SimEnvironment::do_navigate(const std::string& url) {
  clock_.charge(sim_options_.action_interval_ms);
  auto bare = strip_fragment(url);
  if (bare.rfind(app_->base_url, 0) != 0)
    throw Error(ErrorCode::navigation_timeout, "navigation to " + url + " timed out");
  auto path = bare.substr(app_->base_url.size());
  if (path.empty()) path = "/";
  const auto* page = app_->page_by_path(path);
  if (!page) throw Error(ErrorCode::navigation_timeout, "navigation to " + url + " timed out");
  if (!page_.empty()) history_.push_back(page_);
  ++tick_;
  land(page->id);
  return capture();
}

PageObservation SimEnvironment::do_perform(const GuiAction& action) {
  clock_.charge(sim_options_.action_interval_ms);
  ++tick_;
  if (action.kind == ActionKind::back) {
    if (!history_.empty()) {
      auto prev = history_.back();
      history_.pop_back();
      land(prev);
    }
    return capture();
  }

  auto doc = html::Document::parse(simaut::render(*app_, page_, form_, tick_));
  const auto* el = html::resolve_xpath(doc, action.target_xpath);
  if (!el) throw Error(ErrorCode::element_not_found, "no element at " + action.target_xpath);
  if (action.kind != ActionKind::scroll && action.kind != ActionKind::hover && !is_interactable(*el))
    throw Error(ErrorCode::not_interactable, action.target_xpath + " is not interactable");
  if (action.kind == ActionKind::input && !accepts_text(*el))
    throw Error(ErrorCode::not_interactable, action.target_xpath + " does not accept text");
  if (action.kind == ActionKind::select && el->tag() != "select")
    throw Error(ErrorCode::not_interactable, action.target_xpath + " is not a select");
  if (action.kind == ActionKind::scroll || action.kind == ActionKind::hover) return capture();

  const auto* id = el->attribute("id");
  if (!id) return capture();  // nothing in the fixture reacts to anonymous elements

  simaut::SimAction sim{action.kind, *id, action.value.value_or("")};
  auto result = simaut::apply(*app_, page_, sim, form_);
  if (result.effect == simaut::SessionEffect::login) logged_in_ = true;
  if (result.effect == simaut::SessionEffect::logout) logged_in_ = false;
  if (result.reloaded && result.next_page != page_) history_.push_back(page_);
  page_ = result.next_page;
  form_ = result.form;
  absorb(result);
  return capture();
}

PageObservation SimEnvironment::do_observe() { return capture(); }

PageObservation SimEnvironment::capture() {
  PageObservation obs;
  const auto& page = app_->page(page_);
  obs.url = app_->url_of(page);
  obs.html = simaut::render(*app_, page_, form_, tick_);
  obs.screenshot = placeholder_png(*app_, page_);
  obs.console = std::move(console_buffer_);
  console_buffer_.clear();
  obs.captured_at = clock_.now_ms();
  return obs;
}

}  // namespace webprobe::env
