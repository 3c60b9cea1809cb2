#include "env/webdriver_environment.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/text.hpp"

namespace webprobe::env {
namespace {

using nlohmann::json;

// XPath string literal for an arbitrary value.
std::string xpath_literal(const std::string& v) {
  if (v.find('\'') == std::string::npos) return "'" + v + "'";
  if (v.find('"') == std::string::npos) return "\"" + v + "\"";
  std::string out = "concat(";
  std::size_t start = 0;
  while (true) {
    auto q = v.find('\'', start);
    out += "'" + v.substr(start, q == std::string::npos ? std::string::npos : q - start) + "'";
    if (q == std::string::npos) break;
    out += ",\"'\",";
    start = q + 1;
  }
  return out + ")";
}

const char* kElementAtScript = R"JS(
var el = document.elementFromPoint(arguments[0], arguments[1]);
function interactable(n) {
  var t = n.tagName.toLowerCase();
  return t === 'a' || t === 'button' || t === 'input' || t === 'select' || t === 'textarea' ||
         n.hasAttribute('onclick') || n.hasAttribute('role');
}
var n = el;
while (n && n.nodeType === 1 && !interactable(n)) n = n.parentElement;
if (!n || n.nodeType !== 1) n = el;
if (!n) return null;
var steps = [];
for (; n && n.nodeType === 1; n = n.parentElement) {
  var tag = n.tagName.toLowerCase();
  if (tag === 'html' || tag === 'body') { steps.unshift(tag); continue; }
  var i = 1;
  for (var s = n.previousElementSibling; s; s = s.previousElementSibling)
    if (s.tagName.toLowerCase() === tag) i++;
  steps.unshift(tag + '[' + i + ']');
}
return '/' + steps.join('/');
)JS";

}  // namespace

Error webdriver_error(const std::string& error, const std::string& message) {
  if (error == "no such element" || error == "stale element reference")
    return Error(ErrorCode::element_not_found, message);
  if (error == "element not interactable" || error == "element click intercepted" ||
      error == "invalid element state")
    return Error(ErrorCode::not_interactable, message);
  if (error == "invalid session id" || error == "no such window" || error == "session not created")
    return Error(ErrorCode::session_closed, message);
  if (error == "timeout" || error == "script timeout" ||
      (error == "unknown error" && message.find("net::ERR") != std::string::npos))
    return Error(ErrorCode::navigation_timeout, message);
  return Error(ErrorCode::invalid_argument, error + ": " + message);
}

struct HttpWebDriverTransport::Impl {
  std::unique_ptr<httplib::Client> client;
  std::string prefix;
};

HttpWebDriverTransport::HttpWebDriverTransport(std::string base_url, std::int64_t timeout_ms)
    : impl_(std::make_unique<Impl>()) {
  auto scheme_end = base_url.find("://");
  auto path_start = base_url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string origin = path_start == std::string::npos ? base_url : base_url.substr(0, path_start);
  impl_->prefix = path_start == std::string::npos ? "" : base_url.substr(path_start);
  while (!impl_->prefix.empty() && impl_->prefix.back() == '/') impl_->prefix.pop_back();
  impl_->client = std::make_unique<httplib::Client>(origin);
  auto secs = static_cast<time_t>(timeout_ms / 1000);
  impl_->client->set_read_timeout(secs, 0);
  impl_->client->set_write_timeout(secs, 0);
  impl_->client->set_connection_timeout(5, 0);
}

HttpWebDriverTransport::~HttpWebDriverTransport() = default;

json HttpWebDriverTransport::send(std::string_view method, const std::string& path, const json& body) {
  auto full = impl_->prefix + path;
  httplib::Result res;
  if (method == "GET") {
    res = impl_->client->Get(full);
  } else if (method == "DELETE") {
    res = impl_->client->Delete(full);
  } else {
    res = impl_->client->Post(full, body.dump(), "application/json");
  }
  if (!res) {
    auto err = res.error();
    if (err == httplib::Error::Read || err == httplib::Error::Write)
      throw Error(ErrorCode::navigation_timeout, "webdriver request timed out: " + httplib::to_string(err));
    throw Error(ErrorCode::session_closed, "webdriver unreachable: " + httplib::to_string(err));
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::session_closed, "webdriver returned non-JSON body (HTTP " +
                                               std::to_string(res->status) + ")");
  }
  json value = reply.contains("value") ? reply["value"] : json();
  if (res->status >= 400 || (value.is_object() && value.contains("error"))) {
    throw webdriver_error(value.value("error", "unknown error"), value.value("message", ""));
  }
  return value;
}

const std::string& WebDriverEnvironment::console_hook_script() {
  static const std::string script = R"JS(
var w = window;
if (!w.__webprobeConsole) {
  w.__webprobeConsole = [];
  var push = function (level, message, source) {
    w.__webprobeConsole.push({level: level, message: String(message), source: source || location.href});
  };
  ['error', 'warn', 'info', 'log'].forEach(function (name) {
    var original = console[name];
    var level = name === 'warn' ? 'warning' : (name === 'log' ? 'info' : name);
    console[name] = function () {
      try { push(level, Array.prototype.map.call(arguments, String).join(' ')); } catch (e) {}
      return original.apply(console, arguments);
    };
  });
  w.addEventListener('error', function (e) {
    if (e.target && e.target !== w && (e.target.src || e.target.href)) {
      push('error', 'Failed to load resource: ' + (e.target.src || e.target.href), e.target.src || e.target.href);
    } else {
      push('error', 'Uncaught ' + (e.message || String(e)), e.filename);
    }
  }, true);
  w.addEventListener('unhandledrejection', function (e) {
    push('error', 'Uncaught (in promise) ' + String(e.reason));
  });
}
var drained = w.__webprobeConsole;
w.__webprobeConsole = [];
return drained;
)JS";
  return script;
}

WebDriverEnvironment::WebDriverEnvironment(std::unique_ptr<WebDriverTransport> transport,
                                           SessionOptions session, WebDriverOptions options,
                                           std::shared_ptr<Clock> clock)
    : Environment(std::move(session)),
      transport_(std::move(transport)),
      options_(std::move(options)),
      clock_(clock ? std::move(clock) : std::make_shared<SteadyClock>()) {
  json always{{"browserName", options_.browser_name}};
  if (options_.headless && options_.browser_name == "chrome")
    always["goog:chromeOptions"] = {{"args", {"--headless=new", "--window-size=1280,1024"}}};
  auto created = transport_->send("POST", "/session", {{"capabilities", {{"alwaysMatch", always}}}});
  session_id_ = created.value("sessionId", "");
  if (session_id_.empty()) throw Error(ErrorCode::session_closed, "webdriver did not return a session id");
  command("POST", "/timeouts", {{"pageLoad", options_.navigation_timeout_ms}, {"script", 30000}, {"implicit", 0}});
}

WebDriverEnvironment::~WebDriverEnvironment() {
  if (closed_ || session_id_.empty()) return;
  try {
    transport_->send("DELETE", "/session/" + session_id_, json::object());
  } catch (const std::exception& e) {
    spdlog::warn("closing webdriver session failed: {}", e.what());
  }
}

json WebDriverEnvironment::command(std::string_view method, const std::string& suffix, const json& body) {
  if (closed_) throw Error(ErrorCode::session_closed, "session closed");
  try {
    return transport_->send(method, "/session/" + session_id_ + suffix, body);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::session_closed) closed_ = true;
    throw;
  }
}

std::string WebDriverEnvironment::find_element(const std::string& xpath) {
  auto v = command("POST", "/element", {{"using", "xpath"}, {"value", xpath}});
  if (!v.is_object() || !v.contains(kElementKey))
    throw Error(ErrorCode::element_not_found, "no element at " + xpath);
  return v[std::string(kElementKey)].get<std::string>();
}

void WebDriverEnvironment::pace() {
  if (last_dispatch_) clock_->sleep_until(*last_dispatch_ + options_.action_interval_ms);
  last_dispatch_ = clock_->now_ms();
}

void WebDriverEnvironment::install_console_hook() {
  // Drains whatever the current document buffered and (re)installs the hook.
  auto entries = command("POST", "/execute/sync", {{"script", console_hook_script()}, {"args", json::array()}});
  pending_console_capture(entries);
}

void WebDriverEnvironment::pending_console_capture(const json& entries) {
  if (!entries.is_array()) return;
  for (const auto& e : entries) {
    ConsoleEntry c;
    try {
      c.level = parse_console_level(e.value("level", "info"));
    } catch (const Error&) {
      c.level = ConsoleLevel::info;
    }
    c.message = e.value("message", "");
    c.source_url = e.value("source", "");
    c.captured_at = clock_->now_ms();
    if (!c.message.empty()) pending_.push_back(std::move(c));
  }
}

PageObservation WebDriverEnvironment::do_navigate(const std::string& url) {
  command("POST", "/url", {{"url", url}});
  install_console_hook();
  return do_observe();
}

PageObservation WebDriverEnvironment::do_perform(const GuiAction& action) {
  install_console_hook();
  switch (action.kind) {
    case ActionKind::back:
      pace();
      command("POST", "/back", json::object());
      break;
    case ActionKind::click: {
      auto el = find_element(action.target_xpath);
      pace();
      command("POST", "/element/" + el + "/click", json::object());
      break;
    }
    case ActionKind::input: {
      auto el = find_element(action.target_xpath);
      pace();
      command("POST", "/element/" + el + "/clear", json::object());
      command("POST", "/element/" + el + "/value", {{"text", action.value.value_or("")}});
      break;
    }
    case ActionKind::select: {
      find_element(action.target_xpath);
      auto lit = xpath_literal(action.value.value_or(""));
      auto option = find_element(action.target_xpath + "/option[normalize-space(.)=" + lit + " or @value=" + lit + "]");
      pace();
      command("POST", "/element/" + option + "/click", json::object());
      break;
    }
    case ActionKind::scroll: {
      auto el = find_element(action.target_xpath);
      pace();
      command("POST", "/execute/sync",
              {{"script", "arguments[0].scrollIntoView({block: 'center'});"},
               {"args", {{{std::string(kElementKey), el}}}}});
      break;
    }
    case ActionKind::hover: {
      auto el = find_element(action.target_xpath);
      pace();
      json move{{"type", "pointerMove"}, {"duration", 0}, {"x", 0}, {"y", 0},
                {"origin", {{std::string(kElementKey), el}}}};
      command("POST", "/actions",
              {{"actions", {{{"type", "pointer"}, {"id", "mouse"},
                             {"parameters", {{"pointerType", "mouse"}}},
                             {"actions", {move}}}}}});
      break;
    }
  }
  install_console_hook();
  return do_observe();
}

PageObservation WebDriverEnvironment::do_observe() {
  PageObservation obs;
  obs.url = command("GET", "/url").get<std::string>();
  obs.html = command("GET", "/source").get<std::string>();
  obs.screenshot = text::base64_decode(command("GET", "/screenshot").get<std::string>());
  install_console_hook();
  obs.console = std::move(pending_);
  pending_.clear();
  obs.captured_at = clock_->now_ms();
  return obs;
}

void WebDriverEnvironment::clear_session() {
  command("DELETE", "/cookie");
  try {
    command("POST", "/execute/sync",
            {{"script", "try { localStorage.clear(); sessionStorage.clear(); } catch (e) {}"},
             {"args", json::array()}});
  } catch (const Error& e) {
    if (e.code() == ErrorCode::session_closed) throw;
  }
}

std::string WebDriverEnvironment::element_at(int x, int y) {
  auto v = command("POST", "/execute/sync", {{"script", kElementAtScript}, {"args", {x, y}}});
  if (!v.is_string()) throw Error(ErrorCode::not_found, "no element at point");
  return v.get<std::string>();
}

}  // namespace webprobe::env
