#pragma once

#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/clock.hpp"
#include "common/png.hpp"
#include "common/text.hpp"
#include "env/webdriver_environment.hpp"

namespace wpt {

/// In-memory WebDriver endpoint: one page, every lookup succeeds. Records
/// each command with the clock reading at which it arrived.
class StubTransport final : public webprobe::env::WebDriverTransport {
 public:
  struct Call {
    std::string method;
    std::string path;
    nlohmann::json body;
    std::int64_t at_ms;
  };

  StubTransport(std::shared_ptr<std::vector<Call>> log, webprobe::Clock* clock) : log_(std::move(log)), clock_(clock) {}

  nlohmann::json send(std::string_view method, const std::string& path, const nlohmann::json& body) override {
    log_->push_back({std::string(method), path, body, clock_ ? clock_->now_ms() : 0});
    if (path == "/session") return {{"sessionId", "stub-session"}};
    auto ends_with = [&](std::string_view s) {
      return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (method == "GET" && ends_with("/url")) return url;
    if (method == "GET" && ends_with("/source")) return html;
    if (method == "GET" && ends_with("/screenshot")) {
      webprobe::png::Image img;
      img.width = img.height = 1;
      img.rgb = {255, 255, 255};
      return webprobe::text::base64_encode(webprobe::png::encode(img));
    }
    if (method == "POST" && ends_with("/element"))
      return {{std::string(webprobe::env::WebDriverEnvironment::kElementKey), "el-1"}};
    if (ends_with("/execute/sync")) {
      if (body.contains("script") && body["script"].get<std::string>().find("__webprobeConsole") != std::string::npos) {
        auto drained = pending_console;
        pending_console = nlohmann::json::array();
        return drained;
      }
      return nullptr;
    }
    return nullptr;
  }

  std::string url = "http://stub.local/";
  std::string html = "<html><body><a id='go' href='#'>Go</a><input id='q'></body></html>";
  nlohmann::json pending_console = nlohmann::json::array();

 private:
  std::shared_ptr<std::vector<Call>> log_;
  webprobe::Clock* clock_;
};

/// Clock readings of the element actions (click, or clear for typing) in the log.
inline std::vector<std::int64_t> action_dispatch_times(const std::vector<StubTransport::Call>& log) {
  std::vector<std::int64_t> out;
  for (const auto& c : log) {
    auto p = c.path;
    bool click = p.size() > 6 && p.compare(p.size() - 6, 6, "/click") == 0;
    bool clear = p.size() > 6 && p.compare(p.size() - 6, 6, "/clear") == 0;
    if (click || clear) out.push_back(c.at_ms);
  }
  return out;
}

}  // namespace wpt
