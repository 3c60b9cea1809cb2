#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "common/error.hpp"
#include "env/environment.hpp"

namespace webprobe::env {

/// One WebDriver command round trip. Implementations return the response
/// body's `value` member, or throw Error mapped from the WebDriver error code.
class WebDriverTransport {
 public:
  virtual ~WebDriverTransport() = default;
  virtual nlohmann::json send(std::string_view method, const std::string& path,
                              const nlohmann::json& body) = 0;
};

/// W3C WebDriver over HTTP (chromedriver, geckodriver, selenium grid).
class HttpWebDriverTransport final : public WebDriverTransport {
 public:
  explicit HttpWebDriverTransport(std::string base_url, std::int64_t timeout_ms = 60000);
  ~HttpWebDriverTransport() override;

  nlohmann::json send(std::string_view method, const std::string& path,
                      const nlohmann::json& body) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Maps a W3C error string ("no such element", ...) onto the core error.
Error webdriver_error(const std::string& error, const std::string& message);

struct WebDriverOptions {
  std::int64_t action_interval_ms = 2000;
  std::int64_t navigation_timeout_ms = 30000;
  std::string browser_name = "chrome";
  bool headless = true;
};

/// Real-browser backend. perform() blocks until `action_interval_ms` has
/// elapsed since the previous dispatch. Console output is captured by an
/// injected page hook and drained on every observation.
class WebDriverEnvironment final : public Environment {
 public:
  WebDriverEnvironment(std::unique_ptr<WebDriverTransport> transport, SessionOptions session,
                       WebDriverOptions options = {}, std::shared_ptr<Clock> clock = nullptr);
  ~WebDriverEnvironment() override;

  Clock& clock() override { return *clock_; }
  std::string element_at(int x, int y) override;

  const std::string& session_id() const { return session_id_; }
  /// Clock reading when the most recent action command was dispatched.
  std::optional<std::int64_t> last_dispatch_ms() const { return last_dispatch_; }

  static constexpr std::string_view kElementKey = "element-6066-11e4-a52f-4f735466cecf";
  static const std::string& console_hook_script();

 protected:
  PageObservation do_navigate(const std::string& url) override;
  PageObservation do_perform(const GuiAction& action) override;
  PageObservation do_observe() override;
  void clear_session() override;

 private:
  nlohmann::json command(std::string_view method, const std::string& suffix,
                         const nlohmann::json& body = nlohmann::json::object());
  std::string find_element(const std::string& xpath);
  void pace();
  void install_console_hook();
  void pending_console_capture(const nlohmann::json& entries);

  std::unique_ptr<WebDriverTransport> transport_;
  WebDriverOptions options_;
  std::shared_ptr<Clock> clock_;
  std::string session_id_;
  std::optional<std::int64_t> last_dispatch_;
  std::vector<ConsoleEntry> pending_;
  bool closed_ = false;
};

}  // namespace webprobe::env
