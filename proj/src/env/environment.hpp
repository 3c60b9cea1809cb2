#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "common/clock.hpp"
#include "env/types.hpp"

namespace webprobe::env {

/// Login form description: which inputs to fill with which app-specific
/// entry, and which control submits. Elements are matched by their `id` or
/// `name` attribute.
struct LoginConfig {
  std::vector<std::pair<std::string, std::string>> fields;  // element key -> app-specific key
  std::string submit;
};

struct SessionOptions {
  std::string home_url;
  std::optional<LoginConfig> login;
  std::vector<AppSpecificEntry> credentials;
};

/// A browser session. Operations are strictly sequential; one session per
/// control flow. Every console entry produced by the backend is delivered in
/// exactly one returned observation.
class Environment {
 public:
  explicit Environment(SessionOptions options) : options_(std::move(options)) {}
  virtual ~Environment() = default;

  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;

  PageObservation navigate(const std::string& url);
  PageObservation perform(const GuiAction& action);
  PageObservation observe();

  /// Fresh session at the home URL, logged in when a login form is configured.
  PageObservation reset();
  /// Fills the configured login form from `options().credentials` and submits it.
  PageObservation run_login_script();
  PageObservation run_login_script(const std::vector<AppSpecificEntry>& credentials);

  /// No navigate/perform is started at or after the deadline
  /// (Error{budget_exhausted}).
  void set_deadline(std::optional<std::int64_t> deadline_ms) { deadline_ = deadline_ms; }
  std::optional<std::int64_t> deadline() const { return deadline_; }

  virtual Clock& clock() = 0;
  /// Current LCOV report when the backend can produce one.
  virtual std::optional<std::string> coverage_report() const { return std::nullopt; }
  /// XPath of the deepest interactable element at a viewport point, for
  /// coordinate-based actors. Throws Error{not_found} when unsupported.
  virtual std::string element_at(int x, int y);

  const SessionOptions& options() const { return options_; }

 protected:
  virtual PageObservation do_navigate(const std::string& url) = 0;
  virtual PageObservation do_perform(const GuiAction& action) = 0;
  virtual PageObservation do_observe() = 0;
  virtual void clear_session() = 0;

 private:
  void check_deadline();
  PageObservation deliver(PageObservation obs);
  // Entries drained by an operation that then failed are re-delivered with
  // the next observation.
  void carry_console(PageObservation& obs);
  bool login_form_present(const std::string& html) const;

  SessionOptions options_;
  std::optional<std::int64_t> deadline_;
  std::vector<ConsoleEntry> carried_console_;
};

}  // namespace webprobe::env
