#pragma once

#include <memory>
#include <string>
#include <vector>

#include "env/environment.hpp"
#include "simaut/fixture.hpp"

namespace webprobe::env {

struct SimOptions {
  std::int64_t action_interval_ms = 2000;  // virtual time charged per page operation
};

/// In-process backend over a fixture application, on a virtual clock.
/// Deterministic: identical action sequences from reset produce byte-equal
/// observations.
class SimEnvironment final : public Environment {
 public:
  SimEnvironment(std::shared_ptr<const simaut::FixtureApp> app, SessionOptions session,
                 SimOptions options = {});

  Clock& clock() override { return clock_; }
  std::optional<std::string> coverage_report() const override { return coverage_.lcov(); }

  const simaut::FixtureApp& app() const { return *app_; }
  const simaut::SyntheticCoverage& coverage() const { return coverage_; }
  const std::string& current_page() const { return page_; }
  bool logged_in() const { return logged_in_; }

  /// Home URL for SessionOptions: the fixture's base URL plus its home path.
  static std::string home_url_of(const simaut::FixtureApp& app);

 protected:
  PageObservation do_navigate(const std::string& url) override;
  PageObservation do_perform(const GuiAction& action) override;
  PageObservation do_observe() override;
  void clear_session() override;

 private:
  void land(const std::string& page_id);
  void absorb(simaut::ApplyResult& result);
  PageObservation capture();

  std::shared_ptr<const simaut::FixtureApp> app_;
  SimOptions sim_options_;
  VirtualClock clock_;
  simaut::SyntheticCoverage coverage_;
  std::string page_;
  simaut::FormState form_;
  std::vector<std::string> history_;
  std::vector<ConsoleEntry> console_buffer_;
  bool logged_in_ = false;
  std::int64_t tick_ = 0;
};

}  // namespace webprobe::env
