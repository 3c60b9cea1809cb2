#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "env/sim_environment.hpp"
#include "simaut/fixture.hpp"

namespace wpt {

inline std::filesystem::path fixtures_dir() { return WEBPROBE_FIXTURES_DIR; }
inline std::filesystem::path golden_dir() { return WEBPROBE_GOLDEN_DIR; }
inline std::filesystem::path fixture(const std::string& name, const std::string& file = "app.json") {
  return fixtures_dir() / name / file;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("webprobe-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline std::shared_ptr<const webprobe::simaut::FixtureApp> load_app(const std::string& name) {
  return std::make_shared<const webprobe::simaut::FixtureApp>(webprobe::simaut::load_fixture(fixture(name)));
}

inline std::vector<webprobe::env::AppSpecificEntry> gadael_credentials(const std::string& password = "secret") {
  return {{"Username", "secret@secret.com"}, {"Password", password}};
}

/// Session options for mini-erp with its login form configured.
inline webprobe::env::SessionOptions mini_erp_session(const webprobe::simaut::FixtureApp& app,
                                                      const std::string& password = "secret") {
  webprobe::env::SessionOptions s;
  s.home_url = webprobe::env::SimEnvironment::home_url_of(app);
  s.login = webprobe::env::LoginConfig{{{"username", "Username"}, {"password", "Password"}}, "login_btn"};
  s.credentials = gadael_credentials(password);
  return s;
}

inline std::unique_ptr<webprobe::env::SimEnvironment> sim(const std::string& name,
                                                          webprobe::env::SessionOptions session = {}) {
  auto app = load_app(name);
  if (session.home_url.empty()) session.home_url = webprobe::env::SimEnvironment::home_url_of(*app);
  return std::make_unique<webprobe::env::SimEnvironment>(app, std::move(session));
}

}  // namespace wpt
