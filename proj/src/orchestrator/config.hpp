#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "env/environment.hpp"
#include "explorer/explorer.hpp"

namespace webprobe::orchestrator {

enum class Mode { full, rl_only, llm_only, no_stg, no_cr };
std::string_view to_string(Mode mode) noexcept;
/// Throws Error{config_error}.
Mode parse_mode(std::string_view name);

inline constexpr std::int64_t kMinuteMs = 60 * 1000;

/// Parses "30m", "1h", "90s", "1500ms", "2 min"; a bare number is seconds.
/// Throws Error{config_error}.
std::int64_t parse_duration_ms(std::string_view text);
/// A duration, or an action count written "<n> actions".
explorer::ExploreBudget parse_budget(std::string_view text);

struct AppConfig {
  std::string backend = "sim";  // sim | webdriver
  std::filesystem::path fixture;
  std::string url;
  std::string webdriver_url = "http://127.0.0.1:9515";
  std::string browser = "chrome";
  bool headless = true;
};

struct AgentConfig {
  std::string backend = "scripted";  // scripted | remote
  std::filesystem::path script;
  std::string base_url;
  std::string model = "gpt-4o";
  std::string api_key_env = "WEBPROBE_API_KEY";
  std::string actor = "text";  // text | remote
  double temperature = 0.0;
  int max_output = 1024;
  std::int64_t virtual_latency_ms = 3000;  // charged per call on simulated clocks
  double locate_threshold = 0.5;
};

struct CoverageConfig {
  std::filesystem::path lcov_path;  // read when the backend produces no report itself
  bool refresh = true;
};

struct RunConfig {
  AppConfig app;
  std::optional<env::LoginConfig> login;
  std::vector<env::AppSpecificEntry> app_specific;

  explorer::ExploreBudget exploration_budget{30 * kMinuteMs, std::nullopt};
  std::int64_t total_budget_ms = 60 * kMinuteMs;
  std::int64_t action_interval_ms = 2000;
  std::int64_t navigation_timeout_ms = 30000;
  int step_cap_per_task = 20;
  std::size_t max_tasks_per_round = 5;
  std::size_t coverage_cap = 50;
  Mode mode = Mode::full;
  std::uint64_t seed = 0;
  bool include_coverage = true;

  explorer::ExplorerConfig explorer;
  AgentConfig agents;
  CoverageConfig coverage;
  bool persist_pages = true;
};

/// Command-line values; each one that is set wins over the file.
struct ConfigOverrides {
  std::optional<std::string> mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> exploration_budget;
  std::optional<std::string> total_budget;
  bool no_coverage = false;
};

/// Replaces ${NAME} and ${NAME:-fallback} in every string value. Throws
/// Error{config_error} for unset variables without a fallback.
nlohmann::json interpolate_env(const nlohmann::json& value);

/// `base_dir` resolves relative paths (the config file's directory).
RunConfig parse_config(const nlohmann::json& document, const std::filesystem::path& base_dir);
/// Throws Error{config_error} ("config not found: ...") for a missing file.
RunConfig load_config(const std::filesystem::path& path);
void apply_overrides(RunConfig& config, const ConfigOverrides& overrides);
/// exploration budget ≤ total budget, step cap ≥ 1, known backends.
void validate(const RunConfig& config);

}  // namespace webprobe::orchestrator
