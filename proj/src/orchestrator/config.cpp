#include "orchestrator/config.hpp"

#include <cctype>
#include <cstdlib>
#include <regex>

#include "common/error.hpp"
#include "common/files.hpp"
#include "common/text.hpp"

namespace webprobe::orchestrator {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& message) { throw Error(ErrorCode::config_error, message); }

std::string interpolate_string(const std::string& s) {
  static const std::regex var(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)(:-([^}]*))?\})");
  std::string out;
  auto begin = std::sregex_iterator(s.begin(), s.end(), var);
  std::size_t last = 0;
  for (auto it = begin; it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.append(s, last, static_cast<std::size_t>(m.position(0)) - last);
    const char* v = std::getenv(m[1].str().c_str());
    if (v && *v) {
      out += v;
    } else if (m[2].matched) {
      out += m[3].str();
    } else {
      config_error("environment variable " + m[1].str() + " is not set");
    }
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(s, last);
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error(std::string("invalid value for \"") + key + "\"");
  }
}

std::string budget_text(const json& v) {
  if (v.is_number()) return std::to_string(v.get<std::int64_t>());
  if (v.is_string()) return v.get<std::string>();
  config_error("budgets must be strings or numbers of seconds");
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::full: return "full";
    case Mode::rl_only: return "rl_only";
    case Mode::llm_only: return "llm_only";
    case Mode::no_stg: return "no_stg";
    case Mode::no_cr: return "no_cr";
  }
  return "full";
}

Mode parse_mode(std::string_view name) {
  for (auto m : {Mode::full, Mode::rl_only, Mode::llm_only, Mode::no_stg, Mode::no_cr})
    if (to_string(m) == name) return m;
  config_error("unknown mode: " + std::string(name));
}

std::int64_t parse_duration_ms(std::string_view input) {
  static const std::regex re(R"(^\s*(\d+(?:\.\d+)?)\s*([a-zA-Z]*)\s*$)");
  std::string s(input);
  std::smatch m;
  if (!std::regex_match(s, m, re)) config_error("invalid duration: " + s);
  double n = std::stod(m[1].str());
  auto unit = text::to_lower(m[2].str());
  double factor;
  if (unit.empty() || unit == "s" || unit == "sec" || unit == "secs" || unit == "second" || unit == "seconds")
    factor = 1000;
  else if (unit == "ms")
    factor = 1;
  else if (unit == "m" || unit == "min" || unit == "mins" || unit == "minute" || unit == "minutes")
    factor = 60000;
  else if (unit == "h" || unit == "hour" || unit == "hours")
    factor = 3600000;
  else
    config_error("unknown duration unit: " + unit);
  return static_cast<std::int64_t>(n * factor + 0.5);
}

explorer::ExploreBudget parse_budget(std::string_view input) {
  static const std::regex actions(R"(^\s*(\d+)\s*actions?\s*$)");
  std::string s(input);
  std::smatch m;
  if (std::regex_match(s, m, actions)) return {std::nullopt, std::stoll(m[1].str())};
  return {parse_duration_ms(s), std::nullopt};
}

json interpolate_env(const json& value) {
  if (value.is_string()) return interpolate_string(value.get<std::string>());
  if (value.is_array()) {
    json out = json::array();
    for (const auto& v : value) out.push_back(interpolate_env(v));
    return out;
  }
  if (value.is_object()) {
    json out = json::object();
    for (const auto& [k, v] : value.items()) out[k] = interpolate_env(v);
    return out;
  }
  return value;
}

RunConfig parse_config(const json& raw, const std::filesystem::path& base_dir) {
  if (!raw.is_object()) config_error("config must be a JSON object");
  auto doc = interpolate_env(raw);
  RunConfig c;

  if (doc.contains("app")) {
    const auto& app = doc["app"];
    read(app, "backend", c.app.backend);
    std::string fixture;
    read(app, "fixture", fixture);
    c.app.fixture = resolve(base_dir, fixture);
    read(app, "url", c.app.url);
    read(app, "webdriver_url", c.app.webdriver_url);
    read(app, "browser", c.app.browser);
    read(app, "headless", c.app.headless);
  }
  if (doc.contains("login")) {
    const auto& l = doc["login"];
    env::LoginConfig login;
    if (l.contains("fields")) {
      for (const auto& [element, key] : l["fields"].items()) {
        if (!key.is_string()) config_error("login.fields values must be app-specific keys");
        login.fields.emplace_back(element, key.get<std::string>());
      }
    }
    read(l, "submit", login.submit);
    if (login.submit.empty()) config_error("login.submit is required");
    c.login = std::move(login);
  }
  if (doc.contains("app_specific")) {
    const auto& a = doc["app_specific"];
    if (a.is_array()) {
      for (const auto& e : a) {
        if (!e.is_object() || !e.contains("key") || !e.contains("value"))
          config_error("app_specific entries need key and value");
        c.app_specific.push_back({e["key"].get<std::string>(), e["value"].get<std::string>()});
      }
    } else if (a.is_object()) {
      for (const auto& [k, v] : a.items()) c.app_specific.push_back({k, v.get<std::string>()});
    } else {
      config_error("app_specific must be a list or an object");
    }
    for (std::size_t i = 0; i < c.app_specific.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (c.app_specific[i].key == c.app_specific[j].key) config_error("duplicate app_specific key: " + c.app_specific[i].key);
  }

  if (doc.contains("exploration_budget")) c.exploration_budget = parse_budget(budget_text(doc["exploration_budget"]));
  if (doc.contains("total_budget")) c.total_budget_ms = parse_duration_ms(budget_text(doc["total_budget"]));
  read(doc, "action_interval_ms", c.action_interval_ms);
  read(doc, "navigation_timeout_ms", c.navigation_timeout_ms);
  read(doc, "step_cap_per_task", c.step_cap_per_task);
  read(doc, "max_tasks_per_round", c.max_tasks_per_round);
  read(doc, "coverage_cap", c.coverage_cap);
  if (doc.contains("mode")) c.mode = parse_mode(doc["mode"].get<std::string>());
  read(doc, "seed", c.seed);
  read(doc, "persist_pages", c.persist_pages);

  if (doc.contains("explorer")) {
    const auto& e = doc["explorer"];
    read(e, "epsilon", c.explorer.policy.epsilon);
    read(e, "alpha", c.explorer.policy.alpha);
    read(e, "gamma", c.explorer.policy.gamma);
    read(e, "initial_value", c.explorer.policy.initial_value);
    read(e, "similarity_threshold", c.explorer.similarity_threshold);
    read(e, "episode_length", c.explorer.episode_length);
  }
  if (doc.contains("agents")) {
    const auto& a = doc["agents"];
    read(a, "backend", c.agents.backend);
    std::string script;
    read(a, "script", script);
    c.agents.script = resolve(base_dir, script);
    read(a, "base_url", c.agents.base_url);
    read(a, "model", c.agents.model);
    read(a, "api_key_env", c.agents.api_key_env);
    read(a, "actor", c.agents.actor);
    read(a, "temperature", c.agents.temperature);
    read(a, "max_output", c.agents.max_output);
    read(a, "virtual_latency_ms", c.agents.virtual_latency_ms);
    read(a, "locate_threshold", c.agents.locate_threshold);
  }
  if (doc.contains("coverage")) {
    const auto& cov = doc["coverage"];
    std::string lcov;
    read(cov, "lcov_path", lcov);
    c.coverage.lcov_path = resolve(base_dir, lcov);
    read(cov, "refresh", c.coverage.refresh);
    read(cov, "include", c.include_coverage);
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) config_error("config not found: " + path.string());
  json doc;
  try {
    doc = json::parse(files::read_text(path));
  } catch (const json::exception& e) {
    config_error("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc, std::filesystem::absolute(path).parent_path());
}

void apply_overrides(RunConfig& c, const ConfigOverrides& o) {
  if (o.mode) c.mode = parse_mode(*o.mode);
  if (o.seed) c.seed = *o.seed;
  if (o.exploration_budget) c.exploration_budget = parse_budget(*o.exploration_budget);
  if (o.total_budget) c.total_budget_ms = parse_duration_ms(*o.total_budget);
  if (o.no_coverage) c.include_coverage = false;
}

void validate(const RunConfig& c) {
  if (c.app.backend != "sim" && c.app.backend != "webdriver") config_error("unknown app backend: " + c.app.backend);
  if (c.app.backend == "sim" && c.app.fixture.empty()) config_error("app.fixture is required for the sim backend");
  if (c.app.backend == "webdriver" && c.app.url.empty()) config_error("app.url is required for the webdriver backend");
  if (c.agents.backend != "scripted" && c.agents.backend != "remote")
    config_error("unknown agents backend: " + c.agents.backend);
  if (c.agents.backend == "scripted" && c.agents.script.empty() && c.mode != Mode::rl_only)
    config_error("agents.script is required for the scripted backend");
  if (c.agents.actor != "text" && c.agents.actor != "remote") config_error("unknown actor: " + c.agents.actor);
  if (c.step_cap_per_task < 1) config_error("step_cap_per_task must be at least 1");
  if (c.max_tasks_per_round < 1) config_error("max_tasks_per_round must be at least 1");
  if (c.total_budget_ms < 0) config_error("total_budget must not be negative");
  if (c.exploration_budget.duration_ms && *c.exploration_budget.duration_ms > c.total_budget_ms)
    config_error("exploration_budget exceeds total_budget");
  if (c.action_interval_ms < 0) config_error("action_interval_ms must not be negative");
}

}  // namespace webprobe::orchestrator
