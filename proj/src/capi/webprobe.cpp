#include "webprobe/webprobe.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "common/error.hpp"
#include "common/files.hpp"
#include "orchestrator/config.hpp"
#include "orchestrator/pipeline.hpp"
#include "orchestrator/report.hpp"

struct wp_config {
  webprobe::orchestrator::RunConfig config;
};

namespace {

using webprobe::Error;
using webprobe::ErrorCode;

thread_local std::string last_error;

wp_status status_of(ErrorCode code) { return static_cast<wp_status>(static_cast<int>(code) + 1); }

wp_status fail(wp_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
wp_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return WP_OK;
  } catch (const Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail(WP_INTERNAL_ERROR, e.what());
  } catch (...) {
    return fail(WP_INTERNAL_ERROR, "unknown failure");
  }
}

char* dup(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::optional<std::filesystem::path> optional_dir(const char* run_dir) {
  if (!run_dir || !*run_dir) return std::nullopt;
  return std::filesystem::path(run_dir);
}

}  // namespace

extern "C" {

const char* wp_version(void) { return "0.1.0"; }

const char* wp_status_name(wp_status status) {
  if (status == WP_OK) return "ok";
  if (status == WP_INTERNAL_ERROR) return "internal-error";
  if (status < WP_OK || status > WP_INTERNAL_ERROR) return "unknown";
  // to_string yields NUL-terminated literals.
  return webprobe::to_string(static_cast<ErrorCode>(status - 1)).data();
}

const char* wp_last_error(void) { return last_error.c_str(); }

void wp_string_free(char* s) { std::free(s); }

wp_status wp_set_log_level(const char* level) {
  if (!level) return fail(WP_INVALID_ARGUMENT, "level is null");
  auto parsed = spdlog::level::from_str(level);
  if (parsed == spdlog::level::off && std::strcmp(level, "off") != 0)
    return fail(WP_INVALID_ARGUMENT, std::string("unknown log level: ") + level);
  spdlog::set_level(parsed);
  return WP_OK;
}

wp_status wp_config_load(const char* path, wp_config** out) {
  if (!path || !out) return fail(WP_INVALID_ARGUMENT, "path and out are required");
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<wp_config>();
    cfg->config = webprobe::orchestrator::load_config(path);
    *out = cfg.release();
  });
}

wp_status wp_config_set(wp_config* config, const char* key, const char* value) {
  if (!config || !key || !value) return fail(WP_INVALID_ARGUMENT, "config, key and value are required");
  return guarded([&] {
    webprobe::orchestrator::ConfigOverrides o;
    std::string k(key);
    if (k == "mode") {
      o.mode = value;
    } else if (k == "seed") {
      char* end = nullptr;
      auto seed = std::strtoull(value, &end, 10);
      if (!*value || *end) throw Error(ErrorCode::config_error, std::string("invalid seed: ") + value);
      o.seed = seed;
    } else if (k == "exploration_budget") {
      o.exploration_budget = value;
    } else if (k == "total_budget") {
      o.total_budget = value;
    } else if (k == "coverage") {
      std::string v(value);
      if (v == "off") o.no_coverage = true;
      else if (v == "on") config->config.include_coverage = true;
      else throw Error(ErrorCode::config_error, "coverage must be on or off");
    } else {
      throw Error(ErrorCode::config_error, "unknown override: " + k);
    }
    webprobe::orchestrator::apply_overrides(config->config, o);
  });
}

void wp_config_free(wp_config* config) { delete config; }

wp_status wp_run(const wp_config* config, const char* run_dir, char** report_json) {
  if (!config) return fail(WP_INVALID_ARGUMENT, "config is required");
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    auto report = webprobe::orchestrator::run_pipeline(config->config, optional_dir(run_dir));
    if (report_json) *report_json = dup(webprobe::orchestrator::to_json(report).dump(2));
  });
}

wp_status wp_explore(const wp_config* config, const char* run_dir, char** report_json) {
  if (!config) return fail(WP_INVALID_ARGUMENT, "config is required");
  if (report_json) *report_json = nullptr;
  return guarded([&] {
    auto report = webprobe::orchestrator::run_exploration(config->config, optional_dir(run_dir));
    if (report_json) *report_json = dup(webprobe::orchestrator::to_json(report).dump(2));
  });
}

wp_status wp_build_kb(const char* run_dir, const wp_config* config, int include_coverage, char** kb_text) {
  if (!run_dir) return fail(WP_INVALID_ARGUMENT, "run_dir is required");
  if (kb_text) *kb_text = nullptr;
  return guarded([&] {
    auto text = webprobe::orchestrator::build_kb(run_dir, config ? &config->config : nullptr, include_coverage != 0);
    if (kb_text) *kb_text = dup(text);
  });
}

wp_status wp_report_render(const char* run_dir, int as_json, char** out) {
  if (!run_dir || !out) return fail(WP_INVALID_ARGUMENT, "run_dir and out are required");
  *out = nullptr;
  return guarded([&] {
    auto path = std::filesystem::path(run_dir) / "report.json";
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
      throw Error(ErrorCode::missing_report, "no report.json in " + std::string(run_dir));
    auto raw = webprobe::files::read_text(path);
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::missing_report, "report.json is not valid JSON: " + std::string(e.what()));
    }
    auto report = webprobe::orchestrator::report_from_json(doc);
    *out = dup(as_json ? raw : webprobe::orchestrator::render_report_text(report));
  });
}

}  // extern "C"
