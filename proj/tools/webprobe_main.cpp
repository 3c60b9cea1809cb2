// webprobe command-line entry point. Everything goes through the C API.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "webprobe/webprobe.h"

namespace {

struct Options {
  std::string config;
  std::string run_dir = "webprobe-run";
  std::optional<std::string> mode;
  std::optional<std::string> seed;
  std::optional<std::string> exploration_budget;
  std::optional<std::string> total_budget;
  bool no_coverage = false;
  bool json = false;
  std::string log_level = "warn";
};

int report_failure(const char* what, wp_status status) {
  std::cerr << "webprobe: " << what << " failed (" << wp_status_name(status) << "): " << wp_last_error() << "\n";
  return status == WP_CONFIG_ERROR ? 2 : 1;
}

// Frees the returned C string after printing it.
void print_owned(char* s) {
  if (!s) return;
  std::fputs(s, stdout);
  std::size_t n = std::char_traits<char>::length(s);
  if (n == 0 || s[n - 1] != '\n') std::fputc('\n', stdout);
  wp_string_free(s);
}

struct ConfigHandle {
  wp_config* ptr = nullptr;
  ~ConfigHandle() { wp_config_free(ptr); }
};

wp_status load_with_overrides(const Options& o, ConfigHandle& cfg) {
  if (auto s = wp_config_load(o.config.c_str(), &cfg.ptr); s != WP_OK) return s;
  const std::pair<const char*, const std::optional<std::string>*> overrides[] = {
      {"mode", &o.mode}, {"seed", &o.seed}, {"exploration_budget", &o.exploration_budget},
      {"total_budget", &o.total_budget}};
  for (const auto& [key, value] : overrides) {
    if (!*value) continue;
    if (auto s = wp_config_set(cfg.ptr, key, (*value)->c_str()); s != WP_OK) return s;
  }
  if (o.no_coverage) return wp_config_set(cfg.ptr, "coverage", "off");
  return WP_OK;
}

// Prints the run summary from the stored report, or the returned JSON when
// asked for it.
int print_run(const Options& o, char* report_json) {
  if (o.json) {
    print_owned(report_json);
    return 0;
  }
  wp_string_free(report_json);
  char* text = nullptr;
  if (auto s = wp_report_render(o.run_dir.c_str(), 0, &text); s != WP_OK) return report_failure("report", s);
  print_owned(text);
  return 0;
}

int cmd_run(const Options& o, bool explore_only) {
  ConfigHandle cfg;
  if (auto s = load_with_overrides(o, cfg); s != WP_OK) return report_failure("configuration", s);
  char* report = nullptr;
  auto s = explore_only ? wp_explore(cfg.ptr, o.run_dir.c_str(), &report) : wp_run(cfg.ptr, o.run_dir.c_str(), &report);
  if (s != WP_OK) return report_failure(explore_only ? "explore" : "run", s);
  return print_run(o, report);
}

int cmd_build_kb(const Options& o) {
  ConfigHandle cfg;
  if (!o.config.empty()) {
    if (auto s = load_with_overrides(o, cfg); s != WP_OK) return report_failure("configuration", s);
  }
  char* kb = nullptr;
  if (auto s = wp_build_kb(o.run_dir.c_str(), cfg.ptr, o.no_coverage ? 0 : 1, &kb); s != WP_OK)
    return report_failure("build-kb", s);
  print_owned(kb);
  return 0;
}

int cmd_report(const Options& o) {
  char* out = nullptr;
  if (auto s = wp_report_render(o.run_dir.c_str(), o.json ? 1 : 0, &out); s != WP_OK) return report_failure("report", s);
  print_owned(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"webprobe: exploration, knowledge-base distillation and agent-driven web GUI testing"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--log-level", o.log_level, "trace, debug, info, warn, error or off")->capture_default_str();
  app.set_version_flag("--version", std::string(wp_version()));

  auto add_overrides = [&](CLI::App* sub, bool with_mode) {
    if (with_mode) sub->add_option("--mode", o.mode, "full, rl_only, llm_only, no_stg or no_cr");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--exploration-budget", o.exploration_budget, "e.g. 30m, 90s or \"500 actions\"");
    sub->add_option("--total-budget", o.total_budget, "e.g. 60m");
  };

  auto* run = app.add_subcommand("run", "Explore, build the knowledge base and execute generated tasks");
  run->add_option("--config", o.config, "JSON run configuration")->required();
  run->add_option("--run-dir", o.run_dir, "Artifact directory")->capture_default_str();
  add_overrides(run, true);
  run->add_flag("--no-coverage", o.no_coverage, "Leave coverage out of the knowledge base");
  run->add_flag("--json", o.json, "Print report.json instead of the summary tables");

  auto* explore = app.add_subcommand("explore", "Run the exploration phase only");
  explore->add_option("--config", o.config, "JSON run configuration")->required();
  explore->add_option("--run-dir", o.run_dir, "Artifact directory")->capture_default_str();
  add_overrides(explore, false);
  explore->add_flag("--json", o.json, "Print report.json instead of the summary tables");

  auto* build_kb = app.add_subcommand("build-kb", "Build kb.txt from a stored run without touching the application");
  build_kb->add_option("--run-dir", o.run_dir, "Run directory holding graph/ and trace/")->required();
  build_kb->add_option("--config", o.config, "Optional configuration (app-specific entries, summarizer script)");
  build_kb->add_flag("--no-coverage", o.no_coverage, "Omit the coverage section");

  auto* report = app.add_subcommand("report", "Print the tables of a finished run");
  report->add_option("--run-dir", o.run_dir, "Run directory holding report.json")->required();
  report->add_flag("--json", o.json, "Echo report.json unchanged");

  CLI11_PARSE(app, argc, argv);

  if (wp_set_log_level(o.log_level.c_str()) != WP_OK) {
    std::cerr << "webprobe: " << wp_last_error() << "\n";
    return 2;
  }
  if (run->parsed()) return cmd_run(o, false);
  if (explore->parsed()) return cmd_run(o, true);
  if (build_kb->parsed()) return cmd_build_kb(o);
  return cmd_report(o);
}
