/* webprobe: LLM-assisted web GUI testing pipeline, C interface.
 *
 * All strings are UTF-8. Strings returned through `char**` out-parameters are
 * owned by the caller and released with wp_string_free. Functions never
 * throw; on failure they return a status other than WP_OK and leave a
 * message in wp_last_error() for the calling thread.
 */
#ifndef WEBPROBE_WEBPROBE_H
#define WEBPROBE_WEBPROBE_H

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define WP_API __declspec(dllexport)
#else
#define WP_API __attribute__((visibility("default")))
#endif

typedef enum wp_status {
  WP_OK = 0,
  WP_INVALID_ARGUMENT,
  WP_NAVIGATION_TIMEOUT,
  WP_SESSION_CLOSED,
  WP_ELEMENT_NOT_FOUND,
  WP_NOT_INTERACTABLE,
  WP_FORM_NOT_FOUND,
  WP_LOGIN_REJECTED,
  WP_BUDGET_EXHAUSTED,
  WP_NO_CANDIDATES,
  WP_UNKNOWN_STATE,
  WP_UNREACHABLE_TARGET,
  WP_MALFORMED_REPORT,
  WP_MISSING_DESCRIPTION,
  WP_BACKEND_UNAVAILABLE,
  WP_EMPTY_ANSWER,
  WP_NOT_FOUND,
  WP_MALFORMED_DEFINITION,
  WP_DANGLING_TRANSITION,
  WP_CONFIG_ERROR,
  WP_MISSING_ARTIFACTS,
  WP_MISSING_REPORT,
  WP_IO_ERROR,
  WP_INTERNAL_ERROR
} wp_status;

/* Parsed run configuration. */
typedef struct wp_config wp_config;

WP_API const char* wp_version(void);
/* Stable lower-case name such as "config-error". */
WP_API const char* wp_status_name(wp_status status);
/* Message of the last failure on this thread, or "" when there was none. */
WP_API const char* wp_last_error(void);
WP_API void wp_string_free(char* s);

/* Log verbosity: "trace", "debug", "info", "warn", "error" or "off". */
WP_API wp_status wp_set_log_level(const char* level);

WP_API wp_status wp_config_load(const char* path, wp_config** out);
/* Command-line style overrides. Keys: "mode", "seed", "exploration_budget",
 * "total_budget", "coverage" ("on"/"off"). */
WP_API wp_status wp_config_set(wp_config* config, const char* key, const char* value);
WP_API void wp_config_free(wp_config* config);

/* Full pipeline. `run_dir` may be NULL to keep artifacts in memory only.
 * `report_json` may be NULL. */
WP_API wp_status wp_run(const wp_config* config, const char* run_dir, char** report_json);

/* Phase-1 exploration only, writing trace, pages, graph and report. */
WP_API wp_status wp_explore(const wp_config* config, const char* run_dir, char** report_json);

/* Offline knowledge-base construction from a stored run. `config` may be
 * NULL. Writes kb.txt and kb.json; `kb_text` may be NULL. */
WP_API wp_status wp_build_kb(const char* run_dir, const wp_config* config, int include_coverage,
                             char** kb_text);

/* Reads run_dir/report.json. With `as_json` the raw document is returned,
 * otherwise the human-readable tables. */
WP_API wp_status wp_report_render(const char* run_dir, int as_json, char** out);

#ifdef __cplusplus
}
#endif

#endif /* WEBPROBE_WEBPROBE_H */
