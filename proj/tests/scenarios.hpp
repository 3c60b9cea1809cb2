#pragma once

// End-to-end scenarios shared by the orchestrator tests and the acceptance
// runner. Each check returns "" on success or a description of the mismatch.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "html/dom.hpp"
#include "orchestrator/config.hpp"
#include "orchestrator/faults.hpp"
#include "orchestrator/pipeline.hpp"
#include "support.hpp"

namespace wpt {

inline nlohmann::json noisy_labels() {
  std::ifstream in(fixture("noisy-console", "labels.json"));
  return nlohmann::json::parse(in);
}

/// Console entries seen on the labeled walk through noisy-console.
inline std::vector<webprobe::env::ConsoleEntry> noisy_walk_entries() {
  using namespace webprobe;
  auto env = sim("noisy-console");
  std::vector<env::ConsoleEntry> all;
  auto obs = env->reset();
  all.insert(all.end(), obs.console.begin(), obs.console.end());
  auto labels = noisy_labels();
  for (const auto& id : labels.at("walk")) {
    auto doc = html::Document::parse(obs.html);
    const auto* el = doc.find_by_id(id.get<std::string>());
    if (!el) throw std::runtime_error("walk element missing: " + id.get<std::string>());
    obs = env->perform({env::ActionKind::click, std::nullopt, html::xpath_of(*el), ""});
    all.insert(all.end(), obs.console.begin(), obs.console.end());
  }
  return all;
}

inline std::string check_noisy_console() {
  using namespace webprobe::orchestrator;
  auto labels = noisy_labels();
  auto entries = noisy_walk_entries();
  auto raw = std::count_if(entries.begin(), entries.end(),
                           [](const auto& e) { return e.level == webprobe::env::ConsoleLevel::error; });
  if (raw != labels.at("raw_error_entries").get<long>())
    return "raw error entries " + std::to_string(raw);
  auto faults = collect_faults(entries);
  const auto& want = labels.at("records");
  if (faults.size() != want.size()) return "record count " + std::to_string(faults.size());
  long occurrences = 0;
  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < faults.size(); ++i) {
    const auto& f = faults[i];
    const auto& w = want[i];
    if (f.message != w.at("message") || f.source_url != w.at("source") ||
        to_string(f.category) != w.at("category").get<std::string>() || f.occurrences != w.at("occurrences"))
      return "record " + std::to_string(i) + " differs: " + f.message;
    occurrences += f.occurrences;
    ++counts[std::string(to_string(f.category))];
  }
  if (occurrences != raw) return "occurrence sum " + std::to_string(occurrences);
  for (const auto& [category, n] : labels.at("counts").items())
    if (counts[category] != n.get<int>()) return category + " count " + std::to_string(counts[category]);
  return "";
}

inline webprobe::orchestrator::RunConfig mini_erp_config(const std::string& mode, std::uint64_t seed) {
  auto cfg = webprobe::orchestrator::load_config(fixture("mini-erp", "config.json"));
  webprobe::orchestrator::ConfigOverrides o;
  o.mode = mode;
  o.seed = seed;
  webprobe::orchestrator::apply_overrides(cfg, o);
  return cfg;
}

struct ModeRun {
  webprobe::orchestrator::RunReport report;
  std::string kb_text;
  std::vector<webprobe::agents::ChatRequest> requests;
  std::int64_t covered_lines = 0;
};

inline ModeRun run_mode(const std::string& mode, std::uint64_t seed,
                        const std::optional<std::filesystem::path>& run_dir = std::nullopt) {
  auto cfg = mini_erp_config(mode, seed);
  webprobe::orchestrator::Pipeline p(cfg, webprobe::orchestrator::make_parts(cfg), run_dir);
  ModeRun out;
  out.report = p.run();
  out.kb_text = p.kb_text();
  if (p.agent_log()) out.requests = p.agent_log()->requests();
  if (!out.report.coverage_timeline.empty()) out.covered_lines = out.report.coverage_timeline.back().covered_lines;
  return out;
}

inline bool covers(const webprobe::orchestrator::RunReport& r, const std::string& functionality) {
  return std::find(r.covered_functionalities.begin(), r.covered_functionalities.end(), functionality) !=
         r.covered_functionalities.end();
}

inline const std::vector<std::string>& gated_functionalities() {
  static const std::vector<std::string> names{"project_create", "dept_create", "report_generate"};
  return names;
}

}  // namespace wpt
