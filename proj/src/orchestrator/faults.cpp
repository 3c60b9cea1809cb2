#include "orchestrator/faults.hpp"

#include <map>
#include <regex>

#include "common/error.hpp"
#include "common/text.hpp"

namespace webprobe::orchestrator {

std::string_view to_string(FaultCategory category) noexcept {
  switch (category) {
    case FaultCategory::network: return "network";
    case FaultCategory::javascript: return "javascript";
    case FaultCategory::csp: return "csp";
    case FaultCategory::other: return "other";
  }
  return "other";
}

FaultCategory parse_fault_category(std::string_view name) {
  for (auto c : {FaultCategory::network, FaultCategory::javascript, FaultCategory::csp, FaultCategory::other})
    if (to_string(c) == name) return c;
  throw Error(ErrorCode::invalid_argument, "unknown fault category: " + std::string(name));
}

FaultCategory categorize(std::string_view message) {
  using std::regex_constants::icase;
  static const std::regex csp(R"(content[- ]security[- ]policy|\bcors\b|cross-origin request blocked)", icase);
  static const std::regex network(
      R"(net::err_|failed to load resource|networkerror|failed to fetch|\bfetch\b|xmlhttprequest|request failed|)"
      R"(status (code )?(of )?(404|5\d\d)\b|\bhttp (error )?(404|5\d\d)\b|\b(404|5\d\d) \()",
      icase);
  static const std::regex javascript(R"(typeerror|referenceerror|syntaxerror|rangeerror|\buncaught\b)", icase);
  std::string m(message);
  if (std::regex_search(m, csp)) return FaultCategory::csp;
  if (std::regex_search(m, network)) return FaultCategory::network;
  if (std::regex_search(m, javascript)) return FaultCategory::javascript;
  return FaultCategory::other;
}

std::string normalize_message(std::string_view message) { return text::collapse_whitespace(message); }

std::vector<FaultRecord> collect_faults(const std::vector<env::ConsoleEntry>& entries) {
  std::vector<FaultRecord> out;
  std::map<std::pair<std::string, std::string>, std::size_t> index;
  for (const auto& e : entries) {
    if (e.level != env::ConsoleLevel::error) continue;
    auto msg = normalize_message(e.message);
    auto key = std::make_pair(msg, e.source_url);
    if (auto it = index.find(key); it != index.end()) {
      ++out[it->second].occurrences;
      continue;
    }
    index.emplace(key, out.size());
    out.push_back({msg, e.source_url, categorize(msg), 1, e.captured_at});
  }
  return out;
}

void to_json(nlohmann::json& j, const FaultRecord& f) {
  j = nlohmann::json{{"message", f.message},
                     {"source_url", f.source_url},
                     {"category", to_string(f.category)},
                     {"occurrences", f.occurrences},
                     {"first_seen", f.first_seen}};
}

void from_json(const nlohmann::json& j, FaultRecord& f) {
  f.message = j.at("message").get<std::string>();
  f.source_url = j.value("source_url", "");
  f.category = parse_fault_category(j.at("category").get<std::string>());
  f.occurrences = j.at("occurrences").get<int>();
  f.first_seen = j.value("first_seen", std::int64_t{0});
}

}  // namespace webprobe::orchestrator
