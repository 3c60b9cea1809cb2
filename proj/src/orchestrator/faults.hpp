#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "env/types.hpp"

namespace webprobe::orchestrator {

enum class FaultCategory { network, javascript, csp, other };
std::string_view to_string(FaultCategory category) noexcept;
FaultCategory parse_fault_category(std::string_view name);

struct FaultRecord {
  std::string message;  // normalized
  std::string source_url;
  FaultCategory category = FaultCategory::other;
  int occurrences = 1;
  std::int64_t first_seen = 0;
  friend bool operator==(const FaultRecord&, const FaultRecord&) = default;
};

/// First match wins: CSP/CORS violations, then network failures, then
/// script errors, else other. CSP is checked first because CORS messages
/// name the blocked fetch/XMLHttpRequest.
FaultCategory categorize(std::string_view message);

/// Whitespace collapsed and trimmed.
std::string normalize_message(std::string_view message);

/// Error-level entries deduplicated by (normalized message, source URL), in
/// order of first occurrence.
std::vector<FaultRecord> collect_faults(const std::vector<env::ConsoleEntry>& entries);

void to_json(nlohmann::json& j, const FaultRecord& f);
void from_json(const nlohmann::json& j, FaultRecord& f);

}  // namespace webprobe::orchestrator
