#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace webprobe::env {

enum class ActionKind { click, input, select, scroll, back, hover };

std::string_view to_string(ActionKind kind) noexcept;
/// Throws Error{invalid_argument} for unknown names.
ActionKind parse_action_kind(std::string_view name);

struct GuiAction {
  ActionKind kind = ActionKind::click;
  std::optional<std::string> value;  // input content or select option
  std::string target_xpath;
  std::string target_text;

  friend bool operator==(const GuiAction&, const GuiAction&) = default;
};

/// Checks the GuiAction invariants: input carries a value, click carries
/// none, and the target XPath is syntactically valid (back needs no target).
bool is_well_formed(const GuiAction& action);

enum class ConsoleLevel { error, warning, info };

std::string_view to_string(ConsoleLevel level) noexcept;
ConsoleLevel parse_console_level(std::string_view name);

struct ConsoleEntry {
  ConsoleLevel level = ConsoleLevel::info;
  std::string message;
  std::string source_url;
  std::int64_t captured_at = 0;

  friend bool operator==(const ConsoleEntry&, const ConsoleEntry&) = default;
};

struct PageObservation {
  std::string url;
  std::string html;
  std::vector<std::uint8_t> screenshot;  // PNG bytes
  std::vector<ConsoleEntry> console;
  std::int64_t captured_at = 0;
};

void to_json(nlohmann::json& j, const GuiAction& a);
void from_json(const nlohmann::json& j, GuiAction& a);
void to_json(nlohmann::json& j, const ConsoleEntry& e);
void from_json(const nlohmann::json& j, ConsoleEntry& e);

}  // namespace webprobe::env

namespace webprobe::env {

/// One Key/Value pair of application-specific knowledge (credentials, the
/// application's name, ...).
struct AppSpecificEntry {
  std::string key;
  std::string value;

  friend bool operator==(const AppSpecificEntry&, const AppSpecificEntry&) = default;
};

/// Returns the value whose key matches case-insensitively, if any.
std::optional<std::string> lookup(const std::vector<AppSpecificEntry>& entries, std::string_view key);

}  // namespace webprobe::env
