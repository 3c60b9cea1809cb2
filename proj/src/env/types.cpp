#include "env/types.hpp"

#include "common/error.hpp"
#include "common/text.hpp"
#include "html/dom.hpp"

namespace webprobe::env {

std::string_view to_string(ActionKind kind) noexcept {
  switch (kind) {
    case ActionKind::click: return "click";
    case ActionKind::input: return "input";
    case ActionKind::select: return "select";
    case ActionKind::scroll: return "scroll";
    case ActionKind::back: return "back";
    case ActionKind::hover: return "hover";
  }
  return "click";
}

ActionKind parse_action_kind(std::string_view name) {
  if (name == "click") return ActionKind::click;
  if (name == "input") return ActionKind::input;
  if (name == "select") return ActionKind::select;
  if (name == "scroll") return ActionKind::scroll;
  if (name == "back") return ActionKind::back;
  if (name == "hover") return ActionKind::hover;
  throw Error(ErrorCode::invalid_argument, "unknown action kind: " + std::string(name));
}

bool is_well_formed(const GuiAction& action) {
  if (action.kind == ActionKind::input && !action.value) return false;
  if (action.kind == ActionKind::click && action.value && !action.value->empty()) return false;
  if (action.kind == ActionKind::back) return true;
  return html::is_valid_xpath(action.target_xpath);
}

std::string_view to_string(ConsoleLevel level) noexcept {
  switch (level) {
    case ConsoleLevel::error: return "error";
    case ConsoleLevel::warning: return "warning";
    case ConsoleLevel::info: return "info";
  }
  return "info";
}

ConsoleLevel parse_console_level(std::string_view name) {
  if (name == "error" || name == "severe") return ConsoleLevel::error;
  if (name == "warning" || name == "warn") return ConsoleLevel::warning;
  if (name == "info" || name == "log" || name == "debug") return ConsoleLevel::info;
  throw Error(ErrorCode::invalid_argument, "unknown console level: " + std::string(name));
}

void to_json(nlohmann::json& j, const GuiAction& a) {
  j = nlohmann::json{{"kind", to_string(a.kind)},
                     {"target_xpath", a.target_xpath},
                     {"target_text", a.target_text}};
  j["value"] = a.value ? nlohmann::json(*a.value) : nlohmann::json(nullptr);
}

void from_json(const nlohmann::json& j, GuiAction& a) {
  a.kind = parse_action_kind(j.at("kind").get<std::string>());
  a.target_xpath = j.value("target_xpath", "");
  a.target_text = j.value("target_text", "");
  if (j.contains("value") && !j["value"].is_null()) a.value = j["value"].get<std::string>();
  else a.value.reset();
}

void to_json(nlohmann::json& j, const ConsoleEntry& e) {
  j = nlohmann::json{{"level", to_string(e.level)},
                     {"message", e.message},
                     {"source_url", e.source_url},
                     {"captured_at", e.captured_at}};
}

void from_json(const nlohmann::json& j, ConsoleEntry& e) {
  e.level = parse_console_level(j.at("level").get<std::string>());
  e.message = j.at("message").get<std::string>();
  e.source_url = j.value("source_url", "");
  e.captured_at = j.value("captured_at", std::int64_t{0});
}

}  // namespace webprobe::env

namespace webprobe::env {

std::optional<std::string> lookup(const std::vector<AppSpecificEntry>& entries, std::string_view key) {
  std::string want = text::to_lower(key);
  for (const auto& e : entries)
    if (text::to_lower(e.key) == want) return e.value;
  return std::nullopt;
}

}  // namespace webprobe::env
