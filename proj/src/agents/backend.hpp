#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "common/clock.hpp"

namespace webprobe::agents {

enum class Role { summarizer, reviser, navigator, planner, actor };
std::string_view to_string(Role role) noexcept;
Role parse_role(std::string_view name);

struct ContentPart {
  enum class Kind { text, image };
  Kind kind = Kind::text;
  std::string text;
  std::vector<std::uint8_t> png;

  static ContentPart of_text(std::string t) { return {Kind::text, std::move(t), {}}; }
  static ContentPart of_image(std::vector<std::uint8_t> bytes) { return {Kind::image, {}, std::move(bytes)}; }
};

struct ChatRequest {
  Role role = Role::summarizer;
  std::string system;
  std::vector<ContentPart> parts;
  double temperature = 0.0;
  int max_output = 1024;
};

/// Canonical text form: header lines, then the system prompt and each part
/// behind a "--- <kind>" marker. Images appear as their size and SHA-256.
/// Used for golden files and request hashing.
std::string serialize(const ChatRequest& request);
std::string request_sha256(const ChatRequest& request);
/// System prompt plus all text parts, newline-joined.
std::string request_text(const ChatRequest& request);

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  /// Throws Error{backend_unavailable} on transport or protocol failure.
  virtual std::string complete(const ChatRequest& request) = 0;
};

/// One retry on backend_unavailable, then the error propagates.
std::string complete_with_retry(ChatBackend& backend, const ChatRequest& request);

/// Canned responses chosen by matching rules, first match wins. See
/// docs/fixtures.md for the script format.
class ScriptedBackend final : public ChatBackend {
 public:
  struct Rule {
    std::optional<Role> role;
    std::vector<std::string> contains;
    std::vector<std::string> image_text_contains;
    std::optional<std::string> sha256;
    std::string strategy;  // "" or "keyword_state"
    std::string response;
  };

  explicit ScriptedBackend(std::vector<Rule> rules, std::map<Role, std::string> defaults = {});
  static ScriptedBackend from_json(const nlohmann::json& script);
  static ScriptedBackend load(const std::filesystem::path& path);

  std::string complete(const ChatRequest& request) override;

 private:
  std::vector<Rule> rules_;
  std::map<Role, std::string> defaults_;
};

/// Picks the "State N: ..." line of the request sharing the most content
/// tokens with its "Task: ..." line; lowest id on ties.
std::string keyword_state_answer(const ChatRequest& request);

struct RemoteOptions {
  std::string base_url;
  std::string model;
  std::string api_key;
  std::int64_t timeout_ms = 120000;
};

/// Chat-completions style HTTP endpoint; images travel as base64 data URLs.
class RemoteBackend final : public ChatBackend {
 public:
  explicit RemoteBackend(RemoteOptions options);
  std::string complete(const ChatRequest& request) override;
  static nlohmann::json request_body(const ChatRequest& request, const std::string& model);

 private:
  RemoteOptions options_;
};

/// Decorator charging simulated latency to a clock and keeping a log of the
/// requests it forwarded.
class InstrumentedBackend final : public ChatBackend {
 public:
  InstrumentedBackend(std::shared_ptr<ChatBackend> inner, Clock* clock = nullptr,
                      std::int64_t latency_ms = 0);

  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;
  std::size_t request_count() const;

 private:
  std::shared_ptr<ChatBackend> inner_;
  Clock* clock_;
  std::int64_t latency_ms_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> log_;
};

}  // namespace webprobe::agents
