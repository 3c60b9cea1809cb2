#include "agents/backend.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <regex>

#include "agents/tokens.hpp"
#include "common/error.hpp"
#include "common/files.hpp"
#include "common/png.hpp"
#include "common/text.hpp"

namespace webprobe::agents {
namespace {

using nlohmann::json;

std::string image_text(const ChatRequest& request) {
  std::string out;
  for (const auto& p : request.parts) {
    if (p.kind != ContentPart::Kind::image) continue;
    try {
      for (const auto& [k, v] : png::decode(p.png).text) out += k + "=" + v + "\n";
    } catch (const Error&) {
    }
  }
  return out;
}

std::map<std::string, std::string> image_fields(const ChatRequest& request) {
  std::map<std::string, std::string> out;
  for (const auto& p : request.parts) {
    if (p.kind != ContentPart::Kind::image) continue;
    try {
      for (const auto& [k, v] : png::decode(p.png).text) out.emplace(k, v);
    } catch (const Error&) {
    }
  }
  return out;
}

std::string fill_template(std::string response, const ChatRequest& request) {
  if (response.find("{image.") == std::string::npos) return response;
  for (const auto& [k, v] : image_fields(request)) response = text::replace_all(response, "{image." + k + "}", v);
  return response;
}

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const auto& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else {
    for (const auto& s : v) out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  switch (role) {
    case Role::summarizer: return "summarizer";
    case Role::reviser: return "reviser";
    case Role::navigator: return "navigator";
    case Role::planner: return "planner";
    case Role::actor: return "actor";
  }
  return "summarizer";
}

Role parse_role(std::string_view name) {
  for (auto r : {Role::summarizer, Role::reviser, Role::navigator, Role::planner, Role::actor})
    if (to_string(r) == name) return r;
  throw Error(ErrorCode::invalid_argument, "unknown agent role: " + std::string(name));
}

std::string serialize(const ChatRequest& request) {
  std::string out = "role: " + std::string(to_string(request.role)) + "\n";
  char temp[32];
  std::snprintf(temp, sizeof temp, "%.2f", request.temperature);
  out += "temperature: " + std::string(temp) + "\n";
  out += "max_output: " + std::to_string(request.max_output) + "\n";
  out += "--- system\n" + request.system + "\n";
  for (const auto& p : request.parts) {
    if (p.kind == ContentPart::Kind::text) {
      out += "--- text\n" + p.text + "\n";
    } else {
      std::string raw(p.png.begin(), p.png.end());
      out += "--- image/png bytes=" + std::to_string(p.png.size()) + " sha256=" + text::sha256_hex(raw) + "\n";
    }
  }
  return out;
}

std::string request_sha256(const ChatRequest& request) { return text::sha256_hex(serialize(request)); }

std::string request_text(const ChatRequest& request) {
  std::string out = request.system;
  for (const auto& p : request.parts)
    if (p.kind == ContentPart::Kind::text) out += "\n" + p.text;
  return out;
}

std::string complete_with_retry(ChatBackend& backend, const ChatRequest& request) {
  try {
    return backend.complete(request);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::backend_unavailable) throw;
    spdlog::warn("{} request failed, retrying once: {}", to_string(request.role), e.what());
  }
  return backend.complete(request);
}

ScriptedBackend::ScriptedBackend(std::vector<Rule> rules, std::map<Role, std::string> defaults)
    : rules_(std::move(rules)), defaults_(std::move(defaults)) {}

ScriptedBackend ScriptedBackend::from_json(const json& script) {
  std::vector<Rule> rules;
  std::map<Role, std::string> defaults;
  try {
    for (const auto& r : script.value("rules", json::array())) {
      Rule rule;
      if (r.contains("role")) rule.role = parse_role(r.at("role").get<std::string>());
      rule.contains = string_list(r, "contains");
      rule.image_text_contains = string_list(r, "image_text_contains");
      if (r.contains("request_sha256")) rule.sha256 = r.at("request_sha256").get<std::string>();
      rule.strategy = r.value("strategy", "");
      if (!rule.strategy.empty() && rule.strategy != "keyword_state")
        throw Error(ErrorCode::malformed_definition, "unknown script strategy: " + rule.strategy);
      rule.response = r.value("response", "");
      rules.push_back(std::move(rule));
    }
    auto defaults_json = script.value("defaults", json::object());
    for (const auto& [role, response] : defaults_json.items()) defaults[parse_role(role)] = response.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_definition, std::string("malformed agent script: ") + e.what());
  }
  return ScriptedBackend(std::move(rules), std::move(defaults));
}

ScriptedBackend ScriptedBackend::load(const std::filesystem::path& path) {
  try {
    return from_json(json::parse(files::read_text(path)));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::malformed_definition, path.string() + ": " + e.what());
  }
}

std::string ScriptedBackend::complete(const ChatRequest& request) {
  auto body = request_text(request);
  std::optional<std::string> images;
  std::optional<std::string> digest;
  for (const auto& rule : rules_) {
    if (rule.role && *rule.role != request.role) continue;
    bool ok = true;
    for (const auto& needle : rule.contains) ok = ok && body.find(needle) != std::string::npos;
    if (ok && !rule.image_text_contains.empty()) {
      if (!images) images = image_text(request);
      for (const auto& needle : rule.image_text_contains) ok = ok && images->find(needle) != std::string::npos;
    }
    if (ok && rule.sha256) {
      if (!digest) digest = request_sha256(request);
      ok = *digest == *rule.sha256;
    }
    if (!ok) continue;
    if (rule.strategy == "keyword_state") return keyword_state_answer(request);
    return fill_template(rule.response, request);
  }
  if (auto it = defaults_.find(request.role); it != defaults_.end()) return fill_template(it->second, request);
  throw Error(ErrorCode::backend_unavailable,
              "no scripted response for " + std::string(to_string(request.role)) + " request");
}

std::string keyword_state_answer(const ChatRequest& request) {
  static const std::regex state_line(R"(^State (\d+): (.*)$)");
  std::set<std::string> task;
  std::vector<std::pair<int, std::string>> states;
  for (const auto& line : text::split_lines(request_text(request))) {
    std::smatch m;
    if (line.rfind("Task: ", 0) == 0) {
      task = content_tokens(line.substr(6), false);
    } else if (std::regex_match(line, m, state_line)) {
      states.emplace_back(std::stoi(m[1].str()), m[2].str());
    }
  }
  int best = 0;
  std::size_t best_score = 0;
  for (const auto& [id, desc] : states) {
    std::size_t score = 0;
    for (const auto& t : content_tokens(desc, false)) score += task.count(t);
    if (score > best_score || (score == best_score && score > 0 && id < best)) {
      best = id;
      best_score = score;
    }
  }
  return "The task mentions the functionality described by State " + std::to_string(best) +
         ".\nFINAL ANSWER:\nState " + std::to_string(best);
}

RemoteBackend::RemoteBackend(RemoteOptions options) : options_(std::move(options)) {}

json RemoteBackend::request_body(const ChatRequest& request, const std::string& model) {
  json content = json::array();
  for (const auto& p : request.parts) {
    if (p.kind == ContentPart::Kind::text) {
      content.push_back({{"type", "text"}, {"text", p.text}});
    } else {
      content.push_back({{"type", "image_url"},
                         {"image_url", {{"url", "data:image/png;base64," + text::base64_encode(p.png)}}}});
    }
  }
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  messages.push_back({{"role", "user"}, {"content", content}});
  return json{{"model", model},
              {"messages", messages},
              {"temperature", request.temperature},
              {"max_tokens", request.max_output}};
}

std::string RemoteBackend::complete(const ChatRequest& request) {
  const auto& base = options_.base_url;
  auto scheme_end = base.find("://");
  auto path_start = base.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string origin = path_start == std::string::npos ? base : base.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : base.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();

  httplib::Client client(origin);
  auto secs = static_cast<time_t>(options_.timeout_ms / 1000);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  client.set_connection_timeout(10, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) headers.emplace("Authorization", "Bearer " + options_.api_key);

  auto res = client.Post(prefix + "/chat/completions", headers, request_body(request, options_.model).dump(),
                         "application/json");
  if (!res) throw Error(ErrorCode::backend_unavailable, "chat endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw Error(ErrorCode::backend_unavailable, "chat endpoint returned HTTP " + std::to_string(res->status));
  try {
    auto reply = json::parse(res->body);
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string out;
    for (const auto& part : content)
      if (part.value("type", "") == "text") out += part.value("text", "");
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::backend_unavailable, std::string("unexpected chat response: ") + e.what());
  }
}

InstrumentedBackend::InstrumentedBackend(std::shared_ptr<ChatBackend> inner, Clock* clock, std::int64_t latency_ms)
    : inner_(std::move(inner)), clock_(clock), latency_ms_(latency_ms) {}

std::string InstrumentedBackend::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mu_);
    log_.push_back(request);
  }
  if (clock_) clock_->charge(latency_ms_);
  return inner_->complete(request);
}

std::vector<ChatRequest> InstrumentedBackend::requests() const {
  std::lock_guard lock(mu_);
  return log_;
}

std::size_t InstrumentedBackend::request_count() const {
  std::lock_guard lock(mu_);
  return log_.size();
}

}  // namespace webprobe::agents
