#include "agents/locator.hpp"

#include <map>
#include <regex>

#include "agents/tokens.hpp"
#include "common/error.hpp"
#include "explorer/actions.hpp"
#include "html/dom.hpp"

namespace webprobe::agents {

LocatedElement locate_by_text(std::string_view description, std::string_view markup, double threshold) {
  auto wanted = content_tokens(description);
  if (wanted.empty()) throw Error(ErrorCode::not_found, "element description has no content words");

  auto doc = html::Document::parse(markup);
  std::map<std::string, std::string> labels;  // id -> label text
  for (const auto* el : doc.elements()) {
    if (el->tag() != "label") continue;
    if (const auto* target = el->attribute("for")) labels[*target] += " " + html::text_content(*el);
  }

  LocatedElement best;
  for (const auto& c : explorer::extract_actions(markup)) {
    const auto* el = html::resolve_xpath(doc, c.action.target_xpath);
    if (!el) continue;
    std::string haystack = html::text_content(*el);
    for (auto attr : {"aria-label", "placeholder", "name", "id", "title", "alt", "value"})
      if (const auto* v = el->attribute(attr)) haystack += " " + *v;
    if (const auto* id = el->attribute("id"); id && labels.contains(*id)) haystack += labels[*id];
    auto have = content_tokens(haystack, false);
    std::size_t hits = 0;
    for (const auto& t : wanted) hits += have.count(t);
    double score = static_cast<double>(hits) / static_cast<double>(wanted.size());
    if (score > best.confidence) best = {c.action.target_xpath, score};
  }
  if (best.xpath.empty() || best.confidence < threshold)
    throw Error(ErrorCode::not_found, "no element matches \"" + std::string(description) + "\"");
  return best;
}

LocatedElement TextActor::locate(std::string_view description, const env::PageObservation& observation,
                                 env::Environment&) {
  return locate_by_text(description, observation.html, threshold_);
}

ChatRequest actor_request(std::string_view description, std::span<const std::uint8_t> screenshot,
                          const AgentOptions& options) {
  ChatRequest r;
  r.role = Role::actor;
  r.system = "You locate GUI elements on screenshots.";
  r.temperature = options.temperature;
  r.max_output = options.max_output;
  r.parts.push_back(ContentPart::of_text("Element: " + std::string(description) +
                                         "\nReply with the point to click as (x, y) in screenshot pixels."));
  r.parts.push_back(ContentPart::of_image({screenshot.begin(), screenshot.end()}));
  return r;
}

LocatedElement RemoteActor::locate(std::string_view description, const env::PageObservation& observation,
                                   env::Environment& env) {
  static const std::regex point(R"((\d+)\s*,\s*(\d+))");
  auto reply = complete_with_retry(*backend_, actor_request(description, observation.screenshot, options_));
  auto answer = final_answer(reply).value_or(reply);
  std::smatch m;
  if (!std::regex_search(answer, m, point))
    throw Error(ErrorCode::not_found, "actor reply has no coordinates");
  return {env.element_at(std::stoi(m[1].str()), std::stoi(m[2].str())), 1.0};
}

}  // namespace webprobe::agents
