#pragma once

#include <string>
#include <string_view>

#include "agents/backend.hpp"
#include "agents/prompts.hpp"
#include "env/environment.hpp"

namespace webprobe::agents {

struct LocatedElement {
  std::string xpath;
  double confidence = 0.0;
};

/// Grounds a planner's element description on the current page.
class Actor {
 public:
  virtual ~Actor() = default;
  /// Throws Error{not_found} when nothing matches.
  virtual LocatedElement locate(std::string_view description, const env::PageObservation& observation,
                                env::Environment& env) = 0;
};

/// Scores every interactable element by |D ∩ E| / |D|, where D are the
/// description's content tokens and E the tokens of the element's text and
/// accessible attributes. Best score at or above `threshold` wins; ties go
/// to document order. Throws Error{not_found}.
LocatedElement locate_by_text(std::string_view description, std::string_view html, double threshold = 0.5);

class TextActor final : public Actor {
 public:
  explicit TextActor(double threshold = 0.5) : threshold_(threshold) {}
  LocatedElement locate(std::string_view description, const env::PageObservation& observation,
                        env::Environment& env) override;

 private:
  double threshold_;
};

ChatRequest actor_request(std::string_view description, std::span<const std::uint8_t> screenshot,
                          const AgentOptions& options = {});

/// Asks a grounding model for a click point and maps it to the deepest
/// interactable element there via Environment::element_at.
class RemoteActor final : public Actor {
 public:
  RemoteActor(ChatBackend& backend, AgentOptions options = {}) : backend_(&backend), options_(options) {}
  LocatedElement locate(std::string_view description, const env::PageObservation& observation,
                        env::Environment& env) override;

 private:
  ChatBackend* backend_;
  AgentOptions options_;
};

}  // namespace webprobe::agents
