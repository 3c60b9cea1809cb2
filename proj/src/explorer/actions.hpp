#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "env/types.hpp"

namespace webprobe::explorer {

struct ActionCandidate {
  env::GuiAction action;  // value unset for input/select kinds
  std::uint64_t signature = 0;
  std::string field_key;              // name / id / placeholder of form controls
  std::vector<std::string> options;   // select options, in document order
};

std::uint64_t action_signature(env::ActionKind kind, std::string_view xpath);

/// Interactable elements of a page in document order, one candidate per
/// (kind, xpath). Form inputs become input/select candidates; links,
/// buttons and elements with click handlers become clicks.
std::vector<ActionCandidate> extract_actions(std::string_view html);

}  // namespace webprobe::explorer
