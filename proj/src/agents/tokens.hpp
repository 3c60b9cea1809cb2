#pragma once

#include <set>
#include <string>
#include <string_view>

namespace webprobe::agents {

/// Lower-cased alphanumeric tokens minus English stopwords, and minus words
/// naming widget roles ("button", "field", ...) when `drop_role_words`.
std::set<std::string> content_tokens(std::string_view text, bool drop_role_words = true);

}  // namespace webprobe::agents
