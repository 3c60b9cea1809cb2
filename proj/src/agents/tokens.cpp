#include "agents/tokens.hpp"

#include <array>
#include <algorithm>

#include "common/text.hpp"

namespace webprobe::agents {
namespace {

constexpr std::array<std::string_view, 44> kStopwords = {
    "a",    "an",   "the",  "on",   "of",    "to",   "in",   "into", "for",  "with", "and",
    "or",   "at",   "from", "by",   "this",  "that", "it",   "its",  "is",   "be",   "as",
    "then", "new",  "my",   "your", "their", "all",  "any",  "some", "page", "please", "i",
    "we",   "you",  "me",   "us",   "do",    "does", "should", "can", "will", "up",   "out"};

constexpr std::array<std::string_view, 20> kRoleWords = {
    "button", "buttons", "link",  "links",  "field",   "fields", "input",
    "box",    "textbox", "text",  "dropdown", "menu",  "select", "option",
    "checkbox", "tab",   "icon",  "element", "control", "item"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& words, std::string_view w) {
  return std::find(words.begin(), words.end(), w) != words.end();
}

}  // namespace

std::set<std::string> content_tokens(std::string_view text, bool drop_role_words) {
  std::set<std::string> out;
  for (auto& t : text::tokenize(text)) {
    if (in(kStopwords, t)) continue;
    if (drop_role_words && in(kRoleWords, t)) continue;
    out.insert(std::move(t));
  }
  return out;
}

}  // namespace webprobe::agents
