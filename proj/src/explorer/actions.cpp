#include "explorer/actions.hpp"

#include <set>

#include "common/text.hpp"
#include "html/dom.hpp"

namespace webprobe::explorer {
namespace {

using env::ActionKind;

bool clickable_input_type(std::string_view type) {
  return type == "submit" || type == "button" || type == "image" || type == "reset" ||
         type == "checkbox" || type == "radio";
}

bool clickable_role(const std::string* role) {
  if (!role) return false;
  return *role == "button" || *role == "link" || *role == "tab" || *role == "menuitem" ||
         *role == "checkbox" || *role == "option";
}

std::string field_key_of(const html::Node& n) {
  for (auto attr : {"name", "id", "placeholder", "aria-label"})
    if (const auto* v = n.attribute(attr); v && !v->empty()) return *v;
  return {};
}

}  // namespace

std::uint64_t action_signature(ActionKind kind, std::string_view xpath) {
  std::string key(env::to_string(kind));
  key += '|';
  key += xpath;
  return text::fnv1a64(key);
}

std::vector<ActionCandidate> extract_actions(std::string_view markup) {
  std::vector<ActionCandidate> out;
  if (markup.empty()) return out;
  auto doc = html::Document::parse(markup);
  std::set<std::uint64_t> seen;

  for (const auto* el : doc.elements()) {
    if (el->has_attribute("disabled")) continue;
    const auto& tag = el->tag();
    const auto* type_attr = el->attribute("type");
    std::string type = type_attr ? text::to_lower(*type_attr) : "";

    ActionCandidate c;
    bool emit = true;
    if (tag == "a") {
      emit = el->has_attribute("href") || el->has_attribute("onclick");
      c.action.kind = ActionKind::click;
    } else if (tag == "button") {
      c.action.kind = ActionKind::click;
    } else if (tag == "input") {
      if (type == "hidden") continue;
      c.action.kind = clickable_input_type(type) ? ActionKind::click : ActionKind::input;
    } else if (tag == "textarea") {
      c.action.kind = ActionKind::input;
    } else if (tag == "select") {
      c.action.kind = ActionKind::select;
      for (const auto* opt : el->element_children()) {
        if (opt->tag() != "option") continue;
        const auto* v = opt->attribute("value");
        c.options.push_back(v ? *v : html::text_content(*opt));
      }
    } else if (el->has_attribute("onclick") || clickable_role(el->attribute("role"))) {
      c.action.kind = ActionKind::click;
    } else {
      emit = false;
    }
    if (!emit) continue;

    c.action.target_xpath = html::xpath_of(*el);
    if (c.action.kind == ActionKind::click) {
      c.action.target_text = tag == "input" ? (el->attribute("value") ? *el->attribute("value") : "")
                                            : html::text_content(*el);
    }
    if (c.action.kind != ActionKind::click) c.field_key = field_key_of(*el);
    c.signature = action_signature(c.action.kind, c.action.target_xpath);
    if (!seen.insert(c.signature).second) continue;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace webprobe::explorer
