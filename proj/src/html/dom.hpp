#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace webprobe::html {

/// A deliberately small DOM: enough structure for action extraction, state
/// fingerprints, positional XPaths and fixture rendering. Parsing is
/// error-tolerant; malformed markup never throws.
class Node {
 public:
  enum class Type { document, element, text, comment, doctype };

  explicit Node(Type type) : type_(type) {}

  Type type() const noexcept { return type_; }
  bool is_element() const noexcept { return type_ == Type::element; }

  const std::string& tag() const noexcept { return tag_; }
  const std::string& data() const noexcept { return data_; }
  const Node* parent() const noexcept { return parent_; }
  const std::vector<std::unique_ptr<Node>>& children() const noexcept { return children_; }
  const std::vector<std::pair<std::string, std::string>>& attributes() const noexcept {
    return attributes_;
  }

  const std::string* attribute(std::string_view name) const;
  bool has_attribute(std::string_view name) const { return attribute(name) != nullptr; }
  void set_attribute(std::string_view name, std::string_view value);
  void remove_attribute(std::string_view name);

  std::vector<const Node*> element_children() const;

 private:
  friend class Parser;
  friend class Document;

  Type type_;
  std::string tag_;   // lower-case tag name for elements
  std::string data_;  // text, comment or doctype payload
  std::vector<std::pair<std::string, std::string>> attributes_;
  std::vector<std::unique_ptr<Node>> children_;
  Node* parent_ = nullptr;
};

class Document {
 public:
  static Document parse(std::string_view markup);

  const Node& root() const { return *root_; }

  /// All elements in document (pre-)order.
  std::vector<const Node*> elements() const;
  const Node* find_by_id(std::string_view id) const;
  /// First element whose `id` or `name` attribute equals `key`.
  const Node* find_by_id_or_name(std::string_view key) const;
  /// Mutable access for renderers that patch attributes before serializing.
  Node* mutable_node(const Node* node) { return const_cast<Node*>(node); }

  std::string serialize() const;

 private:
  explicit Document(std::unique_ptr<Node> root) : root_(std::move(root)) {}
  std::unique_ptr<Node> root_;
};

/// Absolute positional XPath, e.g. /html/body/div[2]/p[1]/a[1]. The html and
/// body steps carry no index; every other step is indexed among same-tag
/// siblings.
std::string xpath_of(const Node& element);

/// Resolves absolute positional XPaths of the form produced by xpath_of
/// (index-less steps mean [1]). Returns nullptr when nothing matches.
const Node* resolve_xpath(const Document& doc, std::string_view xpath);

/// Syntactic check for absolute location paths: /step(/step)* where a step is
/// a name or `*`, optionally followed by a positive index predicate.
bool is_valid_xpath(std::string_view xpath);

/// Rendered text of an element: text descendants outside script/style,
/// whitespace collapsed.
std::string text_content(const Node& node);

bool is_void_element(std::string_view tag);

}  // namespace webprobe::html
