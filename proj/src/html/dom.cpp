#include "html/dom.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>

#include "common/text.hpp"

namespace webprobe::html {
namespace {

constexpr std::array kVoidElements = {"area", "base", "br",   "col",   "embed", "hr",  "img",
                                      "input", "link", "meta", "source", "track", "wbr"};
constexpr std::array kRawTextElements = {"script", "style", "textarea", "title"};

bool in(std::string_view tag, const auto& list) {
  return std::find(list.begin(), list.end(), tag) != list.end();
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x110000) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out.push_back(s[i]);
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back('&');
      continue;
    }
    auto name = s.substr(i + 1, semi - i - 1);
    bool ok = true;
    if (name == "amp") out.push_back('&');
    else if (name == "lt") out.push_back('<');
    else if (name == "gt") out.push_back('>');
    else if (name == "quot") out.push_back('"');
    else if (name == "apos") out.push_back('\'');
    else if (name == "nbsp") append_utf8(out, 0xA0);
    else if (name.size() > 1 && name[0] == '#') {
      try {
        unsigned long cp = (name[1] == 'x' || name[1] == 'X')
                               ? std::stoul(std::string(name.substr(2)), nullptr, 16)
                               : std::stoul(std::string(name.substr(1)), nullptr, 10);
        append_utf8(out, cp);
      } catch (...) {
        ok = false;
      }
    } else {
      ok = false;
    }
    if (ok) {
      i = semi;
    } else {
      out.push_back('&');
    }
  }
  return out;
}

std::string escape(std::string_view s, bool attribute) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) out += "&quot;";
        else out.push_back(c);
        break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Tags whose start implicitly closes an open element of the listed kinds,
// bounded by the listed scope elements.
struct ImpliedClose {
  std::string_view opening;
  std::vector<std::string_view> closes;
  std::vector<std::string_view> scope;
};

const std::vector<ImpliedClose>& implied_closes() {
  static const std::vector<ImpliedClose> rules = {
      {"li", {"li"}, {"ul", "ol"}},
      {"option", {"option"}, {"select", "datalist"}},
      {"tr", {"tr", "td", "th"}, {"table", "tbody", "thead", "tfoot"}},
      {"td", {"td", "th"}, {"tr", "table"}},
      {"th", {"td", "th"}, {"tr", "table"}},
      {"p", {"p"}, {"div", "section", "article", "main", "body", "td", "li", "form"}},
      {"div", {"p"}, {"div", "section", "article", "main", "body", "td", "li", "form"}},
      {"ul", {"p"}, {"div", "section", "article", "main", "body", "td", "li", "form"}},
      {"table", {"p"}, {"div", "section", "article", "main", "body", "td", "li", "form"}},
      {"form", {"p"}, {"div", "section", "article", "main", "body", "td", "li"}},
  };
  return rules;
}

void serialize_into(const Node& node, std::string& out) {
  switch (node.type()) {
    case Node::Type::document:
      for (const auto& c : node.children()) serialize_into(*c, out);
      return;
    case Node::Type::doctype:
      out += "<!";
      out += node.data();
      out += ">";
      return;
    case Node::Type::comment:
      out += "<!--";
      out += node.data();
      out += "-->";
      return;
    case Node::Type::text: {
      const Node* p = node.parent();
      bool raw = p && p->is_element() && in(p->tag(), kRawTextElements) && p->tag() != "textarea" &&
                 p->tag() != "title";
      out += raw ? node.data() : escape(node.data(), false);
      return;
    }
    case Node::Type::element:
      out += '<';
      out += node.tag();
      for (const auto& [k, v] : node.attributes()) {
        out += ' ';
        out += k;
        out += "=\"";
        out += escape(v, true);
        out += '"';
      }
      out += '>';
      if (is_void_element(node.tag())) return;
      for (const auto& c : node.children()) serialize_into(*c, out);
      out += "</";
      out += node.tag();
      out += '>';
      return;
  }
}

void collect_text(const Node& node, std::string& out) {
  if (node.type() == Node::Type::text) {
    out += node.data();
    out += ' ';
    return;
  }
  if (node.is_element() && (node.tag() == "script" || node.tag() == "style")) return;
  for (const auto& c : node.children()) collect_text(*c, out);
}

}  // namespace

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::unique_ptr<Node> run() {
    auto root = std::make_unique<Node>(Node::Type::document);
    stack_.push_back(root.get());
    while (pos_ < src_.size()) {
      if (src_[pos_] == '<') {
        if (starts_with("<!--")) {
          comment();
        } else if (starts_with("<!") || starts_with("<?")) {
          doctype();
        } else if (starts_with("</")) {
          end_tag();
        } else if (pos_ + 1 < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_ + 1]))) {
          start_tag();
        } else {
          add_text("<");
          ++pos_;
        }
      } else {
        auto next = src_.find('<', pos_);
        if (next == std::string_view::npos) next = src_.size();
        add_text(decode_entities(src_.substr(pos_, next - pos_)));
        pos_ = next;
      }
    }
    return root;
  }

 private:
  bool starts_with(std::string_view p) const { return src_.substr(pos_, p.size()) == p; }

  Node* current() { return stack_.back(); }

  Node* append(std::unique_ptr<Node> node) {
    node->parent_ = current();
    auto* raw = node.get();
    current()->children_.push_back(std::move(node));
    return raw;
  }

  void add_text(std::string text) {
    if (text.empty()) return;
    auto& kids = current()->children_;
    if (!kids.empty() && kids.back()->type() == Node::Type::text) {
      kids.back()->data_ += text;
      return;
    }
    auto n = std::make_unique<Node>(Node::Type::text);
    n->data_ = std::move(text);
    append(std::move(n));
  }

  void comment() {
    auto end = src_.find("-->", pos_ + 4);
    auto stop = end == std::string_view::npos ? src_.size() : end;
    auto n = std::make_unique<Node>(Node::Type::comment);
    n->data_ = std::string(src_.substr(pos_ + 4, stop - pos_ - 4));
    append(std::move(n));
    pos_ = end == std::string_view::npos ? src_.size() : end + 3;
  }

  void doctype() {
    auto end = src_.find('>', pos_);
    auto stop = end == std::string_view::npos ? src_.size() : end;
    if (src_[pos_ + 1] == '!') {
      auto n = std::make_unique<Node>(Node::Type::doctype);
      n->data_ = std::string(src_.substr(pos_ + 2, stop - pos_ - 2));
      append(std::move(n));
    }
    pos_ = end == std::string_view::npos ? src_.size() : end + 1;
  }

  std::string read_name() {
    std::size_t b = pos_;
    while (pos_ < src_.size() && is_name_char(src_[pos_])) ++pos_;
    return text::to_lower(src_.substr(b, pos_ - b));
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  void end_tag() {
    pos_ += 2;
    auto name = read_name();
    auto gt = src_.find('>', pos_);
    pos_ = gt == std::string_view::npos ? src_.size() : gt + 1;
    if (name.empty()) return;
    for (std::size_t i = stack_.size(); i-- > 1;) {
      if (stack_[i]->tag() == name) {
        stack_.resize(i);
        return;
      }
    }
    // Stray end tag: ignored.
  }

  void apply_implied_closes(std::string_view tag) {
    for (const auto& rule : implied_closes()) {
      if (rule.opening != tag) continue;
      for (std::size_t i = stack_.size(); i-- > 1;) {
        const auto& open = stack_[i]->tag();
        if (in(open, rule.scope)) break;
        if (in(open, rule.closes)) {
          stack_.resize(i);
          break;
        }
      }
    }
  }

  void start_tag() {
    ++pos_;
    auto n = std::make_unique<Node>(Node::Type::element);
    n->tag_ = read_name();
    bool self_closing = false;
    while (pos_ < src_.size()) {
      skip_space();
      if (pos_ >= src_.size()) break;
      char c = src_[pos_];
      if (c == '>') {
        ++pos_;
        break;
      }
      if (c == '/') {
        self_closing = true;
        ++pos_;
        continue;
      }
      std::size_t b = pos_;
      while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
             src_[pos_] != '=' && src_[pos_] != '>' && src_[pos_] != '/')
        ++pos_;
      auto key = text::to_lower(src_.substr(b, pos_ - b));
      if (key.empty()) {
        ++pos_;
        continue;
      }
      skip_space();
      std::string value;
      if (pos_ < src_.size() && src_[pos_] == '=') {
        ++pos_;
        skip_space();
        if (pos_ < src_.size() && (src_[pos_] == '"' || src_[pos_] == '\'')) {
          char q = src_[pos_++];
          auto close = src_.find(q, pos_);
          if (close == std::string_view::npos) close = src_.size();
          value = decode_entities(src_.substr(pos_, close - pos_));
          pos_ = std::min(close + 1, src_.size());
        } else {
          std::size_t vb = pos_;
          while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_])) &&
                 src_[pos_] != '>')
            ++pos_;
          value = decode_entities(src_.substr(vb, pos_ - vb));
        }
      }
      if (!n->has_attribute(key)) n->attributes_.emplace_back(std::move(key), std::move(value));
    }

    std::string tag = n->tag_;
    apply_implied_closes(tag);
    Node* el = append(std::move(n));
    if (is_void_element(tag) || self_closing) return;

    if (in(tag, kRawTextElements)) {
      std::string closing = "</" + tag;
      std::size_t end = pos_;
      while (true) {
        end = src_.find("</", end);
        if (end == std::string_view::npos) break;
        if (text::to_lower(src_.substr(end, closing.size())) == closing) break;
        end += 2;
      }
      auto stop = end == std::string_view::npos ? src_.size() : end;
      auto body = src_.substr(pos_, stop - pos_);
      if (!body.empty()) {
        auto t = std::make_unique<Node>(Node::Type::text);
        t->data_ = (tag == "script" || tag == "style") ? std::string(body) : decode_entities(body);
        t->parent_ = el;
        el->children_.push_back(std::move(t));
      }
      if (end == std::string_view::npos) {
        pos_ = src_.size();
      } else {
        auto gt = src_.find('>', end);
        pos_ = gt == std::string_view::npos ? src_.size() : gt + 1;
      }
      return;
    }
    stack_.push_back(el);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Node*> stack_;
};

const std::string* Node::attribute(std::string_view name) const {
  for (const auto& [k, v] : attributes_)
    if (k == name) return &v;
  return nullptr;
}

void Node::set_attribute(std::string_view name, std::string_view value) {
  for (auto& [k, v] : attributes_) {
    if (k == name) {
      v = value;
      return;
    }
  }
  attributes_.emplace_back(std::string(name), std::string(value));
}

void Node::remove_attribute(std::string_view name) {
  std::erase_if(attributes_, [&](const auto& kv) { return kv.first == name; });
}

std::vector<const Node*> Node::element_children() const {
  std::vector<const Node*> out;
  for (const auto& c : children_)
    if (c->is_element()) out.push_back(c.get());
  return out;
}

Document Document::parse(std::string_view markup) { return Document(Parser(markup).run()); }

std::vector<const Node*> Document::elements() const {
  std::vector<const Node*> out;
  std::vector<const Node*> stack{root_.get()};
  while (!stack.empty()) {
    const Node* n = stack.back();
    stack.pop_back();
    if (n->is_element()) out.push_back(n);
    const auto& kids = n->children();
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.push_back(it->get());
  }
  return out;
}

const Node* Document::find_by_id(std::string_view id) const {
  for (const Node* n : elements()) {
    const auto* v = n->attribute("id");
    if (v && *v == id) return n;
  }
  return nullptr;
}

const Node* Document::find_by_id_or_name(std::string_view key) const {
  for (const Node* n : elements()) {
    const auto* id = n->attribute("id");
    const auto* name = n->attribute("name");
    if ((id && *id == key) || (name && *name == key)) return n;
  }
  return nullptr;
}

std::string Document::serialize() const {
  std::string out;
  serialize_into(*root_, out);
  return out;
}

std::string xpath_of(const Node& element) {
  std::vector<std::string> steps;
  for (const Node* n = &element; n && n->is_element(); n = n->parent()) {
    const auto& tag = n->tag();
    if (tag == "html" || tag == "body") {
      steps.push_back(tag);
      continue;
    }
    int index = 1;
    if (const Node* p = n->parent()) {
      for (const auto& sib : p->children()) {
        if (sib.get() == n) break;
        if (sib->is_element() && sib->tag() == tag) ++index;
      }
    }
    steps.push_back(tag + "[" + std::to_string(index) + "]");
  }
  std::string out;
  for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
    out += '/';
    out += *it;
  }
  return out;
}

bool is_valid_xpath(std::string_view xpath) {
  static const std::regex pattern(R"(^(/([A-Za-z][A-Za-z0-9_-]*|\*)(\[[1-9][0-9]*\])?)+$)");
  return std::regex_match(xpath.begin(), xpath.end(), pattern);
}

const Node* resolve_xpath(const Document& doc, std::string_view xpath) {
  if (!is_valid_xpath(xpath)) return nullptr;
  const Node* cur = &doc.root();
  std::size_t pos = 1;
  while (pos <= xpath.size()) {
    auto next = xpath.find('/', pos);
    if (next == std::string_view::npos) next = xpath.size();
    auto step = xpath.substr(pos, next - pos);
    std::string_view name = step;
    int index = 1;
    if (auto br = step.find('['); br != std::string_view::npos) {
      name = step.substr(0, br);
      index = std::stoi(std::string(step.substr(br + 1, step.size() - br - 2)));
    }
    auto lname = text::to_lower(name);
    const Node* found = nullptr;
    int seen = 0;
    for (const auto& c : cur->children()) {
      if (!c->is_element()) continue;
      if (lname != "*" && c->tag() != lname) continue;
      if (++seen == index) {
        found = c.get();
        break;
      }
    }
    if (!found) return nullptr;
    cur = found;
    pos = next + 1;
  }
  return cur == &doc.root() ? nullptr : cur;
}

std::string text_content(const Node& node) {
  std::string raw;
  collect_text(node, raw);
  return text::collapse_whitespace(raw);
}

bool is_void_element(std::string_view tag) { return in(tag, kVoidElements); }

}  // namespace webprobe::html
