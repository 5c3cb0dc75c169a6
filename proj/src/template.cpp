#include "template.hpp"

#include <memory>
#include <stdexcept>

namespace subsum::codegen::tmpl {
namespace {

struct Node {
  enum class Kind { text, var, section, inverted } kind = Kind::text;
  std::string text;  // literal text or tag name
  std::vector<Node> children;
};

struct Tag {
  char sigil = 0;  // 0 for a variable, else '#', '^' or '/'
  std::string name;
};

Tag parse_tag(std::string_view inner) {
  Tag t;
  if (!inner.empty() && (inner[0] == '#' || inner[0] == '^' || inner[0] == '/')) {
    t.sigil = inner[0];
    inner.remove_prefix(1);
  }
  while (!inner.empty() && inner.front() == ' ') inner.remove_prefix(1);
  while (!inner.empty() && inner.back() == ' ') inner.remove_suffix(1);
  t.name = std::string(inner);
  return t;
}

class Builder {
 public:
  std::vector<Node> build(std::string_view src) {
    stack_.push_back(&root_);
    std::size_t pos = 0;
    while (pos < src.size()) {
      auto nl = src.find('\n', pos);
      std::size_t end = nl == std::string_view::npos ? src.size() : nl + 1;
      line(src.substr(pos, end - pos));
      pos = end;
    }
    if (stack_.size() != 1) throw std::logic_error("template: unclosed section '" + open_.back() + "'");
    return std::move(root_.children);
  }

 private:
  void line(std::string_view l) {
    // Standalone section tag: the whole line disappears.
    std::string_view trimmed = l;
    while (!trimmed.empty() && (trimmed.front() == ' ' || trimmed.front() == '\t')) trimmed.remove_prefix(1);
    while (!trimmed.empty() && (trimmed.back() == '\n' || trimmed.back() == ' ' || trimmed.back() == '\r')) {
      trimmed.remove_suffix(1);
    }
    if (trimmed.size() > 4 && trimmed.substr(0, 2) == "{{" && trimmed.substr(trimmed.size() - 2) == "}}" &&
        trimmed.find("{{", 2) == std::string_view::npos) {
      Tag t = parse_tag(trimmed.substr(2, trimmed.size() - 4));
      if (t.sigil != 0) {
        tag(t);
        return;
      }
    }
    std::size_t pos = 0;
    while (pos < l.size()) {
      auto open = l.find("{{", pos);
      if (open == std::string_view::npos) {
        text(l.substr(pos));
        return;
      }
      text(l.substr(pos, open - pos));
      auto close = l.find("}}", open + 2);
      if (close == std::string_view::npos) throw std::logic_error("template: unterminated tag");
      tag(parse_tag(l.substr(open + 2, close - open - 2)));
      pos = close + 2;
    }
  }

  void text(std::string_view t) {
    if (t.empty()) return;
    auto& kids = stack_.back()->children;
    if (!kids.empty() && kids.back().kind == Node::Kind::text) {
      kids.back().text += t;
    } else {
      kids.push_back(Node{Node::Kind::text, std::string(t), {}});
    }
  }

  void tag(const Tag& t) {
    auto& kids = stack_.back()->children;
    switch (t.sigil) {
      case 0:
        kids.push_back(Node{Node::Kind::var, t.name, {}});
        break;
      case '#':
      case '^':
        kids.push_back(Node{t.sigil == '#' ? Node::Kind::section : Node::Kind::inverted, t.name, {}});
        stack_.push_back(&kids.back());
        open_.push_back(t.name);
        break;
      case '/':
        if (open_.empty() || open_.back() != t.name) {
          throw std::logic_error("template: mismatched close '" + t.name + "'");
        }
        stack_.pop_back();
        open_.pop_back();
        break;
    }
  }

  Node root_;
  std::vector<Node*> stack_;
  std::vector<std::string> open_;
};

class Renderer {
 public:
  explicit Renderer(const Dict& root) { ctx_.push_back(&root); }

  void render(const std::vector<Node>& nodes, std::string& out) {
    for (const auto& n : nodes) {
      switch (n.kind) {
        case Node::Kind::text:
          out += n.text;
          break;
        case Node::Kind::var: {
          const Value& v = lookup(n.text);
          if (auto s = std::get_if<std::string>(&v.v)) {
            out += *s;
          } else if (auto b = std::get_if<bool>(&v.v)) {
            out += *b ? "true" : "false";
          } else {
            throw std::logic_error("template: '" + n.text + "' is a list");
          }
          break;
        }
        case Node::Kind::section:
        case Node::Kind::inverted: {
          const Value& v = lookup(n.text);
          const bool inverted = n.kind == Node::Kind::inverted;
          if (auto l = std::get_if<List>(&v.v)) {
            if (inverted) {
              if (l->empty()) render(n.children, out);
            } else {
              for (const auto& item : *l) {
                ctx_.push_back(&item);
                render(n.children, out);
                ctx_.pop_back();
              }
            }
          } else {
            bool truthy = std::holds_alternative<bool>(v.v) ? std::get<bool>(v.v)
                                                            : !std::get<std::string>(v.v).empty();
            if (truthy != inverted) render(n.children, out);
          }
          break;
        }
      }
    }
  }

 private:
  const Value& lookup(const std::string& name) const {
    for (auto it = ctx_.rbegin(); it != ctx_.rend(); ++it) {
      auto f = (*it)->find(name);
      if (f != (*it)->end()) return f->second;
    }
    throw std::logic_error("template: unknown name '" + name + "'");
  }

  std::vector<const Dict*> ctx_;
};

}  // namespace

std::string render(std::string_view tmpl, const Dict& data) {
  auto nodes = Builder{}.build(tmpl);
  std::string out;
  Renderer(data).render(nodes, out);
  return out;
}

}  // namespace subsum::codegen::tmpl
