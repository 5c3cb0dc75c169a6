#include "subsum/dsl.hpp"

#include <charconv>
#include <limits>
#include <sstream>

namespace subsum::dsl {
namespace {

enum class Tok { ident, nat, string, lbrace, rbrace, semi, colon, dot, arrow, end };

std::string_view describe(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::nat: return "number";
    case Tok::string: return "string";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::semi: return "';'";
    case Tok::colon: return "':'";
    case Tok::dot: return "'.'";
    case Tok::arrow: return "'->'";
    case Tok::end: return "end of input";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::end;
  std::string text;  // identifier/number text, or decoded string value
  SourceSpan span;
};

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<ParseError>& errors) : src_(src), errors_(errors) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      if (pos_ >= src_.size()) {
        mark();
        out.push_back(Token{Tok::end, {}, here(pos_, pos_)});
        return out;
      }
      if (auto t = next()) out.push_back(std::move(*t));
    }
  }

 private:
  SourceSpan here(std::size_t start, std::size_t end) const {
    return SourceSpan{start, end, start_line_, start_col_};
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(src_[pos_]) & 0xC0) != 0x80) {
      ++col_;  // count code points, not continuation bytes
    }
    ++pos_;
  }

  void mark() {
    start_line_ = line_;
    start_col_ = col_;
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  static bool ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

  std::optional<Token> next() {
    mark();
    const std::size_t start = pos_;
    const char c = src_[pos_];
    auto single = [&](Tok kind) {
      advance();
      return Token{kind, {}, here(start, pos_)};
    };
    switch (c) {
      case '{': return single(Tok::lbrace);
      case '}': return single(Tok::rbrace);
      case ';': return single(Tok::semi);
      case ':': return single(Tok::colon);
      case '.': return single(Tok::dot);
      default: break;
    }
    if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
      advance();
      advance();
      return Token{Tok::arrow, {}, here(start, pos_)};
    }
    if (ident_start(c)) {
      while (pos_ < src_.size() && ident_char(src_[pos_])) advance();
      return Token{Tok::ident, std::string(src_.substr(start, pos_ - start)), here(start, pos_)};
    }
    // A signed literal lexes as one number so negative times reach V7.
    const bool negative = c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] >= '0' && src_[pos_ + 1] <= '9';
    if ((c >= '0' && c <= '9') || negative) {
      if (negative) advance();
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') advance();
      return Token{Tok::nat, std::string(src_.substr(start, pos_ - start)), here(start, pos_)};
    }
    if (c == '"') return string_literal(start);

    // Consume one whole UTF-8 sequence so the error points at a character.
    advance();
    while (pos_ < src_.size() && (static_cast<unsigned char>(src_[pos_]) & 0xC0) == 0x80) ++pos_;
    errors_.push_back(ParseError{here(start, pos_),
                                 "unexpected character '" +
                                     std::string(src_.substr(start, pos_ - start)) + "'",
                                 {}});
    return std::nullopt;
  }

  std::optional<Token> string_literal(std::size_t start) {
    advance();  // opening quote
    std::string value;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return Token{Tok::string, std::move(value), here(start, pos_)};
      }
      if (c == '\n') break;
      if (c == '\\') {
        const std::size_t esc = pos_;
        advance();
        if (pos_ >= src_.size()) break;
        char e = src_[pos_];
        switch (e) {
          case '"': value += '"'; break;
          case '\\': value += '\\'; break;
          case 'n': value += '\n'; break;
          case 't': value += '\t'; break;
          default:
            errors_.push_back(ParseError{SourceSpan{esc, pos_ + 1, line_, col_ - 1},
                                         std::string("unknown escape sequence '\\") + e + "'",
                                         {}});
            break;
        }
        advance();
        continue;
      }
      value += c;
      advance();
    }
    errors_.push_back(ParseError{here(start, pos_), "unterminated string literal", {"'\"'"}});
    return std::nullopt;
  }

  std::string_view src_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
  std::uint32_t start_line_ = 1;
  std::uint32_t start_col_ = 1;
};

struct SyntaxError {
  ParseError error;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::vector<ParseError>& errors)
      : toks_(std::move(tokens)), errors_(errors) {}

  std::optional<SystemModel> file() {
    SystemModel model;
    try {
      const auto& kw = expect_keyword("system");
      model.span = kw.span;
      model.name = expect(Tok::ident).text;
      if (peek().kind == Tok::string) model.description = take().text;
      expect(Tok::lbrace);
    } catch (const SyntaxError& e) {
      errors_.push_back(e.error);
      return std::nullopt;
    }

    while (peek().kind != Tok::rbrace && peek().kind != Tok::end) {
      const std::size_t before = pos_;
      try {
        item(model);
      } catch (const SyntaxError& e) {
        errors_.push_back(e.error);
        synchronize();
        if (pos_ == before) ++pos_;
      }
    }
    try {
      expect(Tok::rbrace);
      if (peek().kind != Tok::end) {
        fail(peek(), "unexpected input after end of system", {describe(Tok::end)});
      }
    } catch (const SyntaxError& e) {
      errors_.push_back(e.error);
    }
    return model;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }

  const Token& take() {
    const Token& t = toks_[pos_];
    if (t.kind != Tok::end) ++pos_;
    return t;
  }

  [[noreturn]] void fail(const Token& at, std::string message, std::vector<std::string_view> expected) {
    ParseError err{at.span, std::move(message), {}};
    for (auto e : expected) err.expected.emplace_back(e);
    throw SyntaxError{std::move(err)};
  }

  static std::string found(const Token& t) {
    if (t.kind == Tok::ident) return "'" + t.text + "'";
    if (t.kind == Tok::nat) return "number " + t.text;
    return std::string(describe(t.kind));
  }

  const Token& expect(Tok kind) {
    if (peek().kind != kind) {
      fail(peek(), "expected " + std::string(describe(kind)) + ", found " + found(peek()),
           {describe(kind)});
    }
    return take();
  }

  const Token& expect_keyword(std::string_view kw) {
    if (peek().kind != Tok::ident || peek().text != kw) {
      fail(peek(), "expected '" + std::string(kw) + "', found " + found(peek()), {kw});
    }
    return take();
  }

  std::optional<std::string> opt_string() {
    if (peek().kind == Tok::string) return take().text;
    return std::nullopt;
  }

  template <typename Int>
  Int number(const Token& t) {
    Int value{};
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size()) {
      fail(t, "number " + t.text + " is out of range", {});
    }
    return value;
  }

  LineRef qname() {
    const Token& m = expect(Tok::ident);
    LineRef ref;
    ref.module = m.text;
    SourceSpan span = m.span;
    expect(Tok::dot);
    const Token& l = expect(Tok::ident);
    ref.line = l.text;
    span.end = l.span.end;
    ref.span = span;
    return ref;
  }

  void item(SystemModel& model) {
    const Token& head = peek();
    if (head.kind != Tok::ident) {
      fail(head, "expected a declaration, found " + found(head),
           {"'type'", "'module'", "'wire'", "'suppress'", "'inhibit'"});
    }
    if (head.text == "type") {
      DataTypeDecl t;
      t.span = take().span;
      t.name = expect(Tok::ident).text;
      t.description = opt_string();
      expect(Tok::semi);
      model.data_types.push_back(std::move(t));
    } else if (head.text == "module") {
      module(model);
    } else if (head.text == "wire") {
      Wire w;
      w.span = take().span;
      w.source = qname();
      expect(Tok::arrow);
      w.sink = qname();
      expect(Tok::semi);
      model.wires.push_back(std::move(w));
    } else if (head.text == "suppress" || head.text == "inhibit") {
      Modifier m;
      m.kind = head.text == "suppress" ? ModifierKind::suppressor : ModifierKind::inhibitor;
      m.span = take().span;
      m.target = qname();
      expect_keyword("by");
      m.controlled_by = qname();
      expect_keyword("for");
      m.time_ms = number<std::int64_t>(expect(Tok::nat));
      expect_keyword("ms");
      expect(Tok::semi);
      model.modifiers.push_back(std::move(m));
    } else {
      fail(head, "unknown declaration '" + head.text + "'",
           {"'type'", "'module'", "'wire'", "'suppress'", "'inhibit'"});
    }
  }

  void module(SystemModel& model) {
    ModuleDecl m;
    m.span = take().span;
    m.name = expect(Tok::ident).text;
    expect_keyword("layer");
    m.layer = number<std::uint32_t>(expect(Tok::nat));
    m.description = opt_string();
    expect(Tok::lbrace);
    // The module is kept even when some of its lines fail to parse.
    while (peek().kind != Tok::rbrace && peek().kind != Tok::end) {
      const std::size_t before = pos_;
      try {
        line(m);
      } catch (const SyntaxError& e) {
        errors_.push_back(e.error);
        synchronize();
        if (pos_ == before) ++pos_;
      }
    }
    model.modules.push_back(std::move(m));
    expect(Tok::rbrace);
  }

  void line(ModuleDecl& m) {
    const Token& dir = peek();
    if (dir.kind != Tok::ident || (dir.text != "in" && dir.text != "out")) {
      fail(dir, "expected a line declaration, found " + found(dir), {"'in'", "'out'", "'}'"});
    }
    const bool input = dir.text == "in";
    LineDecl l;
    l.span = take().span;
    l.name = expect(Tok::ident).text;
    expect(Tok::colon);
    l.data_type = expect(Tok::ident).text;
    l.description = opt_string();
    expect(Tok::semi);
    (input ? m.inputs : m.outputs).push_back(std::move(l));
  }

  // Skip to just past the next ';' at this nesting level, or to (not past)
  // the '}' closing the enclosing block.
  void synchronize() {
    int depth = 0;
    while (peek().kind != Tok::end) {
      switch (peek().kind) {
        case Tok::semi:
          take();
          if (depth == 0) return;
          break;
        case Tok::lbrace:
          ++depth;
          take();
          break;
        case Tok::rbrace:
          if (depth == 0) return;
          --depth;
          take();
          if (depth == 0) return;
          break;
        default:
          take();
      }
    }
  }

  std::vector<Token> toks_;
  std::vector<ParseError>& errors_;
  std::size_t pos_ = 0;
};

void describe_suffix(std::ostringstream& os, const std::optional<std::string>& desc) {
  if (desc) os << ' ' << quote(*desc);
}

}  // namespace

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '"';
  return out;
}

SourceSpan span_at(std::string_view text, std::size_t start, std::size_t end) {
  SourceSpan s{start, end, 1, 1};
  for (std::size_t i = 0; i < start && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++s.line;
      s.column = 1;
    } else if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) {
      ++s.column;
    }
  }
  return s;
}

ParseResult parse(std::string_view text) {
  ParseResult result;
  Lexer lexer(text, result.errors);
  auto tokens = lexer.run();
  Parser parser(std::move(tokens), result.errors);
  auto model = parser.file();
  if (result.errors.empty()) result.model = std::move(model);
  return result;
}

std::string format(const SystemModel& model) {
  std::ostringstream os;
  os << "system " << model.name;
  describe_suffix(os, model.description);
  os << " {\n";

  bool first_group = true;
  auto group = [&](bool nonempty) {
    if (!nonempty) return;
    if (!first_group) os << '\n';
    first_group = false;
  };

  group(!model.data_types.empty());
  for (const auto& t : model.data_types) {
    os << "  type " << t.name;
    describe_suffix(os, t.description);
    os << ";\n";
  }

  group(!model.modules.empty());
  for (const auto& m : model.modules) {
    os << "  module " << m.name << " layer " << m.layer;
    describe_suffix(os, m.description);
    os << " {\n";
    for (const auto& l : m.inputs) {
      os << "    in " << l.name << ": " << l.data_type;
      describe_suffix(os, l.description);
      os << ";\n";
    }
    for (const auto& l : m.outputs) {
      os << "    out " << l.name << ": " << l.data_type;
      describe_suffix(os, l.description);
      os << ";\n";
    }
    os << "  }\n";
  }

  group(!model.wires.empty());
  for (const auto& w : model.wires) {
    os << "  wire " << w.source.str() << " -> " << w.sink.str() << ";\n";
  }

  group(!model.modifiers.empty());
  for (const auto& m : model.modifiers) {
    os << "  " << (m.kind == ModifierKind::suppressor ? "suppress " : "inhibit ") << m.target.str()
       << " by " << m.controlled_by.str() << " for " << m.time_ms << " ms;\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace subsum::dsl
