#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace subsum::codegen::tmpl {

struct Value;
using Dict = std::map<std::string, Value, std::less<>>;
using List = std::vector<Dict>;

struct Value {
  std::variant<std::string, bool, List> v;

  Value() : v(std::string{}) {}
  Value(std::string s) : v(std::move(s)) {}
  Value(const char* s) : v(std::string(s)) {}
  Value(bool b) : v(b) {}
  Value(List l) : v(std::move(l)) {}
};

/// Minimal mustache: `{{name}}`, `{{#name}}..{{/name}}` (list iteration or
/// boolean/non-empty string guard), `{{^name}}..{{/name}}` (inverse).
/// Lookup walks outward through enclosing sections. A line holding only a
/// section tag is dropped entirely. No HTML escaping.
std::string render(std::string_view tmpl, const Dict& data);

}  // namespace subsum::codegen::tmpl
