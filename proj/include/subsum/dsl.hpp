#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subsum/metamodel.hpp"

namespace subsum::dsl {

struct ParseError {
  SourceSpan span;
  std::string message;
  std::vector<std::string> expected;
};

struct ParseResult {
  std::optional<SystemModel> model;
  std::vector<ParseError> errors;

  bool ok() const { return model.has_value() && errors.empty(); }
};

/// Parses `.sub` text. Recovers at statement boundaries, so one call can
/// report several errors. Name clashes are not errors here; see validate().
ParseResult parse(std::string_view text);

/// Canonical text: two-space indent, one declaration per line, groups in the
/// order types, modules, wires, modifiers. Comments are not preserved.
std::string format(const SystemModel& model);

/// Escapes `"` and `\` (plus newline and tab) for a double-quoted literal.
std::string quote(std::string_view text);

/// Recomputes line/column for a byte offset.
SourceSpan span_at(std::string_view text, std::size_t start, std::size_t end);

}  // namespace subsum::dsl
