#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace subsum {

/// Byte range in a source text plus the 1-based line/column of its start.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::uint32_t line = 1;
  std::uint32_t column = 1;

  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

/// `module.line` reference as written in the model.
struct LineRef {
  std::string module;
  std::string line;
  std::optional<SourceSpan> span;

  std::string str() const { return module + "." + line; }

  // Spans are provenance only; two references are equal when they name the same line.
  friend bool operator==(const LineRef& a, const LineRef& b) {
    return a.module == b.module && a.line == b.line;
  }
};

struct DataTypeDecl {
  std::string name;
  std::optional<std::string> description;
  std::optional<SourceSpan> span;

  friend bool operator==(const DataTypeDecl& a, const DataTypeDecl& b) {
    return a.name == b.name && a.description == b.description;
  }
};

enum class LineDirection { input, output };

struct LineDecl {
  std::string name;
  std::optional<std::string> description;
  std::string data_type;
  std::optional<SourceSpan> span;

  friend bool operator==(const LineDecl& a, const LineDecl& b) {
    return a.name == b.name && a.description == b.description && a.data_type == b.data_type;
  }
};

using InputLine = LineDecl;
using OutputLine = LineDecl;

struct ModuleDecl {
  std::string name;
  std::optional<std::string> description;
  std::uint32_t layer = 0;
  std::vector<InputLine> inputs;
  std::vector<OutputLine> outputs;
  std::optional<SourceSpan> span;

  friend bool operator==(const ModuleDecl& a, const ModuleDecl& b) {
    return a.name == b.name && a.description == b.description && a.layer == b.layer &&
           a.inputs == b.inputs && a.outputs == b.outputs;
  }
};

struct Wire {
  LineRef source;
  LineRef sink;
  std::optional<SourceSpan> span;

  friend bool operator==(const Wire& a, const Wire& b) {
    return a.source == b.source && a.sink == b.sink;
  }
};

enum class ModifierKind { suppressor, inhibitor };

std::string_view to_string(ModifierKind kind);

/// Suppressor (target is an input line) or inhibitor (target is an output line).
/// `time_ms` is signed so that programmatically built models can carry the
/// non-positive values the validator rejects.
struct Modifier {
  ModifierKind kind = ModifierKind::suppressor;
  LineRef target;
  LineRef controlled_by;
  std::int64_t time_ms = 1;
  std::optional<SourceSpan> span;

  friend bool operator==(const Modifier& a, const Modifier& b) {
    return a.kind == b.kind && a.target == b.target && a.controlled_by == b.controlled_by &&
           a.time_ms == b.time_ms;
  }
};

/// Root of the model. All lists keep declaration order.
struct SystemModel {
  std::string name;
  std::optional<std::string> description;
  std::vector<DataTypeDecl> data_types;
  std::vector<ModuleDecl> modules;
  std::vector<Wire> wires;
  std::vector<Modifier> modifiers;
  std::optional<SourceSpan> span;

  friend bool operator==(const SystemModel& a, const SystemModel& b) {
    return a.name == b.name && a.description == b.description && a.data_types == b.data_types &&
           a.modules == b.modules && a.wires == b.wires && a.modifiers == b.modifiers;
  }
};

/// Result of looking up a qualified line name.
struct ResolvedLine {
  const ModuleDecl* module = nullptr;
  const LineDecl* line = nullptr;
  LineDirection direction = LineDirection::input;
  std::size_t module_index = 0;
  std::size_t line_index = 0;  // index within module->inputs or module->outputs
};

bool is_identifier(std::string_view text);

/// Parses "module.line"; nullopt when the text is not two identifiers joined by a dot.
std::optional<LineRef> parse_qualified(std::string_view path);

const ModuleDecl* find_module(const SystemModel& model, std::string_view name);
std::optional<std::size_t> module_index(const SystemModel& model, std::string_view name);
const DataTypeDecl* find_data_type(const SystemModel& model, std::string_view name);

/// First module with the given name, then its first line with the given name
/// (inputs searched before outputs).
std::optional<ResolvedLine> resolve(const SystemModel& model, const LineRef& ref);
std::optional<ResolvedLine> resolve(const SystemModel& model, std::string_view path);

std::set<std::uint32_t> layers(const SystemModel& model);

}  // namespace subsum
