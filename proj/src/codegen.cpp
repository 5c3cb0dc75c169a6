#include "subsum/codegen.hpp"

#include <algorithm>
#include <iterator>
#include <cstdio>
#include <set>
#include <sstream>

#include "codegen_templates.hpp"
#include "template.hpp"

namespace subsum::codegen {
namespace {

using tmpl::Dict;
using tmpl::List;

constexpr std::string_view kChecksumTag = "subsum-checksum: ";
constexpr std::string_view kChecksumPlaceholder = "@checksum@";

constexpr std::string_view kCppKeywords[] = {
    "alignas",   "alignof",     "and",          "and_eq",       "asm",          "auto",
    "bitand",    "bitor",       "bool",         "break",        "case",         "catch",
    "char",      "char8_t",     "char16_t",     "char32_t",     "class",        "compl",
    "concept",   "const",       "consteval",    "constexpr",    "constinit",    "const_cast",
    "continue",  "co_await",    "co_return",    "co_yield",     "decltype",     "default",
    "delete",    "do",          "double",       "dynamic_cast", "else",         "enum",
    "explicit",  "export",      "extern",       "false",        "float",        "for",
    "friend",    "goto",        "if",           "inline",       "int",          "long",
    "mutable",   "namespace",   "new",          "noexcept",     "not",          "not_eq",
    "nullptr",   "operator",    "or",           "or_eq",        "private",      "protected",
    "public",    "register",    "reinterpret_cast", "requires", "return",       "short",
    "signed",    "sizeof",      "static",       "static_assert", "static_cast", "struct",
    "switch",    "template",    "this",         "thread_local", "throw",        "true",
    "try",       "typedef",     "typeid",       "typename",     "union",        "unsigned",
    "using",     "virtual",     "void",         "volatile",     "wchar_t",      "while",
    "xor",       "xor_eq",      "std",          "subsum",       "final",        "override",
    "main",
};

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_lower_or_digit(char c) { return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'); }

/// Assigns unique mangled names within one C++ scope.
class Scope {
 public:
  explicit Scope(std::set<std::string> reserved = {}) : used_(std::move(reserved)) {}

  std::string add(std::string_view model_name) {
    std::string base = mangle(model_name);
    std::string name = base;
    for (int n = 2; used_.count(name); ++n) name = base + "_" + std::to_string(n);
    used_.insert(name);
    return name;
  }

 private:
  std::set<std::string> used_;
};

std::string cpp_literal(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string optional_literal(const std::optional<std::string>& text) {
  return text ? "std::optional<std::string>{" + cpp_literal(*text) + "}" : "std::nullopt";
}

std::string one_line(const std::optional<std::string>& text) {
  if (!text) return {};
  std::string out;
  for (char c : *text) out += (c == '\n' || c == '\r' || c == '\t') ? ' ' : c;
  return out;
}

List doc_lines(const std::optional<std::string>& text) {
  List out;
  if (!text || text->empty()) return out;
  std::istringstream is(*text);
  std::string line;
  while (std::getline(is, line)) out.push_back(Dict{{"line", line}});
  return out;
}

std::string summary(const std::optional<std::string>& text) {
  auto s = one_line(text);
  return s.empty() ? "(no description)" : s;
}

std::string fnv_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

std::string_view trim_left(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

/// If `line` is a region marker, returns the region id; `begin` tells which.
std::optional<std::string> marker(std::string_view line, bool& begin) {
  auto t = trim_left(line);
  for (std::string_view leader : {"// ", "# ", "<!-- "}) {
    if (t.substr(0, leader.size()) != leader) continue;
    auto rest = t.substr(leader.size());
    if (rest.substr(0, kRegionBegin.size()) == kRegionBegin) {
      begin = true;
      rest.remove_prefix(kRegionBegin.size());
    } else if (rest.substr(0, kRegionEnd.size()) == kRegionEnd) {
      begin = false;
      rest.remove_prefix(kRegionEnd.size());
    } else {
      return std::nullopt;
    }
    if (leader == "<!-- " && rest.size() >= 4 && rest.substr(rest.size() - 4) == " -->") {
      rest.remove_suffix(4);
    }
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r')) rest.remove_suffix(1);
    return std::string(rest);
  }
  return std::nullopt;
}

bool is_checksum_line(std::string_view line) { return line.find(kChecksumTag) != std::string_view::npos; }

/// Rewrites region bodies. `fill` returns the replacement body for an id, or
/// nullopt to keep the current one. Bodies that are only whitespace collapse
/// to nothing.
template <typename Fill>
std::string rewrite_regions(std::string_view content, Fill fill) {
  std::string out;
  auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    out += '\n';
    bool begin = false;
    auto id = marker(lines[i], begin);
    if (!id || !begin) continue;
    std::string body;
    std::size_t j = i + 1;
    bool end_seen = false;
    for (; j < lines.size(); ++j) {
      bool b = false;
      auto other = marker(lines[j], b);
      if (other && !b && *other == *id) {
        end_seen = true;
        break;
      }
      body += lines[j];
      body += '\n';
    }
    if (!end_seen) throw GenError(GenError::Kind::io_conflict, "region '" + *id + "' is not closed");
    if (auto replacement = fill(*id)) body = *replacement;
    if (body.find_first_not_of(" \t\n") == std::string::npos) body.clear();
    out += body;
    i = j - 1;
  }
  return out;
}

std::string finalize(std::string content) {
  content = rewrite_regions(content, [](const std::string&) -> std::optional<std::string> { return std::nullopt; });
  auto pos = content.find(kChecksumPlaceholder);
  if (pos != std::string::npos) {
    content.replace(pos, kChecksumPlaceholder.size(), scaffold_checksum(content));
  }
  if (content.empty() || content.back() != '\n') content += '\n';
  return content;
}

struct Names {
  std::string project;
  std::vector<std::string> modules;                // by module index
  std::vector<std::vector<std::string>> lines;     // by module, inputs then outputs
  std::map<std::string, std::string> types;        // model name -> C++ name
};

Names assign_names(const SystemModel& model, const std::string& project_name) {
  Names n;
  n.project = mangle(project_name);
  Scope module_scope;
  for (const auto& m : model.modules) {
    n.modules.push_back(module_scope.add(m.name));
    Scope line_scope;
    std::vector<std::string> ids;
    for (const auto& l : m.inputs) ids.push_back(line_scope.add(l.name));
    for (const auto& l : m.outputs) ids.push_back(line_scope.add(l.name));
    n.lines.push_back(std::move(ids));
  }
  Scope type_scope({"type_token"});
  for (const auto& t : model.data_types) {
    if (!n.types.count(t.name)) n.types[t.name] = type_scope.add(t.name);
  }
  return n;
}

Dict base_dict(const SystemModel& model, const Names& names) {
  Dict d;
  d["system"] = model.name;
  d["project"] = names.project;
  d["checksum"] = std::string(kChecksumPlaceholder);
  d["description_literal"] = optional_literal(model.description);
  d["description_text"] = summary(model.description);
  return d;
}

List line_list(const SystemModel& model, const Names& names, std::size_t mi, bool inputs) {
  const auto& m = model.modules[mi];
  const auto& decls = inputs ? m.inputs : m.outputs;
  const std::size_t offset = inputs ? 0 : m.inputs.size();
  List out;
  for (std::size_t i = 0; i < decls.size(); ++i) {
    const auto& l = decls[i];
    auto type_id = names.types.count(l.data_type) ? names.types.at(l.data_type) : mangle(l.data_type);
    out.push_back(Dict{{"name", l.name},
                       {"id", names.lines[mi][offset + i]},
                       {"type", l.data_type},
                       {"type_id", type_id},
                       {"description", one_line(l.description)},
                       {"summary", summary(l.description)},
                       {"description_literal", optional_literal(l.description)}});
  }
  return out;
}

Dict module_dict(const SystemModel& model, const Names& names, std::size_t mi) {
  const auto& m = model.modules[mi];
  Dict d = base_dict(model, names);
  d["module"] = m.name;
  d["module_id"] = names.modules[mi];
  d["layer"] = std::to_string(m.layer);
  d["doc"] = doc_lines(m.description);
  d["description_literal"] = optional_literal(m.description);
  d["description_text"] = summary(m.description);
  d["summary"] = summary(m.description);
  d["inputs"] = line_list(model, names, mi, true);
  d["outputs"] = line_list(model, names, mi, false);
  d["members"] = "";
  d["includes"] = "";
  d["body"] = "  (void)io;";
  return d;
}

Dict system_dict(const SystemModel& model, const Names& names, const GenOptions& opts) {
  Dict d = base_dict(model, names);
  List modules;
  for (std::size_t i = 0; i < model.modules.size(); ++i) {
    modules.push_back(Dict{{"module", model.modules[i].name},
                           {"module_id", names.modules[i]},
                           {"layer", std::to_string(model.modules[i].layer)},
                           {"summary", summary(model.modules[i].description)}});
  }
  List types;
  for (const auto& t : model.data_types) {
    types.push_back(Dict{{"type", t.name},
                         {"type_id", names.types.at(t.name)},
                         {"doc", doc_lines(t.description)},
                         {"summary", summary(t.description)},
                         {"description_literal", optional_literal(t.description)},
                         {"body", ""}});
  }
  List wires;
  for (const auto& w : model.wires) {
    wires.push_back(Dict{{"source_module", w.source.module},
                         {"source_line", w.source.line},
                         {"sink_module", w.sink.module},
                         {"sink_line", w.sink.line},
                         {"source", w.source.str()},
                         {"sink", w.sink.str()}});
  }
  List modifiers;
  for (const auto& m : model.modifiers) {
    modifiers.push_back(Dict{{"kind", std::string(to_string(m.kind))},
                             {"target_module", m.target.module},
                             {"target_line", m.target.line},
                             {"control_module", m.controlled_by.module},
                             {"control_line", m.controlled_by.line},
                             {"target", m.target.str()},
                             {"control", m.controlled_by.str()},
                             {"time_ms", std::to_string(m.time_ms)}});
  }
  List layer_rows;
  for (auto layer : layers(model)) {
    std::string members;
    for (const auto& m : model.modules) {
      if (m.layer != layer) continue;
      if (!members.empty()) members += ", ";
      members += "`" + m.name + "`";
    }
    layer_rows.push_back(Dict{{"layer", std::to_string(layer)}, {"modules", members}});
  }
  List name_rows;
  name_rows.push_back(Dict{{"model", model.name}, {"cpp", names.project}});
  for (std::size_t i = 0; i < model.modules.size(); ++i) {
    name_rows.push_back(Dict{{"model", model.modules[i].name}, {"cpp", names.modules[i]}});
  }
  for (const auto& [model_name, cpp] : names.types) {
    name_rows.push_back(Dict{{"model", model_name}, {"cpp", cpp}});
  }

  d["modules"] = modules;
  d["types"] = types;
  d["wires"] = wires;
  d["modifiers"] = modifiers;
  d["layers"] = layer_rows;
  d["names"] = name_rows;
  d["emit_tests"] = opts.emit_tests;
  d["default_ticks"] = "1000";
  d["includes"] = "";
  d["extra"] = "";
  d["setup"] = "";
  d["link"] = "";
  return d;
}

Dict module_doc_dict(const SystemModel& model, const Names& names, std::size_t mi) {
  Dict d = module_dict(model, names, mi);
  const auto& m = model.modules[mi];
  List wiring;
  for (const auto& l : m.inputs) {
    std::string peer;
    for (const auto& w : model.wires) {
      if (w.sink.module == m.name && w.sink.line == l.name) peer = "from `" + w.source.str() + "`";
    }
    wiring.push_back(Dict{{"line", l.name}, {"peer", peer.empty() ? "(unconnected)" : peer}});
  }
  for (const auto& l : m.outputs) {
    std::string peer;
    for (const auto& w : model.wires) {
      if (w.source.module == m.name && w.source.line == l.name) {
        if (!peer.empty()) peer += ", ";
        peer += "to `" + w.sink.str() + "`";
      }
    }
    wiring.push_back(Dict{{"line", l.name}, {"peer", peer.empty() ? "(unconnected)" : peer}});
  }
  List interception;
  for (const auto& mod : model.modifiers) {
    const std::string kind(to_string(mod.kind));
    const std::string time = std::to_string(mod.time_ms) + " ms";
    if (mod.target.module == m.name) {
      interception.push_back(Dict{{"text", "`" + mod.target.line + "` is under a " + kind +
                                               " controlled by `" + mod.controlled_by.str() +
                                               "` (" + time + ")"}});
    }
    if (mod.controlled_by.module == m.name) {
      interception.push_back(Dict{{"text", "`" + mod.controlled_by.line + "` controls a " + kind +
                                               " on `" + mod.target.str() + "` (" + time + ")"}});
    }
  }
  d["wiring"] = wiring;
  d["interception"] = interception;
  return d;
}

void require_valid(const SystemModel& model) {
  auto diags = validate(model);
  if (!diags.empty()) {
    std::string message = "model '" + model.name + "' has " + std::to_string(diags.size()) +
                          " validation error(s); first: " + code_name(diags.front().code) + " " +
                          diags.front().message;
    throw GenError(GenError::Kind::invalid_model, std::move(message), std::move(diags));
  }
}

std::string line_diff_summary(std::string_view expected, std::string_view actual) {
  auto a = split_lines(expected);
  auto b = split_lines(actual);
  std::size_t first = 0;
  while (first < a.size() && first < b.size() && a[first] == b[first]) ++first;
  std::size_t differing = 0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    if (i >= a.size() || i >= b.size() || a[i] != b[i]) ++differing;
  }
  std::ostringstream os;
  os << differing << " line(s) differ from the generated scaffold, first at line " << first + 1;
  if (first < b.size()) os << ": \"" << b[first] << "\"";
  return os.str();
}

}  // namespace

std::string mangle(std::string_view identifier) {
  std::vector<std::string> words;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) words.push_back(std::move(word));
    word.clear();
  };
  for (std::size_t i = 0; i < identifier.size(); ++i) {
    char c = identifier[i];
    if (c == '_') {
      flush();
      continue;
    }
    if (is_upper(c) && !word.empty()) {
      const char prev = identifier[i - 1];
      const bool next_lower = i + 1 < identifier.size() && identifier[i + 1] >= 'a' && identifier[i + 1] <= 'z';
      if (is_lower_or_digit(prev) || (is_upper(prev) && next_lower)) flush();
    }
    word += is_upper(c) ? static_cast<char>(c - 'A' + 'a') : c;
  }
  flush();
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += '_';
    out += w;
  }
  if (out.empty()) out = "id";
  if (out[0] >= '0' && out[0] <= '9') out = "n_" + out;
  if (std::find(std::begin(kCppKeywords), std::end(kCppKeywords), out) != std::end(kCppKeywords)) out += '_';
  return out;
}

FileSet generate(const SystemModel& model, const GenOptions& opts) {
  require_valid(model);
  const std::string project = opts.project_name.value_or(model.name);
  if (!is_identifier(project)) {
    throw GenError(GenError::Kind::invalid_options, "project name '" + project + "' is not an identifier");
  }
  const Names names = assign_names(model, project);
  const Dict sys = system_dict(model, names, opts);
  FileSet files;
  auto put = [&](const std::string& path, std::string_view tpl, const Dict& d) {
    files[path] = finalize(tmpl::render(tpl, d));
  };

  if (opts.emit_sources) {
    put("CMakeLists.txt", templates::manifest, sys);
    put("src/types.hpp", templates::types_header, sys);
    put("src/system.hpp", templates::system_header, sys);
    put("src/system.cpp", templates::system_source, sys);
    put("src/main.cpp", templates::main_source, sys);
    for (std::size_t i = 0; i < model.modules.size(); ++i) {
      const Dict d = module_dict(model, names, i);
      put("src/modules/" + names.modules[i] + ".hpp", templates::module_header, d);
      put("src/modules/" + names.modules[i] + ".cpp", templates::module_source, d);
    }
  }
  if (opts.emit_tests && opts.emit_sources) {
    put("tests/test_main.cpp", templates::test_main, sys);
    for (std::size_t i = 0; i < model.modules.size(); ++i) {
      Dict d = module_dict(model, names, i);
      d["body"] =
          "  // Stimulate inputs with runtime.inject(...), run, then check the probes.\n"
          "  runtime.run_until(10);";
      put("tests/test_" + names.modules[i] + ".cpp", templates::module_test, d);
    }
  }
  if (opts.emit_docs) {
    put("docs/index.md", templates::doc_index, sys);
    for (std::size_t i = 0; i < model.modules.size(); ++i) {
      put("docs/" + names.modules[i] + ".md", templates::doc_module, module_doc_dict(model, names, i));
    }
  }
  return files;
}

FileSet generate_docs(const SystemModel& model) {
  GenOptions opts;
  opts.emit_sources = false;
  opts.emit_docs = true;
  return generate(model, opts);
}

std::vector<Region> find_regions(std::string_view content) {
  std::vector<Region> out;
  std::set<std::string> seen;
  std::optional<Region> open;
  auto lines = split_lines(content);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    bool begin = false;
    auto id = marker(lines[i], begin);
    if (!id) {
      if (open) {
        open->body += lines[i];
        open->body += '\n';
      }
      continue;
    }
    if (begin) {
      if (open) {
        throw GenError(GenError::Kind::io_conflict, "region '" + *id + "' opens inside region '" +
                                                        open->id + "' at line " + std::to_string(i + 1));
      }
      if (!seen.insert(*id).second) {
        throw GenError(GenError::Kind::io_conflict, "region '" + *id + "' appears twice");
      }
      open = Region{*id, {}, i + 1};
    } else {
      if (!open || open->id != *id) {
        throw GenError(GenError::Kind::io_conflict,
                       "unmatched end of region '" + *id + "' at line " + std::to_string(i + 1));
      }
      out.push_back(std::move(*open));
      open.reset();
    }
  }
  if (open) throw GenError(GenError::Kind::io_conflict, "region '" + open->id + "' is not closed");
  return out;
}

std::optional<std::string> recorded_checksum(std::string_view content) {
  for (auto line : split_lines(content)) {
    auto pos = line.find(kChecksumTag);
    if (pos == std::string_view::npos) continue;
    auto rest = line.substr(pos + kChecksumTag.size());
    auto end = rest.find_first_of(" \r");
    return std::string(rest.substr(0, end));
  }
  return std::nullopt;
}

std::string scaffold_checksum(std::string_view content) {
  std::string scaffold;
  bool inside = false;
  for (auto line : split_lines(content)) {
    bool begin = false;
    if (marker(line, begin)) {
      inside = begin;
      scaffold += line;
      scaffold += '\n';
      continue;
    }
    if (inside || is_checksum_line(line)) continue;
    scaffold += line;
    scaffold += '\n';
  }
  return fnv_hex(scaffold);
}

MergeResult merge(const FileSet& fresh, const FileSet& existing, bool overwrite_user_regions,
                  bool force) {
  MergeResult result;
  for (const auto& [path, content] : fresh) {
    auto it = existing.find(path);
    if (it == existing.end()) {
      result.files[path] = content;
      result.changed.push_back(path);
      continue;
    }
    const std::string& old = it->second;
    std::map<std::string, std::string> bodies;
    bool conflict = false;
    try {
      for (auto& r : find_regions(old)) bodies[r.id] = std::move(r.body);
    } catch (const GenError& e) {
      result.conflicts.push_back(Conflict{path, e.what()});
      conflict = true;
    }

    std::string merged = content;
    if (!conflict && !overwrite_user_regions) {
      std::set<std::string> used;
      merged = rewrite_regions(content, [&](const std::string& id) -> std::optional<std::string> {
        auto b = bodies.find(id);
        if (b == bodies.end()) return std::nullopt;
        used.insert(id);
        return b->second;
      });
      for (const auto& [id, body] : bodies) {
        if (!used.count(id) && body.find_first_not_of(" \t\n") != std::string::npos) {
          result.orphaned.push_back(path + ": " + id);
        }
      }
    }

    if (!conflict) {
      auto recorded = recorded_checksum(old);
      if (!recorded || *recorded != scaffold_checksum(old)) {
        result.conflicts.push_back(
            Conflict{path, recorded ? line_diff_summary(merged, old)
                                    : "no subsum-checksum line; the file was not generated or was "
                                      "edited outside user regions"});
        conflict = true;
      }
    }

    if (conflict && !force) {
      result.files[path] = old;
      continue;
    }
    result.files[path] = merged;
    if (merged != old) result.changed.push_back(path);
  }
  return result;
}

std::size_t count_code_lines(std::string_view content) {
  std::size_t n = 0;
  for (auto line : split_lines(content)) {
    auto t = trim_left(line);
    const bool comment = t.substr(0, 2) == "//" || t.substr(0, 4) == "<!--" || t == "#" ||
                         t.substr(0, 2) == "# ";
    if (!t.empty() && !comment) ++n;
  }
  return n;
}

std::size_t count_region_lines(std::string_view content) {
  std::size_t n = 0;
  for (const auto& r : find_regions(content)) n += split_lines(r.body).size();
  return n;
}

}  // namespace subsum::codegen
