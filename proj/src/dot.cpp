#include <map>
#include <sstream>

#include "subsum/codegen.hpp"

namespace subsum::codegen {
namespace {

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string to_dot(const SystemModel& model) {
  std::ostringstream os;
  os << "digraph " << quoted(model.name) << " {\n";
  os << "  rankdir=LR;\n";
  os << "  node [shape=box, fontname=\"Helvetica\"];\n";
  os << "  edge [fontname=\"Helvetica\", fontsize=10];\n";

  for (auto layer : layers(model)) {
    os << "  subgraph cluster_layer_" << layer << " {\n";
    os << "    label=\"layer " << layer << "\";\n";
    os << "    style=rounded;\n";
    for (const auto& m : model.modules) {
      if (m.layer == layer) os << "    " << quoted(m.name) << ";\n";
    }
    os << "  }\n";
  }

  // Modifier nodes sit on the intercepted line.
  std::map<std::string, std::string> on_input;   // "m.in" -> node id
  std::map<std::string, std::string> on_output;  // "m.out" -> node id
  for (std::size_t i = 0; i < model.modifiers.size(); ++i) {
    const auto& mod = model.modifiers[i];
    const bool suppressor = mod.kind == ModifierKind::suppressor;
    const std::string id = (suppressor ? "S" : "I") + std::to_string(i);
    os << "  " << id << " [shape=circle, label=\"" << (suppressor ? "S" : "I") << "\", xlabel=\""
       << mod.time_ms << " ms\"];\n";
    os << "  " << quoted(mod.controlled_by.module) << " -> " << id << " [taillabel="
       << quoted(mod.controlled_by.line) << ", style=dashed];\n";
    (suppressor ? on_input : on_output)[mod.target.str()] = id;
    if (suppressor) {
      os << "  " << id << " -> " << quoted(mod.target.module) << " [headlabel="
         << quoted(mod.target.line) << "];\n";
    } else {
      os << "  " << quoted(mod.target.module) << " -> " << id << " [taillabel="
         << quoted(mod.target.line) << ", arrowhead=none];\n";
    }
  }

  for (const auto& w : model.wires) {
    auto from = quoted(w.source.module);
    auto tail = " taillabel=" + quoted(w.source.line);
    if (auto it = on_output.find(w.source.str()); it != on_output.end()) {
      from = it->second;
      tail.clear();
    }
    if (auto it = on_input.find(w.sink.str()); it != on_input.end()) {
      os << "  " << from << " -> " << it->second << " [" << (tail.empty() ? "" : tail.substr(1))
         << "];\n";
      continue;
    }
    os << "  " << from << " -> " << quoted(w.sink.module) << " [" << (tail.empty() ? "" : tail.substr(1) + ",")
       << " headlabel=" << quoted(w.sink.line) << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace subsum::codegen
