#include "subsum/metamodel.hpp"

#include <algorithm>

namespace subsum {

std::string_view to_string(ModifierKind kind) {
  return kind == ModifierKind::suppressor ? "suppressor" : "inhibitor";
}

bool is_identifier(std::string_view text) {
  if (text.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(text.front())) return false;
  return std::all_of(text.begin() + 1, text.end(), [&](char c) { return alpha(c) || digit(c); });
}

std::optional<LineRef> parse_qualified(std::string_view path) {
  const auto dot = path.find('.');
  if (dot == std::string_view::npos) return std::nullopt;
  auto module = path.substr(0, dot);
  auto line = path.substr(dot + 1);
  if (!is_identifier(module) || !is_identifier(line)) return std::nullopt;
  return LineRef{std::string(module), std::string(line), std::nullopt};
}

std::optional<std::size_t> module_index(const SystemModel& model, std::string_view name) {
  for (std::size_t i = 0; i < model.modules.size(); ++i) {
    if (model.modules[i].name == name) return i;
  }
  return std::nullopt;
}

const ModuleDecl* find_module(const SystemModel& model, std::string_view name) {
  auto idx = module_index(model, name);
  return idx ? &model.modules[*idx] : nullptr;
}

const DataTypeDecl* find_data_type(const SystemModel& model, std::string_view name) {
  for (const auto& t : model.data_types) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::optional<ResolvedLine> resolve(const SystemModel& model, const LineRef& ref) {
  auto idx = module_index(model, ref.module);
  if (!idx) return std::nullopt;
  const auto& module = model.modules[*idx];
  for (std::size_t i = 0; i < module.inputs.size(); ++i) {
    if (module.inputs[i].name == ref.line) {
      return ResolvedLine{&module, &module.inputs[i], LineDirection::input, *idx, i};
    }
  }
  for (std::size_t i = 0; i < module.outputs.size(); ++i) {
    if (module.outputs[i].name == ref.line) {
      return ResolvedLine{&module, &module.outputs[i], LineDirection::output, *idx, i};
    }
  }
  return std::nullopt;
}

std::optional<ResolvedLine> resolve(const SystemModel& model, std::string_view path) {
  auto ref = parse_qualified(path);
  if (!ref) return std::nullopt;
  return resolve(model, *ref);
}

std::set<std::uint32_t> layers(const SystemModel& model) {
  std::set<std::uint32_t> out;
  for (const auto& m : model.modules) out.insert(m.layer);
  return out;
}

}  // namespace subsum
